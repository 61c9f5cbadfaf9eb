#include "fppc/engine/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

namespace fppc {

TreeTopology::TreeTopology(int d) : d_(d)
{
    if (d < 2 || d > 255) throw ConfigError("tree degree must lie in [2, 255]");
    nodes_.reserve(1024);
    nodes_.push_back({TreeSite::kRootKey, kNoNode, kNoNode, 0, 0});
}

Node TreeTopology::first_child(Node n)
{
    if (nodes_[n].first_child != kNoNode) return nodes_[n].first_child;
    if (nodes_.size() + d_ >= kNoNode) throw ConfigError("tree arena exhausted");
    if (nodes_[n].depth == std::numeric_limits<std::uint16_t>::max())
        throw ConfigError("tree depth limit exceeded");
    Node first = static_cast<Node>(nodes_.size());
    int cnt = child_count(n);
    auto depth = static_cast<std::uint16_t>(nodes_[n].depth + 1);
    std::uint64_t pkey = nodes_[n].key;
    for (int i = 0; i < cnt; ++i)
        nodes_.push_back({TreeSite::child_key(pkey, i), n, kNoNode, depth,
                          static_cast<std::uint8_t>(i)});
    nodes_[n].first_child = first;
    return first;
}

TreeSite TreeTopology::site(Node n) const
{
    std::vector<int> labels(nodes_[n].depth);
    for (Node cur = n; cur != 0; cur = nodes_[cur].parent)
        labels[nodes_[cur].depth - 1] = nodes_[cur].label;
    return TreeSite::from_labels(d_, labels);
}

std::optional<Node> TreeTopology::find(const TreeSite& s) const
{
    Node cur = 0;
    for (int i = 0; i < s.depth(); ++i) {
        Node c = nodes_[cur].first_child;
        if (c == kNoNode) return std::nullopt;
        int lbl = s.label(i);
        if (lbl >= child_count(cur)) return std::nullopt;
        cur = c + lbl;
    }
    return cur;
}

LatticeTopology::LatticeTopology(int d, int radius) : d_(d), r_(radius)
{
    if (d < 1 || d > 8) throw ConfigError("lattice dimension must lie in [1, 8]");
    if (radius < 0) throw ConfigError("box radius must be nonnegative");
    side_ = static_cast<std::uint32_t>(2 * radius + 1);
    double total = 1.0;
    for (int i = 0; i < d; ++i) total *= side_;
    if (total > 2.0e8) throw ConfigError("lattice box too large");
    stride_.resize(d);
    Node s = 1;
    for (int i = 0; i < d; ++i) {
        stride_[i] = s;
        s *= side_;
    }
    keys_.resize(s);
    dist_.resize(s);
    std::vector<int> c(d);
    for (Node n = 0; n < s; ++n) {
        int r = 0;
        for (int i = 0; i < d; ++i) {
            c[i] = coord(n, i);
            r = std::max(r, std::abs(c[i]));
        }
        keys_[n] = LatticeSite::key_of(c);
        dist_[n] = r;
    }
    std::vector<int> zero(d, 0);
    origin_ = index(zero);
}

Node LatticeTopology::index(std::span<const int> coords) const
{
    Node n = 0;
    for (int i = 0; i < d_; ++i) n += static_cast<Node>(coords[i] + r_) * stride_[i];
    return n;
}

LatticeSite LatticeTopology::site(Node n) const
{
    std::vector<int> c(d_);
    for (int i = 0; i < d_; ++i) c[i] = coord(n, i);
    return LatticeSite(std::move(c));
}

std::optional<Node> LatticeTopology::find(const LatticeSite& s) const
{
    if (s.dim() != d_ || s.radius() > r_) return std::nullopt;
    return index(s.coords());
}

}  // namespace fppc
