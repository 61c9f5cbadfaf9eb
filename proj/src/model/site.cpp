#include "fppc/model/site.hpp"

#include <cstdlib>
#include <sstream>

#include "fppc/model/errors.hpp"
#include "fppc/model/hash.hpp"

namespace fppc {

namespace {
constexpr int kLabelsPerWord = 8;
constexpr int kLabelBits = 8;
}  // namespace

std::uint64_t TreeSite::child_key(std::uint64_t parent_key, int label) noexcept
{
    return mix64(parent_key + kGolden * static_cast<std::uint64_t>(label + 1));
}

TreeSite TreeSite::from_labels(int d, std::span<const int> labels)
{
    TreeSite s;
    for (int lbl : labels) s = s.child(d, lbl);
    return s;
}

int TreeSite::label(int level) const
{
    if (level < 0 || level >= depth())
        throw DomainError("TreeSite::label: level out of range");
    auto word = words_[level / kLabelsPerWord];
    return static_cast<int>((word >> (kLabelBits * (level % kLabelsPerWord))) & 0xffu);
}

std::vector<int> TreeSite::labels() const
{
    std::vector<int> out(depth());
    for (int i = 0; i < depth(); ++i) out[i] = label(i);
    return out;
}

void TreeSite::push(int lbl)
{
    int slot = static_cast<int>(depth_ % kLabelsPerWord);
    if (slot == 0) words_.push_back(0);
    words_.back() |= static_cast<std::uint64_t>(lbl) << (kLabelBits * slot);
    ++depth_;
    key_ = child_key(key_, lbl);
}

TreeSite TreeSite::child(int d, int i) const
{
    int n = is_root() ? d : d - 1;
    if (d < 2 || d > 255) throw ConfigError("tree degree must lie in [2, 255]");
    if (i < 0 || i >= n) throw DomainError("TreeSite::child: label out of range");
    TreeSite c = *this;
    c.push(i);
    return c;
}

TreeSite TreeSite::parent() const
{
    if (is_root()) throw DomainError("the root has no parent");
    TreeSite p;
    for (int i = 0; i + 1 < depth(); ++i) {
        // Labels are already validated, so skip child()'s range check.
        p.push(label(i));
    }
    return p;
}

bool TreeSite::is_parent_of(const TreeSite& other) const
{
    if (other.depth() != depth() + 1) return false;
    for (int i = 0; i < depth(); ++i)
        if (label(i) != other.label(i)) return false;
    return true;
}

std::string TreeSite::str() const
{
    std::ostringstream os;
    os << "σ";
    for (int i = 0; i < depth(); ++i) os << (i == 0 ? ":" : ".") << label(i);
    return os.str();
}

std::strong_ordering operator<=>(const TreeSite& a, const TreeSite& b)
{
    int n = std::min(a.depth(), b.depth());
    for (int i = 0; i < n; ++i) {
        if (auto c = a.label(i) <=> b.label(i); c != 0) return c;
    }
    return a.depth() <=> b.depth();
}

int LatticeSite::radius() const noexcept
{
    int r = 0;
    for (int c : coords_) r = std::max(r, std::abs(c));
    return r;
}

std::uint64_t LatticeSite::key_of(std::span<const int> coords) noexcept
{
    std::uint64_t h = 0x243f6a8885a308d3ull + coords.size();
    for (int c : coords)
        h = mix64(h + kGolden * static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
    return h;
}

std::string LatticeSite::str() const
{
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim(); ++i) os << (i ? "," : "") << coords_[i];
    os << ')';
    return os.str();
}

std::vector<TreeSite> children(const TreeSite& s, int d)
{
    int n = s.is_root() ? d : d - 1;
    std::vector<TreeSite> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(s.child(d, i));
    return out;
}

TreeSite parent(const TreeSite& s) { return s.parent(); }

std::vector<TreeSite> neighbors(const TreeSite& s, int d)
{
    auto out = children(s, d);
    if (!s.is_root()) out.insert(out.begin(), s.parent());
    return out;
}

int depth(const TreeSite& s) { return s.depth(); }

std::vector<LatticeSite> neighbors(const LatticeSite& s)
{
    std::vector<LatticeSite> out;
    out.reserve(2 * s.dim());
    for (int axis = 0; axis < s.dim(); ++axis) {
        for (int step : {-1, 1}) {
            auto c = s.coords();
            c[axis] += step;
            out.emplace_back(std::move(c));
        }
    }
    return out;
}

bool adjacent(const LatticeSite& a, const LatticeSite& b)
{
    if (a.dim() != b.dim()) return false;
    int l1 = 0;
    for (int i = 0; i < a.dim(); ++i) l1 += std::abs(a[i] - b[i]);
    return l1 == 1;
}

bool adjacent(const TreeSite& a, const TreeSite& b)
{
    return a.is_parent_of(b) || b.is_parent_of(a);
}

}  // namespace fppc
