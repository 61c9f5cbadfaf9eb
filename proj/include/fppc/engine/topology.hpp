#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fppc/model/clock.hpp"
#include "fppc/model/errors.hpp"
#include "fppc/model/site.hpp"

namespace fppc {

using Node = std::uint32_t;
inline constexpr Node kNoNode = 0xffffffffu;

/// Direction of a step relative to the tree's descendent relation.
enum class Step : std::uint8_t { Down, Up, Flat };

/// Arena of visited tree vertices. Children are allocated as a contiguous
/// block the first time a vertex is expanded.
class TreeTopology {
  public:
    explicit TreeTopology(int d);

    int degree() const noexcept { return d_; }
    Node root() const noexcept { return 0; }
    std::size_t size() const noexcept { return nodes_.size(); }
    int distance(Node n) const noexcept { return nodes_[n].depth; }
    Node parent(Node n) const noexcept { return nodes_[n].parent; }
    std::uint64_t key(Node n) const noexcept { return nodes_[n].key; }
    int child_count(Node n) const noexcept { return n == 0 ? d_ : d_ - 1; }

    /// First child; allocates the child block on first use.
    Node first_child(Node n);

    /// f(neighbor, edge_id, step). Expands n.
    template <class F>
    void for_each_neighbor(Node n, F&& f)
    {
        if (n != 0) f(nodes_[n].parent, nodes_[n].key, Step::Up);
        Node c = first_child(n);
        int cnt = child_count(n);
        for (int i = 0; i < cnt; ++i) f(c + i, nodes_[c + i].key, Step::Down);
    }

    double t1(const RandomField& field, std::uint64_t edge, Step) const
    {
        return field.value(ClockKind::T1, edge);
    }
    double t2(const RandomField& field, std::uint64_t edge, Step step) const
    {
        return field.value(step == Step::Down ? ClockKind::Td : ClockKind::Tu, edge);
    }
    double t3(const RandomField&, std::uint64_t, Step) const
    {
        throw ConfigError("T3 clocks exist only on the lattice");
    }
    double conv(const RandomField& field, Node n) const
    {
        return field.value(ClockKind::Conv, nodes_[n].key);
    }

    TreeSite site(Node n) const;
    std::optional<Node> find(const TreeSite& s) const;

  private:
    struct TreeNode {
        std::uint64_t key;
        Node parent;
        Node first_child;
        std::uint16_t depth;
        std::uint8_t label;
    };
    int d_;
    std::vector<TreeNode> nodes_;
};

/// Finite centred box [-R, R]^d of Z^d. Steps leaving the box are dropped.
class LatticeTopology {
  public:
    LatticeTopology(int d, int radius);

    int dim() const noexcept { return d_; }
    int box_radius() const noexcept { return r_; }
    Node root() const noexcept { return origin_; }
    std::size_t size() const noexcept { return keys_.size(); }
    int distance(Node n) const noexcept { return dist_[n]; }
    std::uint64_t key(Node n) const noexcept { return keys_[n]; }
    int coord(Node n, int axis) const noexcept
    {
        return static_cast<int>((n / stride_[axis]) % side_) - r_;
    }

    template <class F>
    void for_each_neighbor(Node n, F&& f) const
    {
        for (int axis = 0; axis < d_; ++axis) {
            int c = coord(n, axis);
            Node s = stride_[axis];
            if (c > -r_) f(n - s, lattice_edge_id(keys_[n - s], axis), Step::Flat);
            if (c < r_) f(n + s, lattice_edge_id(keys_[n], axis), Step::Flat);
        }
    }

    double t1(const RandomField& field, std::uint64_t edge, Step) const
    {
        return field.value(ClockKind::T1, edge);
    }
    double t2(const RandomField& field, std::uint64_t edge, Step) const
    {
        return field.value(ClockKind::T2, edge);
    }
    double t3(const RandomField& field, std::uint64_t edge, Step) const
    {
        return field.value(ClockKind::T3, edge);
    }
    double conv(const RandomField& field, Node n) const
    {
        return field.value(ClockKind::Conv, keys_[n]);
    }

    LatticeSite site(Node n) const;
    std::optional<Node> find(const LatticeSite& s) const;
    Node index(std::span<const int> coords) const;

  private:
    int d_;
    int r_;
    std::uint32_t side_;
    Node origin_;
    std::vector<Node> stride_;
    std::vector<std::uint64_t> keys_;
    std::vector<int> dist_;
};

}  // namespace fppc
