#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fppc {

/// Vertex of the d-ary tree as its label sequence from the root. The root has
/// d children labelled 0..d-1; every other vertex has d-1 children labelled
/// 0..d-2. Labels are packed eight to a word, so depth is unbounded.
class TreeSite {
  public:
    TreeSite() = default;  // the root

    static TreeSite from_labels(int d, std::span<const int> labels);

    int depth() const noexcept { return static_cast<int>(depth_); }
    bool is_root() const noexcept { return depth_ == 0; }
    int label(int level) const;
    std::vector<int> labels() const;

    TreeSite child(int d, int i) const;
    TreeSite parent() const;  // DomainError at the root
    bool is_parent_of(const TreeSite& other) const;

    /// Stable 64-bit key, chained from the root key through the labels.
    std::uint64_t key() const noexcept { return key_; }

    std::string str() const;

    friend bool operator==(const TreeSite& a, const TreeSite& b) noexcept
    {
        return a.depth_ == b.depth_ && a.words_ == b.words_;
    }
    friend std::strong_ordering operator<=>(const TreeSite& a, const TreeSite& b);

    static constexpr std::uint64_t kRootKey = 0x5851f42d4c957f2dull;
    static std::uint64_t child_key(std::uint64_t parent_key, int label) noexcept;

  private:
    void push(int label);

    std::vector<std::uint64_t> words_;
    std::uint32_t depth_ = 0;
    std::uint64_t key_ = kRootKey;
};

/// Integer point of Z^d.
class LatticeSite {
  public:
    LatticeSite() = default;
    explicit LatticeSite(std::vector<int> coords) : coords_(std::move(coords)) {}
    static LatticeSite origin(int d) { return LatticeSite(std::vector<int>(d, 0)); }

    int dim() const noexcept { return static_cast<int>(coords_.size()); }
    int operator[](int i) const { return coords_[i]; }
    const std::vector<int>& coords() const noexcept { return coords_; }

    /// L-infinity norm, the box radius a site lies on.
    int radius() const noexcept;
    std::uint64_t key() const noexcept { return key_of(coords_); }
    std::string str() const;

    static std::uint64_t key_of(std::span<const int> coords) noexcept;

    friend bool operator==(const LatticeSite&, const LatticeSite&) = default;
    friend auto operator<=>(const LatticeSite&, const LatticeSite&) = default;

  private:
    std::vector<int> coords_;
};

using SiteId = std::variant<TreeSite, LatticeSite>;

// Tree adjacency. `d` is the tree degree.
std::vector<TreeSite> children(const TreeSite& s, int d);
TreeSite parent(const TreeSite& s);
std::vector<TreeSite> neighbors(const TreeSite& s, int d);
int depth(const TreeSite& s);

// Lattice adjacency: the 2d unit-step neighbours.
std::vector<LatticeSite> neighbors(const LatticeSite& s);
bool adjacent(const LatticeSite& a, const LatticeSite& b);
bool adjacent(const TreeSite& a, const TreeSite& b);

}  // namespace fppc
