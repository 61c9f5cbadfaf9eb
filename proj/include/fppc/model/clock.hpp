#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fppc/model/hash.hpp"
#include "fppc/model/params.hpp"
#include "fppc/model/site.hpp"

namespace fppc {

/// Clock families. T1: type-1 spread (rate 1). Tu/Td: upward/downward type-2
/// spread on the tree (rate lambda). T2/T3: lattice type-2 spread and its
/// resampled replacement (rate lambda). Conv: conversion (rate rho, keyed by
/// site). SemiMark and SeedMark are uniform marks, not exponential clocks.
enum class ClockKind : std::uint8_t { T1, Tu, Td, T2, T3, Conv, SemiMark, SeedMark };

inline constexpr int kClockKinds = 8;

const char* to_string(ClockKind k);

struct ClockKey {
    ClockKind kind = ClockKind::T1;
    Topology topology = Topology::Tree;
    std::uint64_t id = 0;

    friend bool operator==(const ClockKey&, const ClockKey&) = default;
};

struct ClockKeyHash {
    std::size_t operator()(const ClockKey& k) const noexcept
    {
        return static_cast<std::size_t>(
            hash_combine(k.id, static_cast<std::uint64_t>(k.kind) * 2 +
                                   static_cast<std::uint64_t>(k.topology)));
    }
};

/// Tree edge (parent(child), child). Valid for T1, Tu, Td.
ClockKey edge_key(ClockKind kind, const TreeSite& child);
/// Lattice edge {a, b}; endpoint order is canonicalized. Valid for T1, T2, T3.
ClockKey edge_key(ClockKind kind, const LatticeSite& a, const LatticeSite& b);
ClockKey conv_key(const TreeSite& s);
ClockKey conv_key(const LatticeSite& s);

/// Lattice edge id from the lower endpoint's key and the axis of the step.
inline std::uint64_t lattice_edge_id(std::uint64_t lower_site_key, int axis) noexcept
{
    return hash_combine(lower_site_key, static_cast<std::uint64_t>(axis) + 0x51ed27u);
}

/// Hand-set clock values for constructed scenarios. Values are final clock
/// values (already at the kind's rate). A per-kind default, when present,
/// applies to every key of that kind not listed explicitly.
struct ClockOverrides {
    std::unordered_map<ClockKey, double, ClockKeyHash> values;
    std::optional<double> defaults[kClockKinds];

    void set(const ClockKey& key, double value) { values[key] = value; }
    void set_default(ClockKind kind, double value)
    {
        defaults[static_cast<int>(kind)] = value;
    }
    std::optional<double> find(ClockKind kind, Topology topo, std::uint64_t id) const;
};

/// Lazily evaluated i.i.d. clock field. Every value is a pure function of
/// (master_seed, trial_index, kind, id): no state, no evaluation-order
/// dependence, safe to share across threads.
class RandomField {
  public:
    RandomField(const ModelParams& params, std::uint64_t master_seed,
                std::uint64_t trial_index);

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t trial_index() const noexcept { return trial_index_; }
    Topology topology() const noexcept { return topology_; }
    double lambda() const noexcept { return lambda_; }
    double rho() const noexcept { return rho_; }
    const std::optional<Truncation>& truncation() const noexcept { return truncation_; }

    /// Validated sample. Throws ConfigError when the key's kind or topology
    /// does not fit this field.
    double sample(const ClockKey& key) const;

    double rate(ClockKind kind) const noexcept;

    /// Uniform draw in (0, 1) for (kind, id). Ignores overrides.
    double uniform(ClockKind kind, std::uint64_t id) const noexcept
    {
        std::uint64_t h = mix64(id + salt(kind));
        h = mix64(h ^ stream_);
        h = mix64(h + 0x2545f4914f6cdd1dull);
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Rate-1 exponential underlying (kind, id); clock value = unit / rate.
    /// With an override present, returns override * rate.
    double unit(ClockKind kind, std::uint64_t id) const
    {
        if (overrides_) {
            if (auto v = overrides_->find(kind, topology_, id)) return *v * rate(kind);
        }
        return -std::log(uniform(kind, id));
    }

    /// Unvalidated hot-path accessors used by the engines.
    double value(ClockKind kind, std::uint64_t id) const
    {
        if (overrides_) {
            if (auto v = overrides_->find(kind, topology_, id)) {
                return kind == ClockKind::T1 ? truncate(*v, id) : *v;
            }
        }
        double r = rate(kind);
        if (r <= 0.0) return std::numeric_limits<double>::infinity();
        double v = -std::log(uniform(kind, id)) / r;
        return kind == ClockKind::T1 ? truncate(v, id) : v;
    }

    /// True when the edge is semi-marked under the truncation mode.
    bool semi_marked(std::uint64_t edge_id) const noexcept
    {
        return truncation_ && uniform(ClockKind::SemiMark, edge_id) < truncation_->semi_mark_prob;
    }

    void set_overrides(std::shared_ptr<const ClockOverrides> o) { overrides_ = std::move(o); }
    bool has_overrides() const noexcept { return static_cast<bool>(overrides_); }

    /// Same field with rescaled lambda and rho (unit draws unchanged).
    RandomField with_rates(double lambda, double rho) const;

  private:
    static constexpr std::uint64_t salt(ClockKind k) noexcept
    {
        return 0x8cb92ba72f3d8dd7ull * (static_cast<std::uint64_t>(k) + 1);
    }
    double truncate(double v, std::uint64_t id) const noexcept
    {
        if (truncation_ && v > truncation_->cutoff && semi_marked(id))
            return std::numeric_limits<double>::infinity();
        return v;
    }

    std::uint64_t master_seed_;
    std::uint64_t trial_index_;
    std::uint64_t stream_;
    Topology topology_;
    double lambda_;
    double rho_;
    std::optional<Truncation> truncation_;
    std::shared_ptr<const ClockOverrides> overrides_;
};

/// Convenience: sample_clock(field, key) == field.sample(key).
inline double sample_clock(const RandomField& field, const ClockKey& key)
{
    return field.sample(key);
}

/// Sum of per-edge clocks along a tree path. kind T1 reads t1; kind Tu or Td
/// selects the type-2 family with the direction inferred per edge (Td for a
/// step to a child, Tu for a step to the parent). Throws PathError when two
/// consecutive sites are not adjacent.
double path_time(const RandomField& field, std::span<const TreeSite> path, ClockKind kind);
/// Lattice version; kind in {T1, T2, T3}.
double path_time(const RandomField& field, std::span<const LatticeSite> path, ClockKind kind);

}  // namespace fppc
