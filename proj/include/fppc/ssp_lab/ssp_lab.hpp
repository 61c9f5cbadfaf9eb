#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "fppc/engine/topology.hpp"
#include "fppc/harness/parallel.hpp"
#include "fppc/harness/stats.hpp"
#include "fppc/model/clock.hpp"

namespace fppc {

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

struct BernoulliSeeds {
    double p = 0.0;
};

/// Seeds read from the conversion model's clocks (type-2 seeds).
struct CoupledSeeds {
    double C = 1.0;
    double lambda = 0.0;
    double rho = 0.0;
};

using SeedSource = std::variant<BernoulliSeeds, CoupledSeeds>;

/// Seed indicators on the box [-R, R]^d, indexed like LatticeTopology(d, R),
/// with seed clusters (nearest-neighbour connected components) precomputed.
struct SeedField {
    int d = 2;
    int radius = 0;
    SeedSource source;
    std::vector<std::uint8_t> seed;
    /// Cluster id per seed site (kNoNode for non-seeds) and members per cluster.
    std::vector<Node> cluster;
    std::vector<std::vector<Node>> members;

    std::size_t size() const { return seed.size(); }
    std::uint64_t count() const;
    double density() const;
};

/// P(site is a type-2 seed) = 1 - (1-e^{-C})^{2d} e^{-4d lambda C^2} e^{-rho C^2}.
double type2_seed_marginal(double C, double lambda, double rho, int d);

/// x is a seed iff some incident edge has t1 >= C, t2 < C^2 or t3 < C^2, or
/// its conversion clock is < C^2. Reads the field's T1, T2, T3 and Conv clocks
/// at the given rates (the field's own lambda and rho are ignored).
SeedField label_type2_seeds(double C, double lambda, double rho, int d, int R,
                            const RandomField& field);

/// Independent seeds with probability p from SeedMark uniforms.
SeedField bernoulli_seeds(double p, int d, int R, const RandomField& field);

/// Seeds on the all-even sublattice (pairwise independent sites).
struct SublatticeCount {
    std::uint64_t sites = 0;
    std::uint64_t hits = 0;
    double fraction() const { return sites ? static_cast<double>(hits) / sites : 0.0; }
};
SublatticeCount even_sublattice_count(int d, int R, const std::vector<std::uint8_t>& indicator);

/// Correlation of indicators at (x, x + 2 e_1) over the box.
double lag2_correlation(int d, int R, const std::vector<std::uint8_t>& indicator);

// ---------------------------------------------------------------------------
// Red/blue dynamics
// ---------------------------------------------------------------------------

struct ExpCappedRed {
    double cap = 1.0;
};
struct UnitRed {};
using RedClock = std::variant<ExpCappedRed, UnitRed>;

struct SspParams {
    int d = 2;
    double kappa = 4001.0;
    SeedSource seeds = BernoulliSeeds{1e-3};
    RedClock red = ExpCappedRed{1.0};

    /// Coupled seeds force red clocks min(t1, C); Bernoulli seeds use `red`.
    void validate() const;
};

enum class Color : std::uint8_t { Uncolored, Red, Blue };
enum class SspVerdict : std::uint8_t { RedReachedBoundary, RedDied, OriginSeed };

const char* to_string(SspVerdict v);

struct SspState {
    int d = 2;
    int radius = 0;
    std::vector<Color> color;
    std::vector<double> T;  // first colouring time, +inf when uncoloured
    SspVerdict verdict = SspVerdict::RedDied;
    double stop_time = 0.0;
    std::uint64_t red_sites = 0;
    std::uint64_t blue_sites = 0;
    bool blue_on_boundary = false;

    /// Red touched the boundary while every blue site is strictly inside.
    bool red_survived() const
    {
        return verdict == SspVerdict::RedReachedBoundary && !blue_on_boundary;
    }
};

/// Red starts at the origin at time 0. Edge (u, v) rings at T(u) + X(u, v)
/// with X = red clock for a red u and kappa for a blue u; an already coloured
/// v ignores it. A ring from red colours v red unless v is a seed; any ring
/// reaching a seed colours its whole cluster blue at once. Stops when red
/// first touches the boundary or has no pending rings left.
SspState run_ssp(const SspParams& params, const SeedField& seeds, const RandomField& field);

/// Labels seeds from `field` per params and runs.
SspState run_ssp(const SspParams& params, int R, const RandomField& field);

struct RedSurvivalPoint {
    double p = 0.0;
    int trials = 0;
    std::uint64_t origin_seed = 0;
    std::uint64_t red_survived = 0;
    std::uint64_t red_died = 0;
    WilsonInterval p_red;  // over trials whose origin is not a seed
};

struct RedSurvivalCurve {
    double kappa = 0.0;
    int d = 2, radius = 0;
    std::vector<RedSurvivalPoint> points;
    /// Least-squares fit of 1 - fraction = c p through the origin.
    double c_hat = 0.0;
    double c_hat_se = 0.0;
};

RedSurvivalCurve estimate_red_survival(const SspParams& base, int R, int trials,
                                       const std::vector<double>& p_grid, const TrialPlan& plan);

// ---------------------------------------------------------------------------
// Coupling with the conversion model
// ---------------------------------------------------------------------------

struct CouplingReport {
    double C = 0.0, lambda = 0.0, rho = 0.0;
    int d = 2, radius = 0, trials = 0;
    double seed_density = 0.0;
    /// Clock-level check of t1(x,y) < min_z {t2(x,z), t3(x,z), I_x} at sampled non-seeds.
    std::uint64_t sites_checked = 0;
    std::uint64_t inequality_violations = 0;
    /// Run-level check: a non-seed type-1 site stays type 1 until all its type-1
    /// attempts have fired.
    std::uint64_t type1_sites_checked = 0;
    std::uint64_t interference_violations = 0;
    int zero_seed_trials = 0;
    int zero_seed_reached = 0;
};

/// Resample-mode trials to radius R sharing one field with the seed labels.
/// Requires C >= 1 so that the seed complement implies the inequality.
CouplingReport coupling_consistency(double C, double lambda, double rho, int d, int R, int trials,
                                    const TrialPlan& plan, std::uint64_t sampled_sites = 10000);

}  // namespace fppc
