#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fppc/engine/world.hpp"
#include "fppc/harness/parallel.hpp"
#include "fppc/harness/stats.hpp"
#include "fppc/model/clock.hpp"

namespace fppc {

// ---------------------------------------------------------------------------
// Extinction
// ---------------------------------------------------------------------------

struct SurvivalEstimate {
    ModelParams params;
    int radius = 0;
    int trials = 0;
    std::uint64_t survived = 0, extinct = 0, capped = 0, confined = 0;
    WilsonInterval p_survived, p_extinct, p_capped;
    double mean_stop_time = 0.0;
    double mean_conversions = 0.0;
    bool approximate = false;
};

/// Runs `trials` trials to radius R (lattice) or depth R (tree) and tallies
/// the verdicts.
SurvivalEstimate estimate_extinction(const ModelParams& params, int R, int trials,
                                     const TrialPlan& plan, Caps caps = {},
                                     EngineOptions opts = {});

// ---------------------------------------------------------------------------
// Limit shape (pure first passage percolation)
// ---------------------------------------------------------------------------

struct Direction {
    std::string name;
    std::vector<double> u;  // unit vector
};

/// d = 2: the axis, the diagonal and 16 angles strictly between them.
/// d >= 3: the axis, the face diagonal (1,1,0,..) and the full diagonal.
std::vector<Direction> shape_directions(int d);

struct ShapeEstimate {
    double t = 0.0;
    int d = 2;
    int trials = 0;
    double rate = 1.0;
    std::vector<Direction> directions;
    /// t / h(u), h the support function of B(t) in direction u; averaged over trials.
    std::vector<double> directional_times;
    std::vector<double> directional_se;
    /// Same at time 2t, from the same runs.
    std::vector<double> directional_times_2t;
    /// d = 2 only: mean of max{|x| : x in B(t), arg x within half a bin of theta} / t.
    std::vector<double> radial_angles;
    std::vector<double> radial;
    /// d = 2 only: Hausdorff distance between the outer boundaries of B(t)/t and
    /// B(2t)/(2t), averaged over trials.
    double hausdorff_drift = 0.0;
    /// d = 2 only: worst shortfall of a boundary-chord midpoint outside the
    /// mean radial function (in rescaled units; <= 0 when convex).
    double convexity_excess = 0.0;
    int final_box_radius = 0;
};

/// Pure FPP (rho = 0) with rate-`rate` clocks, run to time 2t. The box grows
/// until B(2t) stays off its boundary, which keeps the occupied set exact.
ShapeEstimate shape_estimate(double t, int d, int trials, const TrialPlan& plan,
                             double rate = 1.0, int angular_bins = 72);

/// Occupation times of pure FPP in the box of radius R (infinite when never
/// reached), run until `horizon`.
std::vector<double> fpp_times(const RandomField& field, int d, int R, double horizon);

// ---------------------------------------------------------------------------
// Truncated clocks
// ---------------------------------------------------------------------------

struct TruncatedClockStats {
    double cutoff = 0.0;
    double semi_mark_prob = 0.0;
    std::uint64_t samples = 0;
    WilsonInterval p_infinite;
    double expected_p_infinite = 0.0;
    /// max over the grid of F_n(x) - (1 - e^{-x}); <= band when f dominates Exp(1).
    double max_cdf_excess = 0.0;
    double dkw_band = 0.0;
    bool dominated = false;
    double ks_finite_part = 0.0;  // KS distance of f to Exp(1) when q = 0
};

TruncatedClockStats truncated_clock_stats(double K, double q, std::uint64_t samples,
                                          std::uint64_t seed, double alpha = 0.01);

// ---------------------------------------------------------------------------
// Closed sites and encapsulation
// ---------------------------------------------------------------------------

/// A site is closed when its conversion clock beats every incident type-1
/// clock, so type 1 can never leave it. Indexed like LatticeTopology(d, R).
struct ClosedSiteField {
    int d = 2;
    int radius = 0;
    double rho = 0.0;
    std::vector<std::uint8_t> closed;

    std::size_t size() const { return closed.size(); }
    double density() const;
};

double closed_site_marginal(double rho, int d);

ClosedSiteField closed_site_field(const RandomField& field, int d, int R);

struct ClosedDensity {
    ClosedSiteField field;
    double density = 0.0;
    /// Sites with all coordinates even: pairwise independent, so the iid
    /// standard error is exact there.
    std::uint64_t sublattice_sites = 0;
    double sublattice_density = 0.0;
    double sublattice_se = 0.0;
    double marginal = 0.0;
    double z_score = 0.0;
    /// Correlation of indicators at (x, x + 2 e_1).
    double lag2_correlation = 0.0;
};

ClosedDensity closed_site_density(double rho, int d, int R, const RandomField& field);

struct Encapsulation {
    bool encapsulated = false;
    bool origin_closed = false;
    std::uint64_t open_cluster_size = 0;
};

/// BFS from the origin through open sites; encapsulated when the search never
/// reaches the box boundary. A closed origin counts as encapsulated and is
/// flagged.
Encapsulation origin_encapsulated(const ClosedSiteField& f);

struct EncapsulationEstimate {
    double rho = 0.0;
    int d = 2, radius = 0, trials = 0;
    WilsonInterval p_encapsulated;
    std::uint64_t origin_closed = 0;
};

EncapsulationEstimate estimate_encapsulation(double rho, int d, int R, int trials,
                                             const TrialPlan& plan);

}  // namespace fppc
