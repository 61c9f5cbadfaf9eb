#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fppc/harness/parallel.hpp"
#include "fppc/harness/stats.hpp"
#include "fppc/model/clock.hpp"
#include "fppc/model/site.hpp"

namespace fppc {

// ---------------------------------------------------------------------------
// Branching-random-walk minima
// ---------------------------------------------------------------------------

inline constexpr int kBrwExactMaxDepth = 35;

/// Minimal type-1 passage time from `from` down to its descendants `depth`
/// levels below, with the lexicographically first minimizing leaf. No depth
/// guard; callers apply their own.
struct MinPath {
    double time = 0.0;
    TreeSite leaf;
    std::uint64_t nodes_visited = 0;
};
MinPath min_passage_below(const TreeSite& from, int d, int depth, const RandomField& field);

/// M_n from the root by pruned depth-first search, exact. Requires n <= 35.
double brw_min_exact(int d, int n, const RandomField& field);

/// Generation-synchronous beam keeping the `width` fastest particles. Never
/// below the exact minimum; equal to it when width covers the whole level.
double brw_min_cloud(int d, int n, std::size_t width, const RandomField& field);

/// Positive root of g - 1 - log g = log(d - 1): the first-order speed of M_n / n.
double brw_speed(int d);

enum class BrwMethod { ExactPrunedDFS, TruncatedCloud };

struct BrwStats {
    int d = 3;
    int n = 0;
    int trials = 0;
    double mean_Mn = 0.0;
    double sd_Mn = 0.0;
    double ratio = 0.0;
    BrwMethod method = BrwMethod::ExactPrunedDFS;
    std::size_t width = 0;
    std::vector<double> samples;

    double se() const;
};

BrwStats estimate_brw(int d, int n, int trials, BrwMethod method, std::size_t width,
                      const TrialPlan& plan);

// ---------------------------------------------------------------------------
// Sub-boxes and highways
// ---------------------------------------------------------------------------

inline constexpr int kSubBoxMaxDepth = 24;

struct SubBoxVerdict {
    bool good = false;
    std::vector<TreeSite> witnesses;   // leaves fast for type 1 and slow for type 2
    std::uint64_t h1_count = 0;        // leaves fast for type 1, capped
    std::uint64_t nodes_visited = 0;
};

/// Depth-k sub-box below z. A leaf y is a witness when T1(z->y) <= (1-eps)k and
/// the downward type-2 time, measured in rate-1 units, is >= (1-eps^2)k. The
/// type-2 test is lambda-free (Erlang(k, lambda) scales as 1/lambda), so
/// `lambda` does not change the verdict. Stops once `max_witnesses` witnesses
/// and `h1_cap` fast leaves are found.
SubBoxVerdict subbox_is_good(const TreeSite& z, int d, int k, double eps, double lambda,
                             const RandomField& field, std::size_t max_witnesses = 2,
                             std::uint64_t h1_cap = 0);

struct SubBoxResult {
    int k = 0;
    double epsilon = 0.0;
    double lambda = 1.0;
    int d = 3;
    int trials = 0;
    WilsonInterval p_good;
    double mean_h1_count_capped = 0.0;
    std::uint64_t h1_cap = 0;
};

SubBoxResult estimate_subbox_good_prob(int k, double eps, double lambda, int d, int trials,
                                       const TrialPlan& plan, std::uint64_t h1_cap = 64);

/// Breadth-first highway exploration through r levels of depth-k sub-boxes,
/// keeping at most `offspring_cap` witnesses per good sub-box. Returns the
/// population at depth k*r, a lower bound on the number of highway endpoints.
std::uint64_t highway_branching(int k, double eps, double lambda, int d, int r,
                                int offspring_cap, const RandomField& field,
                                std::vector<TreeSite>* endpoints = nullptr);

struct HighwayStats {
    int k = 0, r = 0, d = 3, offspring_cap = 0, trials = 0;
    double epsilon = 0.0, lambda = 1.0;
    double mean_count = 0.0;
    double sd_count = 0.0;
    std::vector<std::uint64_t> counts;
};

HighwayStats estimate_highway(int k, double eps, double lambda, int d, int r, int offspring_cap,
                              int trials, const TrialPlan& plan);

// ---------------------------------------------------------------------------
// Spines
// ---------------------------------------------------------------------------

inline constexpr int kSpineMaxK = 6;

/// Number of edges that must carry type-2 clocks >= k^3 for a depth-k^2 spine:
/// edges from a non-terminal spine site to a site off the spine, plus the
/// edges along the spine. Equals (d-1)k^2 + 1.
std::int64_t spine_edge_count(int k, int d);

/// log of exp(-lambda k^3 E): each required edge is an independent Exp(lambda)
/// exceeding k^3.
double spine_type2_log_probability(int k, double lambda, int d);

struct SpineEstimate {
    int k = 0;
    double epsilon = 0.0;
    double lambda = 1.0;
    int d = 3;
    int trials = 0;
    WilsonInterval p_type1_part;
    double mean_spine_time = 0.0;
    std::int64_t edge_count = 0;
    double log_p_type2_part = 0.0;
    double p_type2_part = 0.0;
    double log_p_spine = 0.0;
    double p_spine = 0.0;
};

/// Spine from a generic non-root vertex: the minimal type-1 path to depth k^2.
/// Requires k <= 6 for the Monte Carlo part.
SpineEstimate spine_probability(int k, double eps, double lambda, int d, int trials,
                                const TrialPlan& plan);

/// Smallest c with p_spine(k) >= exp(-c k^5) over the supplied estimates.
double fit_spine_decay(const std::vector<SpineEstimate>& estimates);

// ---------------------------------------------------------------------------
// Backtracks
// ---------------------------------------------------------------------------

inline constexpr int kDStarMaxK = 4;

/// Minimal upward type-2 time to x from the sites `depth` levels below it,
/// over the subtree of x with the branch through child `excluded_child`
/// removed (negative keeps every branch). Single bottom-up pass.
double dstar_min_upward(const TreeSite& x, int d, int depth, const RandomField& field,
                        int excluded_child = 0);

struct DStarEstimate {
    int k = 0;
    double lambda = 1.0;
    int d = 3;
    int trials = 0;
    WilsonInterval p;
    std::vector<std::uint8_t> outcomes;  // per trial, for paired comparisons
};

/// Probability that every upward type-2 passage from depth k^2 below x back
/// to x takes at least 10k. Requires k <= 4.
DStarEstimate dstar_probability(int k, double lambda, int d, int trials, const TrialPlan& plan);

// ---------------------------------------------------------------------------
// Good boxes
// ---------------------------------------------------------------------------

/// |V_n| for the d-ary tree box of depth n around the root.
double tree_box_size(int d, int n);

struct GoodBoxReport {
    int k = 0, r = 0, d = 3, trials = 0, offspring_cap = 0;
    double epsilon = 0.0, alpha = 1.5, lambda = 1.0, rho = 0.0;
    WilsonInterval p_g1;
    double mean_endpoints = 0.0;
    double log_p_g2_given_g1 = 0.0;
    WilsonInterval p_dstar;
    int highway_sites = 0;   // |pi_1 u pi_2| bound used in the composition
    double log_p_g3 = 0.0;
    double box_size = 0.0;
    double log_p_g4 = 0.0;
    double log_product = 0.0;
    double product = 0.0;
};

/// Factored estimate P(G1) P(G2|G1) P(G3) P(G4) for the box of depth kr+k^2
/// at the root. G1 is Monte Carlo, G2|G1 combines the spine estimate with the
/// observed endpoint counts, G3 composes the D* estimate over the 2kr+1 sites
/// of two highways, G4 is closed form.
GoodBoxReport good_box_probability(int k, int r, double eps, double alpha, double lambda,
                                   double rho, int d, int trials, const TrialPlan& plan,
                                   int offspring_cap = 4);

}  // namespace fppc
