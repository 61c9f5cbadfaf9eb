#include "fppc/harness/chernoff.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fppc/model/errors.hpp"
#include "fppc/model/hash.hpp"

namespace fppc {

ChernoffBounds poisson_chernoff_bounds(double mu, double epsilon, double C)
{
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (!(C > 0.0)) throw ConfigError("C must be positive");
    ChernoffBounds b;
    b.mu = mu;
    b.epsilon = epsilon;
    b.C = C;
    b.lower_tail = std::exp(-mu * epsilon * epsilon / 2.0);
    b.upper_tail = std::exp(-mu * epsilon * epsilon / 4.0);

    // Markov on e^{theta P} bounds the upper tail only for theta >= 0. The
    // exponent is concave in theta with its peak at log C; a grid keeps the
    // evaluation honest and the analytic optimum is added to it.
    auto exponent = [&](double th) { return mu * (1.0 - std::exp(th) + th * C); };
    double best_theta = 0.0, best = exponent(0.0);
    double top = std::max(1.0, 2.0 * std::log(std::max(C, 1.0)) + 1.0);
    const int grid = 4000;
    for (int i = 1; i <= grid; ++i) {
        double th = top * i / grid;
        if (double e = exponent(th); e > best) {
            best = e;
            best_theta = th;
        }
    }
    double opt = std::max(0.0, std::log(C));
    if (exponent(opt) > best) {
        best = exponent(opt);
        best_theta = opt;
    }
    b.theta = best_theta;
    b.above_C = std::exp(-best);
    return b;
}

PoissonTails empirical_poisson_tails(double mu, double epsilon, double C, std::uint64_t samples,
                                     std::uint64_t seed)
{
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (samples == 0) throw ConfigError("samples must be positive");
    std::mt19937_64 rng(mix64(seed));
    std::poisson_distribution<std::int64_t> pois(mu);
    std::uint64_t lo = 0, hi = 0, above = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double x = static_cast<double>(pois(rng));
        lo += x < (1.0 - epsilon) * mu;
        hi += x > (1.0 + epsilon) * mu;
        above += x > C * mu;
    }
    PoissonTails t;
    t.samples = samples;
    double n = static_cast<double>(samples);
    t.lower_tail = lo / n;
    t.upper_tail = hi / n;
    t.above_C = above / n;
    return t;
}

}  // namespace fppc
