#pragma once

#include <cstdint>

namespace fppc {

/// Tail bounds for P ~ Poisson(mu).
struct ChernoffBounds {
    double mu = 0.0;
    double epsilon = 0.0;
    double C = 0.0;
    double lower_tail = 1.0;  // P(P < (1-eps) mu) < exp(-mu eps^2 / 2)
    double upper_tail = 1.0;  // P(P > (1+eps) mu) < exp(-mu eps^2 / 4)
    double above_C = 1.0;     // P(P > C mu) <= min_theta exp(-mu (1 - e^theta + theta C))
    double theta = 0.0;       // minimizing theta, searched over theta >= 0
};

/// Requires mu > 0, eps in (0, 1), C > 0.
ChernoffBounds poisson_chernoff_bounds(double mu, double epsilon, double C);

struct PoissonTails {
    std::uint64_t samples = 0;
    double lower_tail = 0.0;
    double upper_tail = 0.0;
    double above_C = 0.0;
};

/// Empirical frequencies of the three events from `samples` Poisson draws.
PoissonTails empirical_poisson_tails(double mu, double epsilon, double C, std::uint64_t samples,
                                     std::uint64_t seed);

}  // namespace fppc
