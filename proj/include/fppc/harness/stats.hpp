#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fppc {

/// Score interval for a binomial proportion.
struct WilsonInterval {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double confidence = 0.95;
    double point = 0.0;
    double lower = 0.0;
    double upper = 1.0;

    /// True when the two intervals do not overlap.
    bool separated_from(const WilsonInterval& o) const
    {
        return upper < o.lower || o.upper < lower;
    }
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                               double confidence = 0.95);

/// Standard normal quantile.
double normal_quantile(double p);

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double se() const;
};

Summary summarize(std::span<const double> xs);

/// sup |F_n - F| for a continuous reference CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Asymptotic one-sample critical value sqrt(-ln(alpha/2)/2)/sqrt(n).
double ks_critical_value(std::size_t n, double alpha);
/// Asymptotic Kolmogorov survival P(sqrt(n) D_n > x).
double kolmogorov_survival(double x);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = a + b x (optionally weighted by w).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> w = {});

/// Two-sided z test for equality of two proportions; returns the p-value.
double two_proportion_pvalue(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2,
                             std::uint64_t n2);

/// P(Erlang(k, 1) >= x) = P(Poisson(x) < k).
double erlang_survival(int k, double x);

/// log of P(Binomial(n, p) >= 2), stable for tiny p and large n.
double log_prob_at_least_two(double n, double log_p);

}  // namespace fppc
