#include "fppc/harness/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "fppc/model/errors.hpp"

namespace fppc {

double normal_quantile(double p)
{
    boost::math::normal_distribution<double> n;
    return boost::math::quantile(n, p);
}

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence)
{
    if (successes > trials) throw ConfigError("wilson_interval: successes exceed trials");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw ConfigError("wilson_interval: confidence must lie in (0, 1)");
    WilsonInterval w;
    w.successes = successes;
    w.trials = trials;
    w.confidence = confidence;
    if (trials == 0) {
        w.point = 0.0;
        w.lower = 0.0;
        w.upper = 1.0;
        return w;
    }
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z = normal_quantile(0.5 + confidence / 2.0);
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double centre = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    w.point = p;
    w.lower = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    w.upper = successes == trials ? 1.0 : std::min(1.0, centre + half);
    // Rounding can push a bound past the point estimate by an ulp.
    w.lower = std::min(w.lower, p);
    w.upper = std::max(w.upper, p);
    return w;
}

double Summary::se() const { return n > 0 ? sd / std::sqrt(static_cast<double>(n)) : 0.0; }

Summary summarize(std::span<const double> xs)
{
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    s.mean = mean;
    s.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return s;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double ks_critical_value(std::size_t n, double alpha)
{
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0) return 1.0;
    double s = 0.0;
    for (int k = 1; k < 200; ++k) {
        double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-300) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

double pearson_correlation(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("pearson: size mismatch");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::span<const double> w)
{
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear_fit: need >= 2 points");
    if (!w.empty() && w.size() != x.size()) throw ConfigError("linear_fit: weight size mismatch");
    auto wt = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
    double sw = 0, mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += wt(i);
        mx += wt(i) * x[i];
        my += wt(i) * y[i];
    }
    mx /= sw;
    my /= sw;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += wt(i) * (x[i] - mx) * (x[i] - mx);
        sxy += wt(i) * (x[i] - mx) * (y[i] - my);
        syy += wt(i) * (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    if (sxx == 0) throw ConfigError("linear_fit: degenerate x");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.intercept - f.slope * x[i];
        rss += wt(i) * r * r;
    }
    f.r2 = syy > 0 ? 1.0 - rss / syy : 1.0;
    if (x.size() > 2) f.slope_se = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
    return f;
}

double two_proportion_pvalue(std::uint64_t s1, std::uint64_t n1, std::uint64_t s2,
                             std::uint64_t n2)
{
    if (n1 == 0 || n2 == 0) throw ConfigError("two_proportion_pvalue: empty sample");
    double p1 = static_cast<double>(s1) / n1;
    double p2 = static_cast<double>(s2) / n2;
    double p = static_cast<double>(s1 + s2) / (n1 + n2);
    double se = std::sqrt(p * (1 - p) * (1.0 / n1 + 1.0 / n2));
    if (se == 0) return p1 == p2 ? 1.0 : 0.0;
    double z = std::abs(p1 - p2) / se;
    return 2.0 * (1.0 - boost::math::cdf(boost::math::normal_distribution<double>(), z));
}

double erlang_survival(int k, double x)
{
    if (k <= 0) return 1.0;
    if (x <= 0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(k), x);
}

double log_prob_at_least_two(double n, double log_p)
{
    if (n < 2) return -std::numeric_limits<double>::infinity();
    double p = std::exp(log_p);
    if (p >= 1.0) return 0.0;
    double log_q = std::log1p(-p);
    // Sum the binomial tail from j = 2 in log space until terms vanish.
    double lg_n1 = std::lgamma(n + 1.0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    for (double j = 2; j <= n; j += 1.0) {
        double t = lg_n1 - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * log_p +
                   (n - j) * log_q;
        terms.push_back(t);
        best = std::max(best, t);
        if (t < best - 50.0 && j > n * p + 10.0) break;
        if (terms.size() > 100000) break;
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - best);
    return std::min(0.0, best + std::log(s));
}

}  // namespace fppc
