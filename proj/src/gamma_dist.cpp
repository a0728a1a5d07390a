#include "mtjrng/gamma_dist.hpp"

#include <cmath>
#include <limits>

#include "mtjrng/errors.hpp"

namespace mtjrng {

namespace {
constexpr int max_iter = 500;
constexpr double rel_eps = 1e-16;
} // namespace

namespace detail {

double gamma_p_series(double a, double x) {
    if (x <= 0.0) return 0.0;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n <= max_iter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * rel_eps) {
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NonConvergence("incomplete gamma series did not converge");
}

double gamma_q_contfrac(double a, double x) {
    // Modified Lentz on the standard continued fraction for Q(a, x).
    const double tiny = std::numeric_limits<double>::min() / rel_eps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < rel_eps) {
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
    }
    throw NonConvergence("incomplete gamma continued fraction did not converge");
}

} // namespace detail

double reg_lower_inc_gamma(double a, double x) {
    if (!(a > 0.0)) throw OutOfRange("incomplete gamma requires a > 0");
    if (!(x >= 0.0)) throw OutOfRange("incomplete gamma requires x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

double GammaSpec::pdf(double x) const {
    if (x <= 0.0) return 0.0;
    return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                    std::lgamma(shape));
}

double GammaSpec::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    return reg_lower_inc_gamma(shape, rate * x);
}

TruncatedDistribution::TruncatedDistribution(GammaSpec base, double a, double b)
    : base_(base), a_(a), b_(b) {
    if (!(base.shape > 0.0) || !(base.rate > 0.0))
        throw OutOfRange("gamma shape and rate must be positive");
    if (!(a < b)) throw OutOfRange("truncation interval requires a < b");
    cdf_a_ = base_.cdf(a_);
    norm_ = base_.cdf(b_) - cdf_a_;
    if (!(norm_ > 1e-300)) throw ZeroMassInterval("truncation interval captures no mass");
}

double TruncatedDistribution::trunc_cdf(double x) const {
    if (x < a_ || x > b_) throw OutOfSupport("point outside truncation interval");
    if (x == a_) return 0.0;
    if (x == b_) return 1.0;
    return (base_.cdf(x) - cdf_a_) / norm_;
}

double TruncatedDistribution::trunc_pdf(double x) const {
    if (x < a_ || x > b_) throw OutOfSupport("point outside truncation interval");
    return base_.pdf(x) / norm_;
}

std::vector<double> TruncatedDistribution::bin_probs(int k) const {
    if (k < 1 || k > 30) throw OutOfRange("bin_probs requires 1 <= k <= 30");
    const std::size_t n = std::size_t{1} << k;
    const double width = (b_ - a_) / static_cast<double>(n);
    std::vector<double> probs(n);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double next = (i + 1 == n) ? 1.0 : trunc_cdf(a_ + width * static_cast<double>(i + 1));
        probs[i] = next - prev;
        prev = next;
    }
    return probs;
}

std::function<double(double)> TruncatedDistribution::cdf_fn() const {
    return [d = *this](double x) { return d.trunc_cdf(x); };
}

} // namespace mtjrng
