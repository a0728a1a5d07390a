#pragma once

#include <functional>
#include <vector>

namespace mtjrng {

namespace detail {
// Lower regularized incomplete gamma by power series; valid for x < a + 1.
double gamma_p_series(double a, double x);
// Upper regularized incomplete gamma by Lentz continued fraction; valid for x >= a + 1.
double gamma_q_contfrac(double a, double x);
} // namespace detail

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
// Series for x < a + 1, continued fraction otherwise. Absolute error < 1e-12.
double reg_lower_inc_gamma(double a, double x);

// Gamma distribution in shape/rate parameterization.
struct GammaSpec {
    double shape = 1.0;
    double rate = 1.0;

    double pdf(double x) const;
    double cdf(double x) const; // P(shape, rate * x)
};

// A base distribution restricted to [a, b] and renormalized.
class TruncatedDistribution {
  public:
    TruncatedDistribution(GammaSpec base, double a, double b);

    double a() const { return a_; }
    double b() const { return b_; }
    double norm() const { return norm_; }
    const GammaSpec& base() const { return base_; }

    // Renormalized CDF on [a, b]; throws OutOfSupport outside.
    double trunc_cdf(double x) const;
    // Renormalized density on [a, b]; throws OutOfSupport outside.
    double trunc_pdf(double x) const;

    // Probability mass of each of 2^k equal-width bins over [a, b].
    std::vector<double> bin_probs(int k) const;

    // CDF as a plain callable for the tree sampler.
    std::function<double(double)> cdf_fn() const;

  private:
    GammaSpec base_;
    double a_, b_;
    double cdf_a_, norm_;
};

} // namespace mtjrng
