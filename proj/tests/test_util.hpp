#pragma once

#include <cmath>
#include <functional>

// Shared oracle helpers for the test suite. Kept independent of the library
// internals so they can disagree with the implementation.
namespace testutil {

inline double simpson(const std::function<double(double)>& f, double a, double b) {
    const double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(f, a, m);
    const double right = simpson(f, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson_rec(f, a, m, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, right, tol / 2.0, depth - 1);
}

// Adaptive Simpson quadrature; independent of the library's special functions.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-13) {
    return adaptive_simpson_rec(f, a, b, simpson(f, a, b), tol, 40);
}

// Normalized gamma density exp((a-1)ln t - t - lgamma(a)); bounded values
// keep the absolute-tolerance quadrature honest even for large a.
inline double gamma_density(double a, double t) {
    if (t <= 0.0) return 0.0;
    return std::exp((a - 1.0) * std::log(t) - t - std::lgamma(a));
}

// Reference regularized lower incomplete gamma via quadrature of the density.
inline double oracle_reg_lower_gamma(double a, double x) {
    if (x <= 0.0) return 0.0;
    auto f = [a](double t) { return gamma_density(a, t); };
    // Split at the mode to keep the quadrature honest for peaked integrands.
    const double mode = (a > 1.0) ? a - 1.0 : 0.5;
    if (x <= mode) return integrate(f, 0.0, x);
    return integrate(f, 0.0, mode) + integrate(f, mode, x);
}

} // namespace testutil
