#ifndef GARCHMOM_QUADRATURE_HPP
#define GARCHMOM_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <limits>

#include "garchmom/common.hpp"

namespace garchmom {

/// Adaptive double-exponential quadrature over a half line.
///
/// The substitution x = exp((pi/2) sinh t) maps (0, inf) to the real t axis
/// and makes the trapezoid rule converge exponentially for integrands with
/// polynomial or exponential decay. The step is halved until two successive
/// levels agree to `rel_tol`.
namespace quadrature {

namespace detail {

inline double de_level(const std::function<double(double)>& f, double h, double tmax) {
    // trapezoid over t in [-tmax, tmax] with node x = exp(pi/2 sinh t)
    KahanSum acc;
    const double half_pi = 1.5707963267948966;
    for (double t = -tmax; t <= tmax + 1e-12; t += h) {
        const double sh = half_pi * std::sinh(t);
        if (sh < -700.0 || sh > 700.0) continue;
        const double x = std::exp(sh);
        const double w = half_pi * std::cosh(t) * x;
        const double v = f(x) * w;
        if (std::isfinite(v)) acc.add(v);
    }
    return acc.value() * h;
}

}  // namespace detail

/// Integrates f over [0, inf). Throws QuadratureFailure if the refinement
/// does not reach the requested relative tolerance.
inline double integrate_upper_half_line(const std::function<double(double)>& f,
                                        double rel_tol = 1e-10) {
    const double tmax = 4.3;
    double h = 0.5;
    double prev = detail::de_level(f, h, tmax);
    for (int level = 0; level < 8; ++level) {
        h *= 0.5;
        const double cur = detail::de_level(f, h, tmax);
        const double scale =
            std::max({std::fabs(cur), std::fabs(prev), 1e-300});
        if (std::fabs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw QuadratureFailure("half-line quadrature did not converge");
}

/// Integrates f over (-inf, 0] by reflection.
inline double integrate_lower_half_line(const std::function<double(double)>& f,
                                        double rel_tol = 1e-10) {
    return integrate_upper_half_line([&f](double x) { return f(-x); }, rel_tol);
}

/// Integrates f over the whole real line.
inline double integrate_real_line(const std::function<double(double)>& f,
                                  double rel_tol = 1e-10) {
    return integrate_upper_half_line(f, rel_tol) +
           integrate_lower_half_line(f, rel_tol);
}

}  // namespace quadrature

}  // namespace garchmom

#endif  // GARCHMOM_QUADRATURE_HPP
