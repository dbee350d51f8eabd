#pragma once

#include <functional>

namespace twobit {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
double std_normal_pdf(double x);

/// Standard normal distribution function, evaluated through erfc so that
/// both tails keep full relative precision.
double std_normal_cdf(double x);

/// Upper tail 1 - Phi(x) without cancellation.
double std_normal_sf(double x);

struct QuadratureSpec {
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 4000;
    double relative_tolerance = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) quadrature with global interval bisection.
///
/// The interval with the largest local error estimate is split until the
/// summed estimate falls below max(absolute_tolerance, relative_tolerance * |I|).
/// Throws AccuracyError when max_subdivisions is exhausted first.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

/// Semi-infinite integrals are cut at this point; the Gaussian mass beyond is < 1e-23.
inline constexpr double kGaussianTruncation = 10.0;

} // namespace twobit
