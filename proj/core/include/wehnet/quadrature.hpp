#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace wehnet {

/// Accuracy contract for the adaptive integrators.
struct QuadratureSpec {
    double relative_tolerance = 1e-9;
    double absolute_tolerance = 1e-12;
    int max_subdivisions = 2000;

    void validate() const;
};

/// Thrown when the adaptive refinement runs out of subdivisions before the
/// requested tolerance is met. Carries the best estimate so far and the
/// achieved error bound.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double best, double err)
        : std::runtime_error(what), best_estimate(best), error_bound(err) {}

    double best_estimate;
    double error_bound;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod 15(7) integration of f over the finite interval
/// [a, b]. Intervals are bisected worst-first until the summed error
/// estimate meets the spec.
double integrate(const Integrand& f, double a, double b,
                 const QuadratureSpec& spec = {});

/// Integral of f over [lower, inf). The tail is mapped onto a finite
/// interval with r = lower + u/(1-u); the accuracy contract is the same as
/// for integrate().
double integrate_semi_infinite(const Integrand& f, double lower,
                               const QuadratureSpec& spec = {});

}  // namespace wehnet
