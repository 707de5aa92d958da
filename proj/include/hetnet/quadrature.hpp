#ifndef HETNET_QUADRATURE_HPP
#define HETNET_QUADRATURE_HPP

#include <functional>

namespace hetnet {

struct QuadratureResult
{
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on a finite [a, b].
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|) or `max_intervals`
/// is reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol = 1e-13, double abs_tol = 0.0,
                                    int max_intervals = 2000);

} // namespace hetnet

#endif // HETNET_QUADRATURE_HPP
