#pragma once

#include <functional>
#include <vector>

namespace recurlab
{
struct QuadratureOptions
{
    double abs_tol = 1e-10;
    double rel_tol = 0;
    int max_subdivisions = 4000;
};

struct QuadratureResult
{
    double value = 0;
    double error = 0;
    int subdivisions = 0;
    bool converged = true;
};

//! A panel [lo, hi]; singular panels allow integrable 1/sqrt blow-up at either end.
struct Panel
{
    double lo;
    double hi;
    bool singular = false;
};

/*!
 * Globally adaptive 7/15-point Gauss-Kronrod integration over fixed panels.
 *
 * Singular panels are integrated in t with x = lo + (hi - lo)(3t^2 - 2t^3),
 * which cancels inverse square root endpoint behaviour.
 */
QuadratureResult integrate(std::function<double(double)> const& f,
                           std::vector<Panel> const& panels,
                           QuadratureOptions const& options = {});

//! Panels between consecutive sorted, de-duplicated breakpoints.
std::vector<Panel> make_panels(std::vector<double> breakpoints);

struct LogQuadratureResult
{
    double log_value = 0;  //!< -inf for a zero integral
    double rel_error = 0;
    bool converged = true;
};

//! Integral of exp(log_f) without underflow; the integrand is rescaled by its sampled maximum.
LogQuadratureResult integrate_log(std::function<double(double)> const& log_f,
                                  std::vector<Panel> const& panels,
                                  QuadratureOptions const& options = {});

}  // namespace recurlab
