#include "recurlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "recurlab/errors.hpp"

namespace recurlab
{
namespace
{
// Kronrod abscissae on [-1, 1]; odd indices are the Gauss nodes.
constexpr double xk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Segment
{
    double a;
    double b;
    std::size_t panel;
    double value;
    double error;

    bool operator<(Segment const& other) const { return error < other.error; }
};

class Integrator
{
  public:
    Integrator(std::function<double(double)> const& f, std::vector<Panel> const& panels)
        : f_(f), panels_(panels)
    {
    }

    // Integrand in the panel's own coordinate.
    double eval(std::size_t p, double s) const
    {
        Panel const& panel = panels_[p];
        double w = panel.hi - panel.lo;
        if (!panel.singular)
        {
            return f_(panel.lo + w * s);
        }
        double x = panel.lo + w * s * s * (3 - 2 * s);
        x = std::clamp(x, panel.lo, panel.hi);
        double jac = 6 * s * (1 - s);
        if (jac == 0)
        {
            return 0;
        }
        return f_(x) * jac;
    }

    Segment rule(std::size_t p, double a, double b) const
    {
        double c = 0.5 * (a + b);
        double h = 0.5 * (b - a);
        double fc = eval(p, c);
        double kron = wk[7] * fc;
        double gauss = wg[3] * fc;
        for (int i = 0; i < 7; ++i)
        {
            double f1 = eval(p, c - h * xk[i]);
            double f2 = eval(p, c + h * xk[i]);
            kron += wk[i] * (f1 + f2);
            if (i % 2 == 1)
            {
                gauss += wg[i / 2] * (f1 + f2);
            }
        }
        double scale = (panels_[p].hi - panels_[p].lo) * h;
        return {a, b, p, kron * scale, std::abs((kron - gauss) * scale)};
    }

  private:
    std::function<double(double)> const& f_;
    std::vector<Panel> const& panels_;
};

}  // namespace

std::vector<Panel> make_panels(std::vector<double> breakpoints)
{
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
    std::vector<Panel> panels;
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
    {
        panels.push_back({breakpoints[i - 1], breakpoints[i], false});
    }
    return panels;
}

QuadratureResult integrate(std::function<double(double)> const& f,
                           std::vector<Panel> const& panels,
                           QuadratureOptions const& options)
{
    if (!(options.abs_tol > 0) && !(options.rel_tol > 0))
    {
        throw DomainError("quadrature tolerance must be positive");
    }
    Integrator integrator(f, panels);
    std::priority_queue<Segment> queue;
    double value = 0;
    double error = 0;
    for (std::size_t p = 0; p < panels.size(); ++p)
    {
        if (!(panels[p].hi > panels[p].lo))
        {
            continue;
        }
        Segment s = integrator.rule(p, 0, 1);
        value += s.value;
        error += s.error;
        queue.push(s);
    }

    QuadratureResult result;
    auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(value)); };
    while (!queue.empty() && error > target())
    {
        if (result.subdivisions >= options.max_subdivisions)
        {
            result.converged = false;
            break;
        }
        Segment s = queue.top();
        double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b))
        {
            // Segment at resolution limit; accept its error.
            result.converged = false;
            break;
        }
        queue.pop();
        Segment left = integrator.rule(s.panel, s.a, mid);
        Segment right = integrator.rule(s.panel, mid, s.b);
        value += left.value + right.value - s.value;
        error += left.error + right.error - s.error;
        queue.push(left);
        queue.push(right);
        ++result.subdivisions;
    }

    // Re-sum to shed drift from the running updates.
    value = 0;
    error = 0;
    while (!queue.empty())
    {
        value += queue.top().value;
        error += queue.top().error;
        queue.pop();
    }
    result.value = value;
    result.error = error;
    if (error > std::max(options.abs_tol, options.rel_tol * std::abs(value)))
    {
        result.converged = false;
    }
    return result;
}

LogQuadratureResult integrate_log(std::function<double(double)> const& log_f,
                                  std::vector<Panel> const& panels,
                                  QuadratureOptions const& options)
{
    constexpr int samples = 256;
    double shift = -std::numeric_limits<double>::infinity();
    for (auto const& panel : panels)
    {
        for (int i = 0; i <= samples; ++i)
        {
            double x = panel.lo + (panel.hi - panel.lo) * i / samples;
            double v = log_f(x);
            if (std::isfinite(v))
            {
                shift = std::max(shift, v);
            }
        }
    }
    LogQuadratureResult out;
    if (!std::isfinite(shift))
    {
        out.log_value = -std::numeric_limits<double>::infinity();
        return out;
    }
    auto scaled = [&](double x) {
        double v = log_f(x) - shift;
        return v < -745 ? 0.0 : std::exp(v);
    };
    QuadratureOptions opts = options;
    if (!(opts.rel_tol > 0))
    {
        opts.rel_tol = 1e-12;
    }
    opts.abs_tol = 0;
    QuadratureResult r = integrate(scaled, panels, opts);
    out.converged = r.converged;
    if (r.value <= 0)
    {
        out.log_value = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.log_value = std::log(r.value) + shift;
    out.rel_error = r.error / r.value;
    return out;
}

}  // namespace recurlab
