#include "recurlab/limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "recurlab/errors.hpp"
#include "recurlab/quadrature.hpp"
#include "recurlab/stats.hpp"

namespace recurlab
{
namespace
{
// log of tau^k rho^{k+1} e^{-rho tau} / k!, with the tau = 0 and rho = 0 limits.
double log_integrand(double rho, double tau, int k)
{
    if (!(rho > 0))
    {
        return -std::numeric_limits<double>::infinity();
    }
    if (tau == 0)
    {
        return k == 0 ? std::log(rho) : -std::numeric_limits<double>::infinity();
    }
    if (std::isinf(rho))
    {
        return -std::numeric_limits<double>::infinity();
    }
    return k * std::log(tau * rho) + std::log(rho) - rho * tau - std::lgamma(k + 1.0);
}

double poisson_pmf(double rate, int k)
{
    if (rate == 0)
    {
        return k == 0 ? 1.0 : 0.0;
    }
    return std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0));
}

std::vector<Panel> density_panels(DensityModel const& density,
                                  std::vector<double> const& splits,
                                  double tau,
                                  int k)
{
    std::vector<double> points = density.breakpoints();
    for (double s : splits)
    {
        if (s > density.lo() && s < density.hi())
        {
            points.push_back(s);
        }
    }
    auto singular_piece = [&](double mid) -> DensityPiece const* {
        for (auto const& piece : density.pieces())
        {
            if (mid >= piece.lo && mid <= piece.hi && piece.singular_endpoints())
            {
                return &piece;
            }
        }
        return nullptr;
    };
    // Near a 1/sqrt blow-up the integrand peaks where rho ~ (k + 1) / tau, at a
    // distance delta from the endpoint that shrinks like 1/k^2; split around it.
    if (tau > 0)
    {
        double peak_rho = (k + 1) / tau;
        for (auto const& panel : make_panels(points))
        {
            DensityPiece const* piece = singular_piece(0.5 * (panel.lo + panel.hi));
            if (!piece)
            {
                continue;
            }
            double w = panel.hi - panel.lo;
            double delta = 1 / (std::numbers::pi * std::numbers::pi * (piece->b - piece->a) * peak_rho * peak_rho);
            if (delta > w / 16)
            {
                continue;
            }
            for (int m = -3; m <= 3; ++m)
            {
                double d = delta * std::ldexp(1.0, 2 * m);
                if (d < w / 4)
                {
                    points.push_back(panel.lo + d);
                    points.push_back(panel.hi - d);
                }
            }
        }
    }
    auto panels = make_panels(points);
    for (auto& panel : panels)
    {
        panel.singular = singular_piece(0.5 * (panel.lo + panel.hi)) != nullptr;
    }
    return panels;
}

// P(Poisson(tau) >= m0), summed in the direction that avoids cancellation.
double poisson_upper_tail(double tau, int m0)
{
    if (m0 <= 0)
    {
        return 1.0;
    }
    if (tau > m0)
    {
        double head = 0;
        for (int m = 0; m < m0; ++m)
        {
            head += poisson_pmf(tau, m);
        }
        return 1.0 - head;
    }
    double term = poisson_pmf(tau, m0);
    double sum = 0;
    for (int m = m0; term > 0; ++m)
    {
        sum += term;
        term *= tau / (m + 1);
        if (term < 1e-18 * sum)
        {
            break;
        }
    }
    return sum;
}

}  // namespace

void QuadratureConfig::validate() const
{
    if (!(abs_tol > 0))
    {
        throw DomainError("quadrature abs_tol must be positive");
    }
    if (max_subdivisions < 1)
    {
        throw DomainError("quadrature max_subdivisions must be positive");
    }
}

PmfValue poisson_like_pmf(DensityModel const& density, double tau, int k, QuadratureConfig const& cfg)
{
    cfg.validate();
    if (!(tau >= 0) || !std::isfinite(tau) || k < 0)
    {
        throw DomainError("G(tau, k) needs finite tau >= 0 and k >= 0");
    }
    PmfValue out;
    if (density.is_discrete())
    {
        double w = density.bin_width();
        for (double p : density.probabilities())
        {
            double v = log_integrand(p / w, tau, k);
            if (std::isfinite(v))
            {
                out.value += w * std::exp(v);
            }
        }
        return out;
    }
    if (density.kind() != DensityKind::ClosedForm)
    {
        throw UnsupportedError("density " + density.label()
                               + " has no formula; estimate it with ulam_density first");
    }
    auto f = [&](double x) {
        double v = log_integrand(density(x), tau, k);
        return std::isfinite(v) ? std::exp(v) : 0.0;
    };
    QuadratureOptions opts;
    opts.abs_tol = cfg.abs_tol;
    opts.max_subdivisions = cfg.max_subdivisions;
    QuadratureResult r = integrate(f, density_panels(density, cfg.splits, tau, k), opts);
    out.value = r.value;
    out.error = r.error;
    out.flagged = !r.converged;
    return out;
}

bool has_closed_form_pmf(MapModel const& map)
{
    return map.id() == MapId::Doubling || map.id() == MapId::Cusp
           || (map.id() == MapId::Beta && map.is_golden());
}

double closed_form_pmf(MapModel const& map, double tau, int k)
{
    if (!(tau >= 0) || !std::isfinite(tau) || k < 0)
    {
        throw DomainError("G(tau, k) needs finite tau >= 0 and k >= 0");
    }
    switch (map.id())
    {
        case MapId::Doubling:
            return poisson_pmf(tau, k);
        case MapId::Beta:
            if (map.is_golden())
            {
                // Two plateaus of heights rho1, rho2 carrying mu-masses w1, w2.
                double b = std::numbers::phi;
                double b2 = b * b;
                double rho1 = b2 * b / (b2 + 1);
                double rho2 = b2 / (b2 + 1);
                double w1 = rho1 / b;
                double w2 = rho2 / b2;
                return w1 * poisson_pmf(rho1 * tau, k) + w2 * poisson_pmf(rho2 * tau, k);
            }
            break;
        case MapId::Cusp:
            if (!(tau > 0))
            {
                throw DomainError("cusp closed form needs tau > 0");
            }
            return 2.0 * (k + 1) / (tau * tau) * poisson_upper_tail(tau, k + 2);
        default:
            break;
    }
    throw UnsupportedError("no closed form for map " + map.name() + "; use poisson_like_pmf");
}

EvtValue evt_distribution(DensityModel const& density, PsiSpec const& psi, double u, QuadratureConfig const& cfg)
{
    psi.validate();
    if (psi.kind == PsiKind::Power && !(u > 0))
    {
        throw DomainError("power observable needs u > 0");
    }
    double tau = psi.tau(u);
    EvtValue out;
    if (!std::isfinite(tau) || tau > 1e300)
    {
        out.saturated = true;
        return out;
    }
    out.value = poisson_like_pmf(density, tau, 0, cfg).value;
    return out;
}

TailFit tail_classification(DensityModel const& density, int k, double tau_probe, QuadratureConfig const& cfg)
{
    cfg.validate();
    if (!(tau_probe >= 10) || !std::isfinite(tau_probe))
    {
        throw DomainError("tail probe must be at least 10");
    }
    if (k < 0)
    {
        throw DomainError("k must be nonnegative");
    }
    constexpr int points = 16;
    std::vector<double> taus;
    std::vector<double> logs;
    std::vector<double> log_taus;
    auto panels = density_panels(density, cfg.splits, 0, k);
    for (int i = 0; i < points; ++i)
    {
        double tau = tau_probe * std::pow(4.0, -1.0 + static_cast<double>(i) / (points - 1));
        double lg;
        if (density.is_discrete())
        {
            double w = density.bin_width();
            double m = -std::numeric_limits<double>::infinity();
            std::vector<double> terms;
            for (double p : density.probabilities())
            {
                terms.push_back(std::log(w) + log_integrand(p / w, tau, k));
                m = std::max(m, terms.back());
            }
            double s = 0;
            for (double t : terms)
            {
                s += std::isfinite(t) ? std::exp(t - m) : 0.0;
            }
            lg = std::log(s) + m;
        }
        else
        {
            if (density.kind() != DensityKind::ClosedForm)
            {
                throw UnsupportedError("tail classification needs a known density");
            }
            auto lf = [&](double x) { return log_integrand(density(x), tau, k); };
            lg = integrate_log(lf, panels).log_value;
        }
        if (!std::isfinite(lg))
        {
            throw ConvergenceError("G vanished on the tail grid", 0, i);
        }
        taus.push_back(tau);
        log_taus.push_back(std::log(tau));
        logs.push_back(lg);
    }
    LineFit power = fit_line(log_taus, logs);
    LineFit expo = fit_line(taus, logs);
    TailFit out;
    out.exponent = power.slope;
    out.rate = -expo.slope;
    out.power_rss = power.rss;
    out.exponential_rss = expo.rss;
    out.kind = power.rss < expo.rss ? TailKind::PowerLaw : TailKind::Exponential;
    return out;
}

char const* to_string(Summability s)
{
    switch (s)
    {
        case Summability::Convergent:
            return "convergent";
        case Summability::Divergent:
            return "divergent";
        case Summability::Undetermined:
            return "undetermined";
    }
    return "undetermined";
}

std::vector<SummabilityResult> as_summability_check(DensityModel const& density,
                                                    double gamma0,
                                                    std::vector<double> const& eps_grid,
                                                    std::int64_t terms)
{
    if (!(gamma0 > 0 && gamma0 <= 1))
    {
        throw DomainError("gamma0 must lie in (0, 1]");
    }
    if (terms < 100)
    {
        throw DomainError("summability check needs at least 100 terms");
    }
    if (density.kind() == DensityKind::Unknown)
    {
        throw UnsupportedError("summability check needs a known density");
    }
    auto panels = density_panels(density, {}, 0, 0);

    // log of integral rho e^{-lambda rho}
    auto log_term = [&](double lambda) {
        if (density.is_discrete())
        {
            double w = density.bin_width();
            double m = -std::numeric_limits<double>::infinity();
            std::vector<double> logs;
            for (double p : density.probabilities())
            {
                double h = p / w;
                logs.push_back(h > 0 ? std::log(p) - lambda * h
                                     : -std::numeric_limits<double>::infinity());
                m = std::max(m, logs.back());
            }
            double s = 0;
            for (double l : logs)
            {
                s += std::isfinite(l) ? std::exp(l - m) : 0.0;
            }
            return std::log(s) + m;
        }
        auto lf = [&](double x) {
            double rho = density(x);
            return rho > 0 && std::isfinite(rho) ? std::log(rho) - lambda * rho
                                                 : -std::numeric_limits<double>::infinity();
        };
        return integrate_log(lf, panels).log_value;
    };

    std::vector<SummabilityResult> results;
    for (double eps : eps_grid)
    {
        if (!(eps > 0))
        {
            throw DomainError("epsilon must be positive");
        }
        SummabilityResult res;
        res.epsilon = eps;
        std::vector<double> fit_k;
        std::vector<double> fit_log;
        std::int64_t decade = std::max<std::int64_t>(terms / 10, 1);
        double step = std::max(1.0, static_cast<double>(terms - decade) / 64);
        double next_fit = static_cast<double>(decade);
        for (std::int64_t k = 1; k <= terms; ++k)
        {
            double lg = log_term(eps * std::pow(static_cast<double>(k), gamma0));
            if (std::isfinite(lg))
            {
                res.partial_sum += std::exp(lg);
            }
            if (k >= next_fit)
            {
                fit_k.push_back(static_cast<double>(k));
                fit_log.push_back(lg);
                next_fit += step;
            }
        }
        bool all_finite = std::all_of(fit_log.begin(), fit_log.end(),
                                      [](double v) { return std::isfinite(v); });
        if (!all_finite)
        {
            // Terms underflowed double range: faster than any stretched envelope.
            res.verdict = Summability::Convergent;
            res.stretched = true;
            results.push_back(res);
            continue;
        }
        std::vector<double> kg;
        std::vector<double> lk;
        for (double k : fit_k)
        {
            kg.push_back(std::pow(k, gamma0));
            lk.push_back(std::log(k));
        }
        LineFit stretched = fit_line(kg, fit_log);
        LineFit power = fit_line(lk, fit_log);
        constexpr double margin = 0.05;
        if (stretched.rss <= power.rss && stretched.slope < 0)
        {
            res.stretched = true;
            res.verdict = Summability::Convergent;
        }
        else
        {
            res.envelope_exponent = power.slope;
            if (power.slope < -1 - margin)
            {
                res.verdict = Summability::Convergent;
            }
            else if (power.slope > -1 + margin)
            {
                res.verdict = Summability::Divergent;
            }
        }
        results.push_back(res);
    }
    return results;
}

char const* to_string(PmfMethod m)
{
    switch (m)
    {
        case PmfMethod::ClosedForm:
            return "ClosedForm";
        case PmfMethod::Quadrature:
            return "Quadrature";
        case PmfMethod::BinSum:
            return "BinSum";
    }
    return "Quadrature";
}

double LimitLawTable::overflow(std::size_t t) const
{
    double s = 0;
    for (double v : values.at(t))
    {
        s += v;
    }
    return std::max(0.0, 1.0 - s);
}

LimitLawTable build_limit_law_table(MapModel const& map,
                                    DensityModel const& density,
                                    std::vector<double> const& tau_grid,
                                    int k_max,
                                    QuadratureConfig const& cfg,
                                    bool prefer_closed_form)
{
    cfg.validate();
    if (k_max < 0)
    {
        throw DomainError("k_max must be nonnegative");
    }
    bool closed = prefer_closed_form && has_closed_form_pmf(map);
    if (!closed && density.kind() == DensityKind::Unknown)
    {
        throw UnsupportedError("density of " + map.name() + " is unknown; use an Ulam estimate");
    }

    struct Row
    {
        std::vector<double> values;
        std::vector<PmfMethod> method;
        std::vector<double> error;
    };
    auto make_row = [&](double tau) {
        Row row;
        for (int k = 0; k <= k_max; ++k)
        {
            if (closed && tau > 0)
            {
                row.values.push_back(closed_form_pmf(map, tau, k));
                row.method.push_back(PmfMethod::ClosedForm);
                row.error.push_back(0);
                continue;
            }
            PmfValue v = poisson_like_pmf(density, tau, k, cfg);
            row.values.push_back(v.value);
            row.method.push_back(density.is_discrete() ? PmfMethod::BinSum : PmfMethod::Quadrature);
            row.error.push_back(v.error);
        }
        return row;
    };

    std::vector<std::future<Row>> rows;
    for (double tau : tau_grid)
    {
        rows.push_back(std::async(std::launch::async, make_row, tau));
    }
    LimitLawTable table;
    table.tau_grid = tau_grid;
    table.k_max = k_max;
    table.density_label = closed ? map.name() + " closed form" : density.label();
    for (auto& f : rows)
    {
        Row row = f.get();
        table.values.push_back(std::move(row.values));
        table.method.push_back(std::move(row.method));
        table.est_error.push_back(std::move(row.error));
    }
    return table;
}

int poisson_tail_K(double rate, double eps)
{
    if (!(rate >= 0) || !std::isfinite(rate))
    {
        throw DomainError("Poisson tail needs a finite nonnegative rate");
    }
    if (rate == 0)
    {
        return 0;
    }
    for (int K = 0;; ++K)
    {
        // P(X > K) = P(X >= K + 1) = regularized lower gamma P(K + 1, rate)
        if (boost::math::gamma_p(K + 1.0, rate) < eps)
        {
            return K;
        }
    }
}

double doubling_return_set_measure(int j, double r)
{
    if (j < 1)
    {
        throw DomainError("return set measure needs j >= 1");
    }
    // Past 62 steps the value no longer changes in double precision.
    j = std::min(j, 62);
    if (!(r >= 0))
    {
        throw DomainError("radius must be nonnegative");
    }
    // Branch m covers [m/L, (m+1)/L) where 2^j x - x - m has slope s = L - 1.
    long double L = std::ldexp(1.0L, j);
    long double s = L - 1;
    long double rr = r;
    long double rl = rr * L;
    auto clampm = [&](long double v) { return std::clamp(v, -1.0L, s + 1); };
    // Lower end (m - r)/s for m >= m1, upper end (m + r)/s for m <= m2.
    long double m1 = clampm(std::ceil(rl));
    long double m2 = clampm(std::floor(s - rl));
    auto count = [](long double a, long double b) { return b >= a ? b - a + 1 : 0.0L; };
    auto msum = [](long double a, long double b) { return b >= a ? (a + b) * (b - a + 1) / 2 : 0.0L; };

    long double total = 0;
    // m < m1, m <= m2: (m + rL)/(L s)
    long double a = 0;
    long double b = std::min(m1 - 1, m2);
    total += (msum(a, b) + rl * count(a, b)) / (L * s);
    // m1 <= m <= m2: 2r/s
    total += count(std::max(m1, 0.0L), m2) * 2 * rr / s;
    // m >= m1, m > m2: (s - m + rL)/(L s)
    a = std::max(m1, m2 + 1);
    b = s;
    total += ((s + rl) * count(a, b) - msum(a, b)) / (L * s);
    // m < m1, m > m2: whole branch
    total += count(std::max(m2 + 1, 0.0L), std::min(m1 - 1, s)) / L;
    return static_cast<double>(std::min(total, 1.0L));
}

}  // namespace recurlab
