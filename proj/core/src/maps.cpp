#include "recurlab/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "recurlab/errors.hpp"

namespace recurlab
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double golden_double()
{
    return (1 + std::sqrt(5.0)) / 2;
}

//! Returns m when gamma == 2^-m for a small m, else -1.
int dyadic_root_depth(double gamma)
{
    for (int m = 1; m <= 8; ++m)
    {
        if (gamma == std::ldexp(1.0, -m))
        {
            return m;
        }
    }
    return -1;
}

double mp_power(double base, double gamma)
{
    int depth = dyadic_root_depth(gamma);
    if (depth < 0)
    {
        return std::pow(base, gamma);
    }
    for (int i = 0; i < depth; ++i)
    {
        base = std::sqrt(base);
    }
    return base;
}

}  // namespace

//---------------------------------------------------------------------------//
MapModel MapModel::doubling()
{
    MapModel m;
    m.id_ = MapId::Doubling;
    m.name_ = "doubling";
    m.param_ = 2;
    m.density_ = DensityModel::closed_form(
        {{0, 1, DensityFormula::Constant, 1.0}}, {}, "doubling: Lebesgue");
    return m;
}

MapModel MapModel::beta(double beta)
{
    if (!(beta > 1) || !std::isfinite(beta))
    {
        throw ContractError("beta transformation needs beta > 1");
    }
    MapModel m;
    m.id_ = MapId::Beta;
    m.name_ = "beta";
    m.param_ = beta;
    double phi = golden_double();
    m.golden_ = std::abs(1 / beta - (beta - 1)) < 1e-12;
    if (m.golden_)
    {
        m.param_ = phi;
        double b2 = phi * phi;
        double b3 = b2 * phi;
        double rho1 = b3 / (b2 + 1);
        double rho2 = b2 / (b2 + 1);
        m.density_ = DensityModel::closed_form(
            {{0, 1 / phi, DensityFormula::Constant, rho1},
             {1 / phi, 1, DensityFormula::Constant, rho2}},
            {},
            "beta(golden): piecewise constant");
    }
    else
    {
        m.density_ = DensityModel::unknown(0, 1, "beta(" + std::to_string(beta) + ")");
    }
    return m;
}

MapModel MapModel::golden_beta()
{
    return beta(golden_double());
}

MapModel MapModel::gauss()
{
    MapModel m;
    m.id_ = MapId::Gauss;
    m.name_ = "gauss";
    m.density_ = DensityModel::closed_form(
        {{0, 1, DensityFormula::Reciprocal, 1 / std::numbers::ln2}},
        {},
        "gauss: 1/((1+x) ln 2)");
    return m;
}

MapModel MapModel::manneville_pomeau(double gamma)
{
    if (!(gamma > 0 && gamma < 1))
    {
        throw ContractError("Manneville-Pomeau exponent must lie in (0, 1)");
    }
    MapModel m;
    m.id_ = MapId::MannevillePomeau;
    m.name_ = "mp";
    m.param_ = gamma;
    m.density_ = DensityModel::unknown(0, 1, "mp(gamma=" + std::to_string(gamma) + ")");
    return m;
}

MapModel MapModel::cusp()
{
    MapModel m;
    m.id_ = MapId::Cusp;
    m.name_ = "cusp";
    m.lo_ = -1;
    m.hi_ = 1;
    m.density_ = DensityModel::closed_form(
        {{-1, 1, DensityFormula::Linear, 0.5, -0.5}}, {1.0}, "cusp: (1-x)/2");
    return m;
}

MapModel MapModel::logistic()
{
    MapModel m;
    m.id_ = MapId::Logistic;
    m.name_ = "logistic";
    m.param_ = 4;
    // Arcsine law; derived, and cross-checked against the Ulam estimate.
    m.density_ = DensityModel::closed_form(
        {{0, 1, DensityFormula::Arcsine, 0, 1}}, {}, "logistic: arcsine");
    return m;
}

MapModel MapModel::from_name(std::string_view name, double beta_param, double gamma)
{
    if (name == "doubling")
        return doubling();
    if (name == "beta")
        return beta(beta_param);
    if (name == "gauss")
        return gauss();
    if (name == "mp")
        return manneville_pomeau(gamma);
    if (name == "cusp")
        return cusp();
    if (name == "logistic")
        return logistic();
    throw ContractError("unknown map '" + std::string(name) + "'");
}

//---------------------------------------------------------------------------//
Expansion MapModel::expansion() const noexcept
{
    switch (id_)
    {
        case MapId::Doubling:
            return {ExpansionKind::UniformBound, 2};
        case MapId::Beta:
            return {ExpansionKind::UniformBound, param_};
        case MapId::MannevillePomeau:
            // f'(x) = 1 + (1 + gamma)(2x)^gamma on [0, 1/2), 2 beyond.
            return {ExpansionKind::UniformBound, 2 + param_};
        case MapId::Logistic:
            return {ExpansionKind::UniformBound, 4};
        case MapId::Gauss:
        case MapId::Cusp:
            return {ExpansionKind::Unbounded, inf};
    }
    return {ExpansionKind::Unbounded, inf};
}

double MapModel::apply(double x) const
{
    double y = 0;
    switch (id_)
    {
        case MapId::Doubling:
            y = 2 * x;
            if (y >= 1)
                y -= 1;
            break;
        case MapId::Beta:
            y = param_ * x;
            y -= std::floor(y);
            break;
        case MapId::Gauss:
            if (x == 0)
                return 0;
            y = 1 / x;
            y -= std::floor(y);
            break;
        case MapId::MannevillePomeau:
            y = x < 0.5 ? x * (1 + mp_power(2 * x, param_)) : 2 * x - 1;
            break;
        case MapId::Cusp:
            y = 1 - 2 * std::sqrt(std::abs(x));
            break;
        case MapId::Logistic:
            y = 4 * x * (1 - x);
            break;
    }
    return std::clamp(y, lo_, hi_);
}

double MapModel::derivative_abs(double x) const
{
    switch (id_)
    {
        case MapId::Doubling:
            return 2;
        case MapId::Beta:
            return param_;
        case MapId::Gauss:
            return x == 0 ? inf : 1 / (x * x);
        case MapId::MannevillePomeau:
            return x < 0.5 ? 1 + (1 + param_) * mp_power(2 * x, param_) : 2;
        case MapId::Cusp:
            return x == 0 ? inf : 1 / std::sqrt(std::abs(x));
        case MapId::Logistic:
            return 4 * std::abs(1 - 2 * x);
    }
    return inf;
}

double MapModel::rounding_scale(double x) const
{
    if (id_ == MapId::Gauss)
    {
        return x == 0 ? 0 : 2 / std::abs(x) + 1;
    }
    return 4;
}

std::vector<MapBranch> MapModel::branches_in(double a, double b, long max_branches) const
{
    std::vector<MapBranch> all;
    switch (id_)
    {
        case MapId::Doubling:
        case MapId::MannevillePomeau:
        case MapId::Logistic:
            all = {{0, 0.5, 0}, {0.5, 1, 1}};
            break;
        case MapId::Beta: {
            // Branch k covers [k/beta, (k+1)/beta).
            long count = static_cast<long>(std::ceil(param_));
            for (long k = 0; k < count; ++k)
            {
                all.push_back({k / param_, std::min(1.0, (k + 1) / param_), k});
            }
            break;
        }
        case MapId::Cusp:
            all = {{-1, 0, 0}, {0, 1, 1}};
            break;
        case MapId::Gauss: {
            // Branch m covers [1/(m+1), 1/m].
            long m_min = std::max(1L, static_cast<long>(std::floor(1 / b)));
            long m_max = a > 0 ? static_cast<long>(std::floor(1 / a))
                               : std::numeric_limits<long>::max();
            m_max = std::min(m_max, m_min + max_branches - 1);
            for (long m = m_min; m <= m_max; ++m)
            {
                all.push_back({1.0 / (m + 1), 1.0 / m, m});
            }
            break;
        }
    }
    std::vector<MapBranch> result;
    for (auto br : all)
    {
        double lo = std::max(br.lo, a);
        double hi = std::min(br.hi, b);
        if (lo < hi)
        {
            result.push_back({lo, hi, br.index});
        }
    }
    return result;
}

double MapModel::branch_forward(MapBranch const& br, double x) const
{
    switch (id_)
    {
        case MapId::Doubling:
            return 2 * x - static_cast<double>(br.index);
        case MapId::Beta:
            return param_ * x - static_cast<double>(br.index);
        case MapId::Gauss:
            return 1 / x - static_cast<double>(br.index);
        case MapId::MannevillePomeau:
            return br.index == 0 ? x * (1 + mp_power(2 * x, param_)) : 2 * x - 1;
        case MapId::Cusp:
            return 1 - 2 * std::sqrt(std::abs(x));
        case MapId::Logistic:
            return 4 * x * (1 - x);
    }
    return nan;
}

double MapModel::branch_inverse(MapBranch const& br, double y) const
{
    switch (id_)
    {
        case MapId::Doubling:
            return (y + static_cast<double>(br.index)) / 2;
        case MapId::Beta:
            return (y + static_cast<double>(br.index)) / param_;
        case MapId::Gauss:
            return 1 / (y + static_cast<double>(br.index));
        case MapId::MannevillePomeau:
            return br.index == 0 ? nan : (y + 1) / 2;
        case MapId::Cusp: {
            double s = (1 - y) / 2;
            return br.index == 0 ? -s * s : s * s;
        }
        case MapId::Logistic: {
            double s = std::sqrt(std::max(0.0, 1 - y));
            return br.index == 0 ? (1 - s) / 2 : (1 + s) / 2;
        }
    }
    return nan;
}

//---------------------------------------------------------------------------//
BigReal golden_ratio(mpfr_prec_t precision)
{
    BigReal phi(precision);
    mpfr_sqrt_ui(phi.get(), 5, MPFR_RNDU);
    mpfr_add_ui(phi.get(), phi.get(), 1, MPFR_RNDU);
    mpfr_div_2ui(phi.get(), phi.get(), 1, MPFR_RNDU);
    return phi;
}

MapStepper::MapStepper(MapModel const& map, mpfr_prec_t max_precision)
    : map_(&map), beta_(max_precision), gamma_(64), t_(max_precision)
{
    if (map.id() == MapId::Beta)
    {
        if (map.is_golden())
        {
            // Rounded up: beta(beta - 1) lands on the 0 side of 1.
            beta_ = golden_ratio(max_precision);
        }
        else
        {
            mpfr_set_d(beta_.get(), map.parameter(), MPFR_RNDN);
        }
    }
    if (map.id() == MapId::MannevillePomeau)
    {
        sqrt_depth_ = dyadic_root_depth(map.parameter());
        mpfr_set_d(gamma_.get(), map.parameter(), MPFR_RNDN);
    }
}

void MapStepper::fit_scratch(mpfr_prec_t precision)
{
    if (t_.precision() != precision)
    {
        mpfr_set_prec(t_.get(), precision);
    }
}

bool MapStepper::step(BigReal& x)
{
    mpfr_ptr v = x.get();
    fit_scratch(x.precision());
    mpfr_ptr t = t_.get();
    mpfr_clear_inexflag();
    switch (map_->id())
    {
        case MapId::Doubling:
            mpfr_mul_2ui(v, v, 1, MPFR_RNDN);
            if (mpfr_cmp_ui(v, 1) >= 0)
                mpfr_sub_ui(v, v, 1, MPFR_RNDN);
            break;
        case MapId::Beta:
            mpfr_mul(v, v, beta_.get(), MPFR_RNDN);
            mpfr_frac(v, v, MPFR_RNDN);
            break;
        case MapId::Gauss:
            if (!mpfr_zero_p(v))
            {
                mpfr_ui_div(v, 1, v, MPFR_RNDN);
                mpfr_frac(v, v, MPFR_RNDN);
            }
            break;
        case MapId::MannevillePomeau:
            if (mpfr_cmp_d(v, 0.5) < 0)
            {
                mpfr_mul_2ui(t, v, 1, MPFR_RNDN);
                if (sqrt_depth_ >= 0)
                {
                    for (int i = 0; i < sqrt_depth_; ++i)
                        mpfr_sqrt(t, t, MPFR_RNDN);
                }
                else
                {
                    mpfr_pow(t, t, gamma_.get(), MPFR_RNDN);
                }
                mpfr_mul(t, t, v, MPFR_RNDN);
                mpfr_add(v, v, t, MPFR_RNDN);
            }
            else
            {
                mpfr_mul_2ui(v, v, 1, MPFR_RNDN);
                mpfr_sub_ui(v, v, 1, MPFR_RNDN);
            }
            break;
        case MapId::Cusp:
            mpfr_abs(t, v, MPFR_RNDN);
            mpfr_sqrt(t, t, MPFR_RNDN);
            mpfr_mul_2ui(t, t, 1, MPFR_RNDN);
            mpfr_ui_sub(v, 1, t, MPFR_RNDN);
            break;
        case MapId::Logistic:
            mpfr_ui_sub(t, 1, v, MPFR_RNDN);
            mpfr_mul(v, v, t, MPFR_RNDN);
            mpfr_mul_2ui(v, v, 2, MPFR_RNDN);
            break;
    }
    bool inexact = mpfr_inexflag_p() != 0;
    if (mpfr_cmp_d(v, map_->lo()) < 0)
    {
        mpfr_set_d(v, map_->lo(), MPFR_RNDN);
    }
    else if (mpfr_cmp_d(v, map_->hi()) > 0)
    {
        mpfr_set_d(v, map_->hi(), MPFR_RNDN);
    }
    return inexact;
}

//---------------------------------------------------------------------------//
BigReal eval_map(MapModel const& map, BigReal const& x)
{
    if (mpfr_cmp_d(x.get(), map.lo()) < 0 || mpfr_cmp_d(x.get(), map.hi()) > 0
        || mpfr_nan_p(x.get()))
    {
        throw DomainError("eval_map: x outside the domain of " + map.name());
    }
    BigReal y = x;
    MapStepper stepper(map, x.precision());
    stepper.step(y);
    return y;
}

double eval_map(MapModel const& map, double x)
{
    if (!map.contains(x))
    {
        throw DomainError("eval_map: x outside the domain of " + map.name());
    }
    return map.apply(x);
}

double eval_density(MapModel const& map, double x)
{
    if (!map.contains(x))
    {
        throw DomainError("eval_density: x outside the domain of " + map.name());
    }
    return map.density()(x);
}

namespace
{
double burn_in_sample(MapModel const& map, SampleEngine& engine, std::int64_t burn_in)
{
    double x = map.lo() + (map.hi() - map.lo()) * uniform01(engine);
    for (std::int64_t i = 0; i < burn_in; ++i)
    {
        x = map.apply(x);
    }
    return x;
}
}  // namespace

double sample_invariant(MapModel const& map, SampleEngine& engine, SamplerOptions const& options)
{
    if (map.has_closed_form_density())
    {
        return map.density().inverse_cdf(uniform01(engine));
    }
    return burn_in_sample(map, engine, options.burn_in);
}

void sample_invariant(BigReal& out,
                      MapModel const& map,
                      SampleEngine& engine,
                      SamplerOptions const& options)
{
    if (map.has_closed_form_density())
    {
        BigReal u(out.precision());
        random_fraction(u, engine);
        map.density().inverse_cdf(out, u);
        return;
    }
    double x = burn_in_sample(map, engine, options.burn_in);
    // The burn-in endpoint fixes the leading 53 bits; the rest are random.
    mpfr_set_d(out.get(), x, MPFR_RNDN);
    if (x != 0)
    {
        BigReal tail(out.precision());
        random_fraction(tail, engine);
        int e = 0;
        std::frexp(x, &e);
        mpfr_mul_2si(tail.get(), tail.get(), e - 53, MPFR_RNDN);
        mpfr_add(out.get(), out.get(), tail.get(), MPFR_RNDN);
    }
    if (mpfr_cmp_d(out.get(), map.hi()) > 0)
    {
        mpfr_set_d(out.get(), map.hi(), MPFR_RNDN);
    }
}

DensityModel histogram_density(std::vector<double> const& samples,
                               double lo,
                               double hi,
                               long bins,
                               std::string label)
{
    if (bins < 1 || samples.empty())
    {
        throw ContractError("histogram needs samples and at least one bin");
    }
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    double width = (hi - lo) / static_cast<double>(bins);
    for (double x : samples)
    {
        auto i = static_cast<long>((x - lo) / width);
        counts[static_cast<std::size_t>(std::clamp(i, 0L, bins - 1))] += 1;
    }
    for (auto& c : counts)
    {
        c /= static_cast<double>(samples.size());
    }
    return DensityModel::discrete(DensityKind::Histogram, lo, hi, std::move(counts), std::move(label));
}

}  // namespace recurlab
