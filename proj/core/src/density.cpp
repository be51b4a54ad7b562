#include "recurlab/density.hpp"

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

double arcsine_cdf(double x, double p, double q)
{
    double s = std::clamp((x - p) / (q - p), 0.0, 1.0);
    return 2 / std::numbers::pi * std::asin(std::sqrt(s));
}

}  // namespace

//---------------------------------------------------------------------------//
double DensityPiece::value(double x) const
{
    switch (formula)
    {
        case DensityFormula::Constant:
            return a;
        case DensityFormula::Linear:
            return std::max(0.0, a + b * x);
        case DensityFormula::Reciprocal:
            return a / (1 + x);
        case DensityFormula::Arcsine: {
            double prod = (x - a) * (b - x);
            return prod > 0 ? 1 / (std::numbers::pi * std::sqrt(prod)) : inf;
        }
    }
    return 0;
}

double DensityPiece::mass_to(double x) const
{
    double t = x - lo;
    switch (formula)
    {
        case DensityFormula::Constant:
            return a * t;
        case DensityFormula::Linear:
            return (a + b * lo) * t + 0.5 * b * t * t;
        case DensityFormula::Reciprocal:
            return a * std::log1p(t / (1 + lo));
        case DensityFormula::Arcsine:
            return arcsine_cdf(x, a, b) - arcsine_cdf(lo, a, b);
    }
    return 0;
}

//---------------------------------------------------------------------------//
DensityModel DensityModel::closed_form(std::vector<DensityPiece> pieces,
                                       std::vector<double> zero_set,
                                       std::string label)
{
    if (pieces.empty())
    {
        throw ContractError("closed-form density needs at least one piece");
    }
    DensityModel d;
    d.kind_ = DensityKind::ClosedForm;
    d.lo_ = pieces.front().lo;
    d.hi_ = pieces.back().hi;
    d.label_ = std::move(label);
    d.pieces_ = std::move(pieces);
    d.zero_set_ = std::move(zero_set);
    std::sort(d.zero_set_.begin(), d.zero_set_.end());

    double acc = 0;
    for (std::size_t i = 0; i < d.pieces_.size(); ++i)
    {
        auto const& p = d.pieces_[i];
        if (!(p.lo < p.hi) || (i > 0 && p.lo != d.pieces_[i - 1].hi))
        {
            throw ContractError("density pieces must tile the domain");
        }
        d.piece_mass_.push_back(acc);
        acc += p.mass_to(p.hi);
        if (i > 0)
        {
            double left = d.pieces_[i - 1].value(p.lo);
            double right = p.value(p.lo);
            if (left != right)
            {
                d.jumps_.push_back({p.lo, right - left});
            }
        }
    }
    d.piece_mass_.push_back(acc);
    return d;
}

DensityModel DensityModel::discrete(DensityKind kind,
                                    double lo,
                                    double hi,
                                    std::vector<double> probabilities,
                                    std::string label)
{
    if (kind != DensityKind::Ulam && kind != DensityKind::Histogram)
    {
        throw ContractError("discrete density must be Ulam or Histogram");
    }
    if (probabilities.empty() || !(lo < hi))
    {
        throw ContractError("discrete density needs bins and a domain");
    }
    DensityModel d;
    d.kind_ = kind;
    d.lo_ = lo;
    d.hi_ = hi;
    d.label_ = std::move(label);
    d.probs_ = std::move(probabilities);
    double acc = 0;
    d.cum_probs_.reserve(d.probs_.size() + 1);
    for (double p : d.probs_)
    {
        if (!(p >= 0))
        {
            throw ContractError("bin probabilities must be nonnegative");
        }
        d.cum_probs_.push_back(acc);
        acc += p;
    }
    d.cum_probs_.push_back(acc);
    return d;
}

DensityModel DensityModel::unknown(double lo, double hi, std::string label)
{
    DensityModel d;
    d.kind_ = DensityKind::Unknown;
    d.lo_ = lo;
    d.hi_ = hi;
    d.label_ = std::move(label);
    return d;
}

//---------------------------------------------------------------------------//
double DensityModel::bin_width() const noexcept
{
    return probs_.empty() ? 0.0 : (hi_ - lo_) / static_cast<double>(probs_.size());
}

std::vector<double> DensityModel::jump_points() const
{
    std::vector<double> result;
    for (auto const& j : jumps_)
    {
        result.push_back(j.x);
    }
    return result;
}

std::vector<double> DensityModel::breakpoints() const
{
    std::vector<double> pts{lo_, hi_};
    for (auto const& p : pieces_)
    {
        pts.push_back(p.lo);
        pts.push_back(p.hi);
    }
    for (double z : zero_set_)
    {
        pts.push_back(z);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

void DensityModel::require_known(char const* op) const
{
    if (kind_ == DensityKind::Unknown)
    {
        throw UnsupportedError(std::string(op) + ": density of '" + label_
                               + "' has no closed form; estimate it with "
                                 "ulam_density first");
    }
}

std::size_t DensityModel::piece_index(double x) const
{
    auto it = std::upper_bound(
        pieces_.begin(), pieces_.end(), x,
        [](double v, DensityPiece const& p) { return v < p.lo; });
    if (it == pieces_.begin())
    {
        return 0;
    }
    return std::min<std::size_t>(it - pieces_.begin() - 1, pieces_.size() - 1);
}

std::size_t DensityModel::bin_index(double x) const
{
    double pos = (x - lo_) / bin_width();
    if (!(pos > 0))
    {
        return 0;
    }
    return std::min<std::size_t>(static_cast<std::size_t>(pos), probs_.size() - 1);
}

double DensityModel::operator()(double x) const
{
    require_known("eval_density");
    if (x < lo_ || x > hi_)
    {
        throw DomainError("eval_density: x outside density domain");
    }
    if (is_discrete())
    {
        return probs_[bin_index(x)] / bin_width();
    }
    return pieces_[piece_index(x)].value(x);
}

double DensityModel::left_limit(double x) const
{
    require_known("left_limit");
    if (is_discrete())
    {
        double pos = (x - lo_) / bin_width();
        auto i = bin_index(x);
        if (i > 0 && pos == std::floor(pos))
        {
            --i;
        }
        return probs_[i] / bin_width();
    }
    auto i = piece_index(x);
    if (i > 0 && x == pieces_[i].lo)
    {
        --i;
    }
    return pieces_[i].value(x);
}

double DensityModel::cdf(double x) const
{
    require_known("cdf");
    if (x <= lo_)
    {
        return 0;
    }
    if (x >= hi_)
    {
        return total_mass();
    }
    if (is_discrete())
    {
        auto i = bin_index(x);
        double left = lo_ + static_cast<double>(i) * bin_width();
        return cum_probs_[i] + probs_[i] * (x - left) / bin_width();
    }
    auto i = piece_index(x);
    return piece_mass_[i] + pieces_[i].mass_to(x);
}

double DensityModel::inverse_cdf(double u) const
{
    require_known("inverse_cdf");
    u = std::clamp(u, 0.0, 1.0) * total_mass();
    if (is_discrete())
    {
        auto it = std::upper_bound(cum_probs_.begin(), cum_probs_.end() - 1, u);
        std::size_t i = std::max<std::ptrdiff_t>(it - cum_probs_.begin() - 1, 0);
        // Skip empty bins so the result stays on the support.
        while (probs_[i] == 0 && i + 1 < probs_.size())
        {
            ++i;
        }
        double frac = probs_[i] > 0 ? (u - cum_probs_[i]) / probs_[i] : 0;
        return lo_ + (static_cast<double>(i) + std::clamp(frac, 0.0, 1.0)) * bin_width();
    }
    auto it = std::upper_bound(piece_mass_.begin(), piece_mass_.end() - 1, u);
    std::size_t i = std::max<std::ptrdiff_t>(it - piece_mass_.begin() - 1, 0);
    auto const& p = pieces_[i];
    double m = u - piece_mass_[i];
    double x = p.lo;
    switch (p.formula)
    {
        case DensityFormula::Constant:
            x = p.lo + m / p.a;
            break;
        case DensityFormula::Linear: {
            double v = p.a + p.b * p.lo;
            x = p.lo + 2 * m / (v + std::sqrt(std::max(0.0, v * v + 2 * p.b * m)));
            break;
        }
        case DensityFormula::Reciprocal:
            x = p.lo + (1 + p.lo) * std::expm1(m / p.a);
            break;
        case DensityFormula::Arcsine: {
            double s = std::sin(std::numbers::pi / 2 * (m + arcsine_cdf(p.lo, p.a, p.b)));
            x = p.a + (p.b - p.a) * s * s;
            break;
        }
    }
    return std::clamp(x, p.lo, p.hi);
}

void DensityModel::inverse_cdf(BigReal& out, BigReal const& u) const
{
    require_known("inverse_cdf");
    if (kind_ != DensityKind::ClosedForm)
    {
        out = BigReal(inverse_cdf(u.to_double()), out.precision());
        return;
    }
    auto prec = out.precision();
    double ud = u.to_double();
    auto it = std::upper_bound(piece_mass_.begin(), piece_mass_.end() - 1, ud);
    std::size_t i = std::max<std::ptrdiff_t>(it - piece_mass_.begin() - 1, 0);
    auto const& p = pieces_[i];

    BigReal m(prec), t(prec), s(prec);
    mpfr_sub_d(m.get(), u.get(), piece_mass_[i], MPFR_RNDN);
    switch (p.formula)
    {
        case DensityFormula::Constant:
            mpfr_div_d(t.get(), m.get(), p.a, MPFR_RNDN);
            mpfr_add_d(out.get(), t.get(), p.lo, MPFR_RNDN);
            break;
        case DensityFormula::Linear: {
            // t = 2m / (v + sqrt(v^2 + 2 b m))
            double v = p.a + p.b * p.lo;
            mpfr_mul_d(s.get(), m.get(), 2 * p.b, MPFR_RNDN);
            mpfr_add_d(s.get(), s.get(), v * v, MPFR_RNDN);
            if (mpfr_sgn(s.get()) < 0)
            {
                mpfr_set_zero(s.get(), 1);
            }
            mpfr_sqrt(s.get(), s.get(), MPFR_RNDN);
            mpfr_add_d(s.get(), s.get(), v, MPFR_RNDN);
            mpfr_mul_2ui(t.get(), m.get(), 1, MPFR_RNDN);
            mpfr_div(t.get(), t.get(), s.get(), MPFR_RNDN);
            mpfr_add_d(out.get(), t.get(), p.lo, MPFR_RNDN);
            break;
        }
        case DensityFormula::Reciprocal:
            mpfr_div_d(t.get(), m.get(), p.a, MPFR_RNDN);
            mpfr_expm1(t.get(), t.get(), MPFR_RNDN);
            mpfr_mul_d(t.get(), t.get(), 1 + p.lo, MPFR_RNDN);
            mpfr_add_d(out.get(), t.get(), p.lo, MPFR_RNDN);
            break;
        case DensityFormula::Arcsine:
            mpfr_add_d(t.get(), m.get(), arcsine_cdf(p.lo, p.a, p.b), MPFR_RNDN);
            mpfr_const_pi(s.get(), MPFR_RNDN);
            mpfr_mul(t.get(), t.get(), s.get(), MPFR_RNDN);
            mpfr_div_2ui(t.get(), t.get(), 1, MPFR_RNDN);
            mpfr_sin(t.get(), t.get(), MPFR_RNDN);
            mpfr_sqr(t.get(), t.get(), MPFR_RNDN);
            mpfr_mul_d(t.get(), t.get(), p.b - p.a, MPFR_RNDN);
            mpfr_add_d(out.get(), t.get(), p.a, MPFR_RNDN);
            break;
    }
    if (mpfr_cmp_d(out.get(), p.lo) < 0)
    {
        mpfr_set_d(out.get(), p.lo, MPFR_RNDN);
    }
    if (mpfr_cmp_d(out.get(), p.hi) > 0)
    {
        mpfr_set_d(out.get(), p.hi, MPFR_RNDN);
    }
}

//---------------------------------------------------------------------------//
double DensityModel::total_mass() const
{
    require_known("total_mass");
    return is_discrete() ? cum_probs_.back() : piece_mass_.back();
}

double DensityModel::supremum() const
{
    require_known("supremum");
    if (is_discrete())
    {
        return *std::max_element(probs_.begin(), probs_.end()) / bin_width();
    }
    double sup = 0;
    for (auto const& p : pieces_)
    {
        switch (p.formula)
        {
            case DensityFormula::Constant:
                sup = std::max(sup, p.a);
                break;
            case DensityFormula::Linear:
                sup = std::max({sup, p.value(p.lo), p.value(p.hi)});
                break;
            case DensityFormula::Reciprocal:
                sup = std::max(sup, p.value(p.lo));
                break;
            case DensityFormula::Arcsine:
                return inf;
        }
    }
    return sup;
}

double DensityModel::l2_mass() const
{
    require_known("l2_mass");
    if (is_discrete())
    {
        double acc = 0;
        for (double p : probs_)
        {
            acc += p * p;
        }
        return acc / bin_width();
    }
    double acc = 0;
    for (auto const& p : pieces_)
    {
        switch (p.formula)
        {
            case DensityFormula::Constant:
                acc += p.a * p.a * (p.hi - p.lo);
                break;
            case DensityFormula::Linear: {
                if (p.b == 0)
                {
                    acc += p.a * p.a * (p.hi - p.lo);
                }
                else
                {
                    auto cube = [](double v) { return v * v * v; };
                    acc += (cube(p.a + p.b * p.hi) - cube(p.a + p.b * p.lo)) / (3 * p.b);
                }
                break;
            }
            case DensityFormula::Reciprocal:
                acc += p.a * p.a * (1 / (1 + p.lo) - 1 / (1 + p.hi));
                break;
            case DensityFormula::Arcsine:
                return inf;
        }
    }
    return acc;
}

}  // namespace recurlab
