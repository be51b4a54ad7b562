#include "recurlab/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recurlab/errors.hpp"

namespace recurlab
{
namespace
{
void validate_request(RecurrenceRequest const& request, std::int64_t n)
{
    if (n < 1)
    {
        throw DomainError("orbit length must be at least 1");
    }
    for (std::size_t i = 0; i < request.radii.size(); ++i)
    {
        double r = request.radii[i];
        if (!(r >= 0) || !std::isfinite(r))
        {
            throw DomainError("radius must be finite and nonnegative");
        }
        if (i > 0 && r < request.radii[i - 1])
        {
            throw DomainError("radii must be ascending");
        }
    }
    for (std::size_t i = 0; i < request.checkpoints.size(); ++i)
    {
        auto c = request.checkpoints[i];
        if (c < 1 || c > n || (i > 0 && c <= request.checkpoints[i - 1]))
        {
            throw DomainError("checkpoints must be strictly ascending within [1, n]");
        }
    }
}

// Shared by every path so the hit/tie decision depends only on the exact
// distance, never on how it was produced.
class Classifier
{
  public:
    Classifier(RecurrenceRequest const& request, int slack_bits)
        : radii_(request.radii)
        , eps_(std::ldexp(1.0, -slack_bits))
        , t_(256)
        , eps_big_(std::ldexp(1.0, -slack_bits), 64)
    {
        r_max_ = radii_.empty() ? -1.0 : radii_.back();
    }

    double reach() const noexcept { return r_max_ + eps_; }

    template<class OnHit>
    void classify(BigReal const& d, double approx, std::int64_t& ties, OnHit&& on_hit)
    {
        if (radii_.empty() || approx > r_max_ * (1 + 1e-12) + 2 * eps_)
        {
            return;
        }
        for (std::size_t i = 0; i < radii_.size(); ++i)
        {
            double r = radii_[i];
            if (approx > r * (1 + 1e-12) + 2 * eps_)
            {
                continue;
            }
            if (approx < r * (1 - 1e-12) - 2 * eps_)
            {
                on_hit(i);
                continue;
            }
            mpfr_sub_d(t_.get(), d.get(), r, MPFR_RNDN);
            if (mpfr_cmpabs(t_.get(), eps_big_.get()) <= 0)
            {
                ++ties;
                on_hit(i);
            }
            else if (mpfr_sgn(t_.get()) < 0)
            {
                on_hit(i);
            }
        }
    }

  private:
    std::vector<double> radii_;
    double r_max_;
    double eps_;
    BigReal t_;
    BigReal eps_big_;
};

class Recorder
{
  public:
    Recorder(RecurrenceRequest const& request, std::int64_t n, int slack_bits)
        : request_(request), classifier_(request, slack_bits)
    {
        series_.n = n;
        series_.radii = request.radii;
        series_.counts.assign(request.radii.size(), 0);
        if (request.record_hits)
        {
            series_.hit_times.resize(request.radii.size());
        }
        series_.checkpoints = request.checkpoints;
        series_.min_distance.reserve(request.checkpoints.size());
    }

    Classifier const& classifier() const noexcept { return classifier_; }

    void record(std::int64_t j, BigReal const& d, double approx)
    {
        classifier_.classify(d, approx, series_.ties, [&](std::size_t i) {
            ++series_.counts[i];
            if (request_.record_hits)
            {
                series_.hit_times[i].push_back(j);
            }
        });
        advance(j, approx);
    }

    // Step known to be outside every ball; only the minimum is updated.
    void skip(std::int64_t j, double approx) { advance(j, approx); }

    RecurrenceSeries take() { return std::move(series_); }

  private:
    void advance(std::int64_t j, double approx)
    {
        min_ = std::min(min_, approx);
        if (next_ < series_.checkpoints.size() && series_.checkpoints[next_] == j)
        {
            series_.min_distance.push_back(min_);
            ++next_;
        }
    }

    RecurrenceRequest const& request_;
    Classifier classifier_;
    RecurrenceSeries series_;
    double min_ = std::numeric_limits<double>::infinity();
    std::size_t next_ = 0;
};

}  // namespace

//---------------------------------------------------------------------------//
RecurrenceSeries observe_recurrence(MapModel const& map,
                                    BigReal const& x0,
                                    std::int64_t n,
                                    RecurrenceRequest const& request,
                                    PrecisionPolicy const& policy)
{
    validate_request(request, n);
    policy.validate(map);
    if (map.id() == MapId::Doubling && policy.kind == PrecisionKind::ExactDyadic
        && !request.center)
    {
        auto bits = static_cast<std::size_t>(n + policy.slack_bits);
        return observe_recurrence(DyadicStream::from_real(x0, bits), n, request,
                                  policy.slack_bits);
    }

    std::optional<BigReal> target;
    if (request.center)
    {
        double c = *request.center;
        if (!(c >= map.lo() && c <= map.hi()))
        {
            throw DomainError("target point outside the map domain");
        }
        target = BigReal(c, 64);
    }

    bool derived = policy.kind == PrecisionKind::BigFixed && policy.bits == 0;
    PrecisionPolicy attempt_policy = policy;
    BigReal d(128);
    double watch = request.radii.empty() ? 0.0 : request.radii.front();
    for (int attempt = 0;; ++attempt)
    {
        Recorder recorder(request, n, policy.slack_bits);
        BigReal center = target ? *target : orbit_start(map, x0, n, attempt_policy);
        try
        {
            iterate_stream(map, x0, n, attempt_policy, watch,
                           [&](std::int64_t j, BigReal const& x) {
                               abs_difference(d, x, center);
                               recorder.record(j, d, d.to_double());
                           });
            return recorder.take();
        }
        catch (PrecisionAbort const&)
        {
            if (!derived || attempt >= policy.retries)
            {
                throw;
            }
            attempt_policy.headroom += 0.25;
        }
    }
}

RecurrenceSeries observe_recurrence(DyadicStream const& stream,
                                    std::int64_t n,
                                    RecurrenceRequest const& request,
                                    int slack_bits)
{
    validate_request(request, n);
    Recorder recorder(request, n, slack_bits);

    constexpr long double two64 = 18446744073709551616.0L;
    std::uint64_t cap = 0;
    if (!request.radii.empty())
    {
        long double reach = std::ceil(static_cast<long double>(recorder.classifier().reach()) * two64)
                            + 1;
        cap = reach >= two64 ? std::numeric_limits<std::uint64_t>::max()
                             : static_cast<std::uint64_t>(reach);
    }

    BigReal x0 = stream.to_real();
    BigReal xj(x0.precision());
    BigReal d(128);
    std::uint64_t w0 = stream.window64(0);
    for (std::int64_t j = 1; j <= n; ++j)
    {
        std::uint64_t wj = stream.window64(static_cast<std::size_t>(j));
        std::uint64_t gap = wj > w0 ? wj - w0 : w0 - wj;
        double approx = std::ldexp(static_cast<double>(gap), -64);
        if (!request.radii.empty() && gap <= cap)
        {
            mpfr_mul_2ui(xj.get(), x0.get(), static_cast<unsigned long>(j), MPFR_RNDN);
            mpfr_frac(xj.get(), xj.get(), MPFR_RNDN);
            abs_difference(d, xj, x0);
            recorder.record(j, d, d.to_double());
        }
        else
        {
            recorder.skip(j, approx);
        }
    }
    return recorder.take();
}

RecurrenceSeries recurrence_count(MapModel const& map,
                                  BigReal const& x0,
                                  std::int64_t n,
                                  std::vector<double> const& radii,
                                  PrecisionPolicy const& policy,
                                  bool record_hits)
{
    if (radii.empty())
    {
        throw ContractError("recurrence_count needs at least one radius");
    }
    RecurrenceRequest request;
    request.radii = radii;
    request.record_hits = record_hits;
    return observe_recurrence(map, x0, n, request, policy);
}

std::vector<double> min_distance_process(MapModel const& map,
                                         BigReal const& x0,
                                         std::int64_t n,
                                         std::vector<std::int64_t> const& checkpoints,
                                         PrecisionPolicy const& policy)
{
    RecurrenceRequest request;
    request.checkpoints = checkpoints;
    return observe_recurrence(map, x0, n, request, policy).min_distance;
}

std::int64_t hitting_count(MapModel const& map,
                           BigReal const& x0,
                           std::int64_t n,
                           double center,
                           double r,
                           PrecisionPolicy const& policy)
{
    RecurrenceRequest request;
    request.radii = {r};
    request.center = center;
    return observe_recurrence(map, x0, n, request, policy).counts.front();
}

//---------------------------------------------------------------------------//
void PsiSpec::validate() const
{
    if (kind == PsiKind::Power && !(alpha > 0 && std::isfinite(alpha)))
    {
        throw DomainError("power observable needs alpha > 0");
    }
}

double PsiSpec::operator()(double z) const
{
    if (z < 0)
    {
        throw DomainError("observable evaluated at a negative distance");
    }
    if (z == 0)
    {
        return std::numeric_limits<double>::infinity();
    }
    return kind == PsiKind::NegLog ? -std::log(z) : std::pow(z, -alpha);
}

double PsiSpec::scale(std::int64_t n) const
{
    return kind == PsiKind::NegLog ? 1.0 : std::pow(2.0 * static_cast<double>(n), -alpha);
}

double PsiSpec::shift(std::int64_t n) const
{
    return kind == PsiKind::NegLog ? std::log(2.0 * static_cast<double>(n)) : 0.0;
}

double PsiSpec::tau(double u) const
{
    if (kind == PsiKind::NegLog)
    {
        return std::exp(-u);
    }
    if (u <= 0)
    {
        return std::numeric_limits<double>::infinity();
    }
    return std::pow(u, -1.0 / alpha);
}

PsiMaximum max_psi_process(MapModel const& map,
                           BigReal const& x0,
                           std::int64_t n,
                           PsiSpec const& psi,
                           PrecisionPolicy const& policy)
{
    psi.validate();
    double m = min_distance_process(map, x0, n, {n}, policy).front();
    PsiMaximum out;
    out.value = psi(m);
    out.infinite = std::isinf(out.value);
    return out;
}

}  // namespace recurlab
