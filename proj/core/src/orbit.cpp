#include "recurlab/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "recurlab/errors.hpp"

namespace recurlab
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

//! log2(2^le * growth + rounding), all in the log domain.
double propagate(double le, double growth, double rounding)
{
    double a = std::isinf(growth) ? inf : le + std::log2(growth);
    if (rounding <= 0)
    {
        return a;
    }
    double b = std::log2(rounding);
    double hi = std::max(a, b);
    return std::isinf(hi) ? hi : hi + std::log2(1 + std::exp2(-std::abs(a - b)));
}

long ceil_to(double v)
{
    return static_cast<long>(std::ceil(v - 1e-9));
}

}  // namespace

PrecisionAbort::PrecisionAbort(std::int64_t step, double error_estimate, double threshold)
    : std::runtime_error("precision exhausted at step " + std::to_string(step)
                         + ": error estimate " + std::to_string(error_estimate)
                         + " exceeds " + std::to_string(threshold))
    , step_(step)
    , error_estimate_(error_estimate)
    , threshold_(threshold)
{
}

char const* to_string(PrecisionKind kind)
{
    switch (kind)
    {
        case PrecisionKind::Hardware:
            return "hardware";
        case PrecisionKind::BigFixed:
            return "bigfixed";
        case PrecisionKind::ExactDyadic:
            return "exact_dyadic";
    }
    return "?";
}

PrecisionKind precision_kind_from_string(std::string const& name)
{
    if (name == "hardware")
        return PrecisionKind::Hardware;
    if (name == "bigfixed")
        return PrecisionKind::BigFixed;
    if (name == "exact_dyadic")
        return PrecisionKind::ExactDyadic;
    throw ContractError("unknown precision kind '" + name + "'");
}

void PrecisionPolicy::validate(MapModel const& map) const
{
    if (kind == PrecisionKind::ExactDyadic && map.id() != MapId::Doubling)
    {
        throw ContractError("exact_dyadic precision is only valid for the doubling map");
    }
    if (kind == PrecisionKind::BigFixed && bits != 0 && bits < 128)
    {
        throw ContractError("bigfixed precision needs at least 128 bits");
    }
    if (slack_bits < 1 || slack_bits > 1024)
    {
        throw ContractError("slack_bits must lie in [1, 1024]");
    }
    if (!(abort_fraction > 0))
    {
        throw ContractError("abort_fraction must be positive");
    }
    if (!(headroom >= 0) || retries < 0)
    {
        throw ContractError("headroom and retries must be nonnegative");
    }
}

//---------------------------------------------------------------------------//
double estimate_lyapunov(MapModel const& map, std::int64_t steps)
{
    static std::mutex mutex;
    static std::map<std::tuple<MapId, double, std::int64_t>, double> cache;
    auto key = std::make_tuple(map.id(), map.parameter(), steps);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end())
        {
            return it->second;
        }
    }
    auto engine = make_sample_engine(0x4c79617075ULL, 0, StreamTag::Lyapunov);
    double x = sample_invariant(map, engine);
    double acc = 0;
    std::int64_t used = 0;
    for (std::int64_t i = 0; i < steps; ++i)
    {
        double d = map.derivative_abs(x);
        if (std::isfinite(d) && d > 0)
        {
            acc += std::log(d);
            ++used;
        }
        x = map.apply(x);
    }
    double lambda = used > 0 ? std::max(acc / static_cast<double>(used), 0.0) : 0.0;
    std::lock_guard lock(mutex);
    cache[key] = lambda;
    return lambda;
}

OrbitBudget required_bits(MapModel const& map, std::int64_t n, int slack_bits)
{
    if (n < 1)
    {
        throw ContractError("required_bits needs n >= 1");
    }
    OrbitBudget budget;
    budget.n = n;
    auto expansion = map.expansion();
    if (expansion.kind == ExpansionKind::UniformBound)
    {
        budget.growth_rate = std::log(expansion.bound);
        budget.bits_required
            = ceil_to(static_cast<double>(n) * std::log2(expansion.bound)) + slack_bits;
        budget.guaranteed_abs_error = std::ldexp(1.0, -slack_bits);
    }
    else
    {
        budget.growth_rate = estimate_lyapunov(map);
        budget.bits_required
            = ceil_to(static_cast<double>(n) * budget.growth_rate / std::numbers::ln2)
              + 4 * slack_bits;
    }
    return budget;
}

//---------------------------------------------------------------------------//
PrecisionSchedule::PrecisionSchedule(MapModel const& map,
                                     std::int64_t n,
                                     PrecisionPolicy const& policy)
    : policy_(policy), n_(n)
{
    budget_ = required_bits(map, std::max<std::int64_t>(n, 1), policy.slack_bits);
    // Best-effort budgets carry a margin for orbit-to-orbit spread of the
    // log-derivative sum around n * lambda.
    double margin = budget_.best_effort() ? 0.15 : 0.0;
    bits_per_step_ = budget_.growth_rate / std::numbers::ln2 * (1 + margin + policy.headroom);
    fixed_extra_ = (budget_.best_effort() ? 4L : 1L) * policy.slack_bits;
    // Covers the geometric sum of per-step round-off over n steps.
    guard_ = static_cast<long>(std::ceil(std::log2(static_cast<double>(n) + 1))) + 4;
}

long PrecisionSchedule::bits_at(std::int64_t step) const noexcept
{
    switch (policy_.kind)
    {
        case PrecisionKind::Hardware:
            return 53;
        case PrecisionKind::ExactDyadic:
            return static_cast<long>(n_) + policy_.slack_bits;
        case PrecisionKind::BigFixed:
            break;
    }
    if (policy_.bits > 0)
    {
        return policy_.bits;
    }
    std::int64_t remaining = policy_.taper ? n_ - step : n_;
    long raw = ceil_to(static_cast<double>(std::max<std::int64_t>(remaining, 0)) * bits_per_step_);
    // Change precision in 64-bit steps so scratch values rarely reallocate.
    long quantized = (raw + 63) / 64 * 64;
    return std::max(128L, quantized + fixed_extra_ + guard_);
}

long starting_bits(MapModel const& map, std::int64_t n, PrecisionPolicy const& policy)
{
    PrecisionPolicy widest = policy;
    if (policy.kind == PrecisionKind::BigFixed && policy.bits == 0)
    {
        widest.headroom += 0.25 * policy.retries;
    }
    return PrecisionSchedule(map, n, widest).initial_bits();
}

//---------------------------------------------------------------------------//
BigReal orbit_start(MapModel const& map,
                    BigReal const& x0,
                    std::int64_t n,
                    PrecisionPolicy const& policy)
{
    if (policy.kind == PrecisionKind::Hardware)
    {
        return BigReal(x0.to_double(), 53);
    }
    PrecisionSchedule schedule(map, n, policy);
    BigReal x(schedule.bits_at(0));
    mpfr_set(x.get(), x0.get(),
             policy.kind == PrecisionKind::ExactDyadic ? MPFR_RNDZ : MPFR_RNDN);
    return x;
}

OrbitOutcome iterate_stream(MapModel const& map,
                            BigReal const& x0,
                            std::int64_t n,
                            PrecisionPolicy const& policy,
                            double watch_radius,
                            OrbitObserver const& observer)
{
    policy.validate(map);
    if (mpfr_nan_p(x0.get()) || mpfr_cmp_d(x0.get(), map.lo()) < 0
        || mpfr_cmp_d(x0.get(), map.hi()) > 0)
    {
        throw DomainError("iterate_stream: x0 outside the domain of " + map.name());
    }
    if (n < 0)
    {
        throw ContractError("iterate_stream: n must be nonnegative");
    }
    PrecisionSchedule schedule(map, n, policy);
    double threshold
        = std::max(policy.abort_fraction * watch_radius, std::ldexp(1.0, -policy.slack_bits));
    double log_threshold = std::log2(threshold);
    long meaningful = static_cast<long>(x0.precision());

    if (policy.kind == PrecisionKind::Hardware)
    {
        double x = x0.to_double();
        double le = -static_cast<double>(std::min(meaningful, 53L));
        bool exact_map = map.id() == MapId::Doubling;
        BigReal view(53);
        for (std::int64_t j = 1; j <= n; ++j)
        {
            double growth = map.derivative_abs(x);
            double rounding = exact_map ? 0 : 0x1.0p-53 * map.rounding_scale(x);
            x = map.apply(x);
            le = propagate(le, growth, rounding);
            if (le > log_threshold)
            {
                throw PrecisionAbort(j, std::exp2(le), threshold);
            }
            mpfr_set_d(view.get(), x, MPFR_RNDN);
            observer(j, view);
        }
        mpfr_set_d(view.get(), x, MPFR_RNDN);
        return {view, std::exp2(le), 53};
    }

    long p0 = schedule.bits_at(0);
    BigReal x = orbit_start(map, x0, n, policy);
    double le = -static_cast<double>(std::min(meaningful, p0));
    if (policy.kind == PrecisionKind::ExactDyadic)
    {
        // x0 is the dyadic rational itself; only truncation to p0 bits loses anything.
        le = mpfr_equal_p(x.get(), x0.get()) ? -std::numeric_limits<double>::infinity()
                                              : -static_cast<double>(p0);
    }
    MapStepper stepper(map, p0);
    for (std::int64_t j = 1; j <= n; ++j)
    {
        long p = schedule.bits_at(j - 1);
        if (p < x.precision() && x.round_to(p))
        {
            le = propagate(le, 1.0, std::ldexp(1.0, -p));
        }
        double xd = x.to_double();
        double growth = map.derivative_abs(xd);
        double rounding = stepper.step(x) ? std::ldexp(map.rounding_scale(xd), -p) : 0.0;
        le = propagate(le, growth, rounding);
        if (le > log_threshold)
        {
            throw PrecisionAbort(j, std::exp2(le), threshold);
        }
        observer(j, x);
    }
    return {std::move(x), std::exp2(le), p0};
}

}  // namespace recurlab
