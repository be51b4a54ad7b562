#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "big_real.hpp"
#include "maps.hpp"

namespace recurlab
{
enum class PrecisionKind
{
    Hardware,
    BigFixed,
    ExactDyadic,
};

char const* to_string(PrecisionKind kind);
PrecisionKind precision_kind_from_string(std::string const& name);

struct PrecisionPolicy
{
    PrecisionKind kind = PrecisionKind::BigFixed;
    //! BigFixed working bits; 0 derives them from the orbit budget.
    long bits = 0;
    int slack_bits = 64;
    //! Lower the working precision as fewer steps remain.
    bool taper = true;
    //! Abort once the error estimate exceeds this fraction of the watch radius.
    double abort_fraction = 0.125;
    //! Extra fraction of the per-step growth added to derived budgets.
    double headroom = 0;
    //! Reruns after a precision abort, each with 0.25 more headroom
    //! (derived BigFixed budgets only).
    int retries = 2;

    //! Throws ContractError for combinations the map cannot honour.
    void validate(MapModel const& map) const;
};

struct OrbitBudget
{
    std::int64_t n = 0;
    long bits_required = 0;
    //! Bound on |emitted - exact|; empty when the budget is best-effort.
    std::optional<double> guaranteed_abs_error;
    //! Error growth per step (nats) used to size the budget: log L, or the
    //! Lyapunov estimate for best-effort budgets.
    double growth_rate = 0;

    bool best_effort() const noexcept { return !guaranteed_abs_error.has_value(); }
};

/*!
 * Bits needed to follow n steps of the map.
 *
 * Uniformly expanding maps get ceil(n log2 L) + slack bits and a guarantee of
 * 2^-slack. Maps with unbounded derivative get ceil(n lambda / ln 2) +
 * 4 slack from a Lyapunov estimate and are flagged best-effort.
 */
OrbitBudget required_bits(MapModel const& map, std::int64_t n, int slack_bits);

//! Mean log|f'| over a hardware pseudo-orbit (deterministic seed).
double estimate_lyapunov(MapModel const& map, std::int64_t steps = 1000000);

using OrbitObserver = std::function<void(std::int64_t, BigReal const&)>;

struct OrbitOutcome
{
    BigReal final_state;
    double error_estimate = 0;  //!< absolute, at the last step
    long initial_bits = 0;
};

/*!
 * Iterate x0 for n steps, calling observer(j, x_j) for j = 1..n.
 *
 * The precision of x0 states how many of its bits are meaningful. A running
 * monitor propagates the error estimate through |f'| and the per-step
 * rounding; once it exceeds max(abort_fraction * watch_radius, 2^-slack) the
 * iteration throws PrecisionAbort carrying the step index. Emitted values
 * always lie in the closed domain.
 */
OrbitOutcome iterate_stream(MapModel const& map,
                            BigReal const& x0,
                            std::int64_t n,
                            PrecisionPolicy const& policy,
                            double watch_radius,
                            OrbitObserver const& observer);

//! x0 as the engine actually starts from it (rounded to the first working precision).
BigReal orbit_start(MapModel const& map,
                    BigReal const& x0,
                    std::int64_t n,
                    PrecisionPolicy const& policy);

//! Bits a starting point should carry so that every retry of the policy can use them.
long starting_bits(MapModel const& map, std::int64_t n, PrecisionPolicy const& policy);

//! Working precision before step i of n (exposed for tests and benchmarks).
class PrecisionSchedule
{
  public:
    PrecisionSchedule(MapModel const& map, std::int64_t n, PrecisionPolicy const& policy);

    long initial_bits() const noexcept { return bits_at(0); }
    long bits_at(std::int64_t step) const noexcept;
    OrbitBudget const& budget() const noexcept { return budget_; }

  private:
    PrecisionPolicy policy_;
    OrbitBudget budget_;
    std::int64_t n_;
    double bits_per_step_ = 0;
    long fixed_extra_ = 0;
    long guard_ = 0;
};

}  // namespace recurlab
