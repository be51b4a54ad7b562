#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "big_real.hpp"
#include "density.hpp"
#include "rng.hpp"

namespace recurlab
{
enum class MapId
{
    Doubling,
    Beta,
    Gauss,
    MannevillePomeau,
    Cusp,
    Logistic,
};

enum class ExpansionKind
{
    UniformBound,
    Unbounded,
};

struct Expansion
{
    ExpansionKind kind;
    double bound;  //!< sup |f'| when kind is UniformBound
};

//! Monotone continuous piece of a map; \c index selects the formula.
struct MapBranch
{
    double lo;
    double hi;
    long index;
};

/*!
 * One of the catalogued interval maps together with its parameters.
 *
 * Mod-one maps reduce into [0, 1). Distances are measured with the absolute
 * value on the ambient interval, never the circle metric.
 */
class MapModel
{
  public:
    static MapModel doubling();
    static MapModel beta(double beta);
    //! Beta transformation with beta^{-1} = beta - 1.
    static MapModel golden_beta();
    static MapModel gauss();
    static MapModel manneville_pomeau(double gamma);
    static MapModel cusp();
    static MapModel logistic();

    //! Catalog lookup by config name ("doubling", "beta", "gauss", "mp", "cusp", "logistic").
    static MapModel from_name(std::string_view name, double beta, double gamma);

    MapId id() const noexcept { return id_; }
    std::string const& name() const noexcept { return name_; }
    double parameter() const noexcept { return param_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }
    bool is_golden() const noexcept { return golden_; }

    Expansion expansion() const noexcept;
    //! Catalog density; Unknown for maps without a closed form.
    DensityModel const& density() const noexcept { return density_; }
    bool has_closed_form_density() const noexcept
    {
        return density_.kind() == DensityKind::ClosedForm;
    }

    //! f(x) in hardware precision, clamped to the domain.
    double apply(double x) const;
    //! |f'(x)|, +inf at derivative singularities.
    double derivative_abs(double x) const;
    //! Bound on the absolute round-off of one step at unit relative precision.
    double rounding_scale(double x) const;

    //! Monotone pieces meeting [a, b], at most \c max_branches of them.
    std::vector<MapBranch> branches_in(double a, double b, long max_branches) const;
    double branch_forward(MapBranch const& br, double x) const;
    //! Inverse of a branch; NaN when no closed form (callers bisect).
    double branch_inverse(MapBranch const& br, double y) const;

  private:
    MapId id_ = MapId::Doubling;
    std::string name_;
    double param_ = 0;
    double lo_ = 0;
    double hi_ = 1;
    bool golden_ = false;
    DensityModel density_;
};

/*!
 * In-place high-precision application of a map.
 *
 * Holds map constants and scratch values so the orbit loop never allocates
 * unless the working precision changes.
 */
class MapStepper
{
  public:
    MapStepper(MapModel const& map, mpfr_prec_t max_precision);

    //! x <- f(x) at x's precision; returns true if any operation rounded.
    bool step(BigReal& x);

  private:
    MapModel const* map_;
    BigReal beta_;
    BigReal gamma_;
    BigReal t_;
    int sqrt_depth_ = -1;  // gamma = 2^-depth when >= 0

    void fit_scratch(mpfr_prec_t precision);
};

//! Golden mean (1 + sqrt 5)/2 rounded up at the given precision.
BigReal golden_ratio(mpfr_prec_t precision);

//---------------------------------------------------------------------------//
// Catalog operations
//---------------------------------------------------------------------------//

//! f(x) at the precision of x; throws DomainError outside the domain.
BigReal eval_map(MapModel const& map, BigReal const& x);
double eval_map(MapModel const& map, double x);

//! rho(x), right-continuous at jumps; UnsupportedError for Unknown densities.
double eval_density(MapModel const& map, double x);

struct SamplerOptions
{
    std::int64_t burn_in = 10000;
};

/*!
 * Draw x ~ mu.
 *
 * Maps with a closed-form density use its inverse CDF; the others iterate a
 * Lebesgue-uniform seed for \c burn_in steps in hardware precision.
 */
double sample_invariant(MapModel const& map,
                        SampleEngine& engine,
                        SamplerOptions const& options = {});

/*!
 * High-precision draw: every bit of \c out is random or determined by the
 * inverse CDF, so the point is a generic real at that precision.
 */
void sample_invariant(BigReal& out,
                      MapModel const& map,
                      SampleEngine& engine,
                      SamplerOptions const& options = {});

struct UlamOptions
{
    long max_iterations = 200000;
    double tolerance = 1e-12;  //!< L1 change between power iterates
    long max_branches_per_bin = 1 << 20;
};

/*!
 * Ulam estimate of the invariant density on \c bins equal bins.
 *
 * Transition weights are exact preimage lengths of bins under each monotone
 * branch; the fixed point comes from power iteration. Throws
 * ConvergenceError with the final residual when the iteration stalls.
 */
DensityModel ulam_density(MapModel const& map, long bins, UlamOptions const& options = {});

//! Piecewise-constant density from samples on equal bins.
DensityModel histogram_density(std::vector<double> const& samples,
                               double lo,
                               double hi,
                               long bins,
                               std::string label);

}  // namespace recurlab
