#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "density.hpp"
#include "maps.hpp"
#include "recurrence.hpp"

namespace recurlab
{
struct QuadratureConfig
{
    double abs_tol = 1e-10;
    int max_subdivisions = 4000;
    //! Extra panel boundaries on top of the density's own breakpoints.
    std::vector<double> splits;

    void validate() const;
};

struct PmfValue
{
    double value = 0;
    double error = 0;
    //! Tolerance not reached within max_subdivisions.
    bool flagged = false;
};

/*!
 * G(tau, k) = integral of tau^k rho^{k+1} e^{-rho tau} / k!.
 *
 * Closed-form densities use adaptive panels split at their breakpoints;
 * Ulam and histogram densities are summed bin by bin with no error term.
 */
PmfValue poisson_like_pmf(DensityModel const& density,
                          double tau,
                          int k,
                          QuadratureConfig const& cfg = {});

//! Doubling, golden beta and cusp have explicit G(tau, k).
bool has_closed_form_pmf(MapModel const& map);

//! Explicit G(tau, k); UnsupportedError for other maps.
double closed_form_pmf(MapModel const& map, double tau, int k);

struct EvtValue
{
    double value = 0;
    bool saturated = false;  //!< tau(u) overflowed; value pinned to 0
};

//! Limit of mu{M_n <= u / a_n + b_n}, i.e. G(tau(u), 0).
EvtValue evt_distribution(DensityModel const& density,
                          PsiSpec const& psi,
                          double u,
                          QuadratureConfig const& cfg = {});

enum class TailKind
{
    PowerLaw,
    Exponential,
};

struct TailFit
{
    TailKind kind = TailKind::Exponential;
    double exponent = 0;  //!< slope of log G against log tau
    double rate = 0;  //!< minus the slope of log G against tau
    double power_rss = 0;
    double exponential_rss = 0;
};

//! Fit log G(tau, k) on a geometric grid ending at tau_probe, by log tau and by tau.
TailFit tail_classification(DensityModel const& density,
                            int k,
                            double tau_probe,
                            QuadratureConfig const& cfg = {});

enum class Summability
{
    Convergent,
    Divergent,
    Undetermined,
};

char const* to_string(Summability s);

struct SummabilityResult
{
    double epsilon = 0;
    Summability verdict = Summability::Undetermined;
    double partial_sum = 0;
    //! Fitted power of k for algebraic envelopes; 0 for stretched exponentials.
    double envelope_exponent = 0;
    bool stretched = false;
};

/*!
 * Numerical diagnostic for sum_k integral rho e^{-eps k^g0 rho}.
 *
 * Terms are computed for k = 1..terms and the last decade is fitted both by a
 * stretched exponential in k^g0 and by a power of k. A power law must clear
 * -1 by a margin of 0.05 either way; anything closer is Undetermined.
 */
std::vector<SummabilityResult> as_summability_check(DensityModel const& density,
                                                    double gamma0,
                                                    std::vector<double> const& eps_grid,
                                                    std::int64_t terms = 16384);

enum class PmfMethod
{
    ClosedForm,
    Quadrature,
    BinSum,
};

char const* to_string(PmfMethod m);

struct LimitLawTable
{
    std::vector<double> tau_grid;
    int k_max = 0;
    //! values[t][k] for k = 0..k_max
    std::vector<std::vector<double>> values;
    std::vector<std::vector<PmfMethod>> method;
    std::vector<std::vector<double>> est_error;
    std::string density_label;

    //! Mass beyond k_max: 1 - sum of the stored row.
    double overflow(std::size_t t) const;
};

//! Table over tau_grid x {0..k_max}, closed forms first; rows evaluated concurrently.
LimitLawTable build_limit_law_table(MapModel const& map,
                                    DensityModel const& density,
                                    std::vector<double> const& tau_grid,
                                    int k_max,
                                    QuadratureConfig const& cfg = {},
                                    bool prefer_closed_form = true);

//! Smallest K with P(Poisson(rate) > K) < eps.
int poisson_tail_K(double rate, double eps = 1e-9);

//! Exact Lebesgue measure of {x in [0,1) : |2^j x mod 1 - x| <= r}.
double doubling_return_set_measure(int j, double r);

}  // namespace recurlab
