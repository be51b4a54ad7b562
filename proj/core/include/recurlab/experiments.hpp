#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limitlaw.hpp"
#include "maps.hpp"
#include "orbit.hpp"
#include "stats.hpp"

namespace recurlab
{
struct ExperimentConfig
{
    std::string map = "doubling";
    double beta = 1.6180339887498949;
    double gamma = 0.25;

    //! "closed_form", "ulam" or "histogram"
    std::string density_source = "closed_form";
    long ulam_bins = 4096;
    UlamOptions ulam;
    long histogram_bins = 256;
    std::int64_t histogram_samples = 200000;

    std::int64_t n = 4096;
    std::int64_t samples = 20000;
    std::vector<double> tau_grid{0.5, 1.0, 2.0};
    int k_max = 8;
    std::uint64_t seed = 20261016;
    int workers = 1;

    //! "auto" picks exact_dyadic for the doubling map and bigfixed otherwise.
    std::string precision_kind = "auto";
    PrecisionPolicy precision;
    QuadratureConfig quadrature;
    std::int64_t burn_in = 10000;
    //! Largest tolerated fraction of samples lost to precision aborts.
    double abort_limit = 0.001;

    double subseq_base = 1.5;
    double as_constant = 1.0;
    //! > 0 switches the upper rule to (log n)^gamma / 2n.
    double as_gamma = 0;
    std::int64_t as_n_max = 65536;
    std::int64_t as_paths = 2000;
    double as_upper_limit = 0.03;
    double as_lower_limit = 0.02;

    double a2_exponent = 0.5;
    std::vector<std::int64_t> a2_n_grid{10000, 1000000};
    std::int64_t a2_samples = 200000;
    double a2_max_rel_width = 0.5;

    double e2_center = 0;
    double e2_radius = 0.01;
    int e2_p = 5;
    std::int64_t e2_samples = 1000000;

    double tv_threshold = 0.02;

    //! Throws ConfigError naming the offending key.
    void validate() const;
    MapModel make_map() const;
    PrecisionPolicy resolved_policy() const;
};

//---------------------------------------------------------------------------//
struct EmpiricalPmf
{
    std::vector<double> tau_grid;
    int k_max = 0;
    //! counts[t][k] for k = 0..k_max, then the overflow bucket k > k_max
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t samples = 0;  //!< samples that completed
    std::vector<std::vector<Interval>> ci;

    double phat(std::size_t t, std::size_t k) const;
};

struct TauSummary
{
    double tau = 0;
    double tv = 0;  //!< including the overflow bucket
    double max_dev = 0;  //!< over k = 0..k_max
    double mean = 0;
    double variance = 0;
    double mean_theory = 0;  //!< tau * integral of rho^2
};

struct AbortRecord
{
    std::int64_t sample = 0;
    std::int64_t step = 0;
};

struct DistributionalResult
{
    EmpiricalPmf pmf;
    LimitLawTable theory;
    std::vector<TauSummary> per_tau;
    std::int64_t requested = 0;
    std::int64_t excluded = 0;
    std::int64_t ties = 0;
    std::vector<AbortRecord> aborts;
    std::string density_label;
    std::string precision;
    bool failed = false;
    std::string failure;

    double max_tv() const;
};

//! Monte Carlo pmf of R_n(tau/2n, x) for x ~ mu against G(tau, k).
DistributionalResult run_distributional(ExperimentConfig const& cfg);

//! Density used for theory: catalog closed form, Ulam or histogram estimate.
DensityModel theory_density(ExperimentConfig const& cfg, MapModel const& map);

//---------------------------------------------------------------------------//
struct AlmostSureRow
{
    int k_index = 0;
    std::int64_t n_k = 0;
    double r_upper = 0;
    double s_lower = 0;
    std::int64_t upper_violations = 0;
    std::int64_t lower_violations = 0;
    std::int64_t paths = 0;
    Interval upper_ci;
    Interval lower_ci;

    double upper_freq() const { return paths ? double(upper_violations) / paths : 0.0; }
    double lower_freq() const { return paths ? double(lower_violations) / paths : 0.0; }
};

struct AlmostSureResult
{
    std::vector<AlmostSureRow> rows;
    //! Minimum distance at every checkpoint for the first few paths.
    std::vector<std::vector<double>> sample_paths;
    std::int64_t requested = 0;
    std::int64_t excluded = 0;
    bool failed = false;
    std::string failure;
};

//! Checkpoints n_k = floor(a^k) with 16 <= n_k <= n_max, deduplicated.
std::vector<std::pair<int, std::int64_t>> subsequence(double a, std::int64_t n_max);

AlmostSureResult run_almost_sure(ExperimentConfig const& cfg);

//---------------------------------------------------------------------------//
struct A2Entry
{
    std::int64_t n = 0;
    int j = 0;
    double r = 0;
    std::int64_t hits = 0;
    std::int64_t samples = 0;
    double mu_hat = 0;
    Interval ci;
    std::optional<double> oracle;
    bool flagged = false;  //!< CI wider than the configured relative limit
};

struct AssumptionReport
{
    double a_exponent = 0;
    std::vector<std::int64_t> n_grid;
    std::vector<int> j_max;
    std::vector<A2Entry> entries;
    std::optional<double> beta0;
    int fit_points = 0;
    std::int64_t excluded = 0;
    bool failed = false;
    std::string failure;
};

//! j_max = ceil((log n)^2)
int a2_j_max(std::int64_t n);

AssumptionReport check_assumption_A2(ExperimentConfig const& cfg, double a_exponent);

//---------------------------------------------------------------------------//
struct E2Result
{
    double center = 0;
    double r = 0;
    int p = 0;
    std::int64_t samples = 0;
    double estimate = 0;
    Interval ci;  //!< sum of per-j Wilson bounds
    std::vector<double> per_j;
    std::optional<double> exact;
};

//! Exact sum_j |A cap f^-j A| for the doubling map and A = [c - r, c + r] cap [0, 1].
double doubling_e2_exact(double center, double r, int p);

E2Result chen_stein_e2(ExperimentConfig const& cfg, double center, double r, int p);

struct Dispersion
{
    double center = 0;
    double r = 0;
    double mean = 0;
    double variance = 0;
    double index() const { return mean > 0 ? variance / mean : 0.0; }
};

//! Variance-to-mean ratio of N_n(B(center, r), x) over x ~ mu.
Dispersion hitting_dispersion(ExperimentConfig const& cfg, double center, double r);

}  // namespace recurlab
