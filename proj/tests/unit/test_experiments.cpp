#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "recurlab/errors.hpp"
#include "recurlab/experiments.hpp"
#include "recurlab/limitlaw.hpp"
#include "recurlab/report.hpp"

using namespace recurlab;

namespace
{
ExperimentConfig small_doubling()
{
    ExperimentConfig cfg;
    cfg.n = 1024;
    cfg.samples = 2000;
    cfg.tau_grid = {0.5, 1, 2};
    cfg.k_max = 5;
    return cfg;
}
}  // namespace

TEST_CASE("config validation names the offending key")
{
    auto key_of = [](ExperimentConfig const& c) {
        try
        {
            c.validate();
        }
        catch (ConfigError const& e)
        {
            return e.key();
        }
        return std::string();
    };
    ExperimentConfig c;
    CHECK(key_of(c).empty());
    c.samples = 99;
    CHECK(key_of(c) == "samples");
    c = {};
    c.tau_grid = {1, 0.5};
    CHECK(key_of(c) == "tau_grid");
    c = {};
    c.subseq_base = 1.0;
    CHECK(key_of(c) == "subseq_base");
    c = {};
    c.map = "tent";
    CHECK(key_of(c) == "map");
    c = {};
    c.map = "cusp";
    c.precision_kind = "exact_dyadic";
    CHECK(key_of(c) == "precision.kind");
}

TEST_CASE("auto precision picks the dyadic engine for doubling only")
{
    ExperimentConfig c;
    CHECK(c.resolved_policy().kind == PrecisionKind::ExactDyadic);
    c.map = "cusp";
    CHECK(c.resolved_policy().kind == PrecisionKind::BigFixed);
}

TEST_CASE("pmf buckets sum to the completed samples")
{
    DistributionalResult r = run_distributional(small_doubling());
    REQUIRE_FALSE(r.failed);
    CHECK(r.pmf.samples + r.excluded == r.requested);
    for (auto const& row : r.pmf.counts)
    {
        REQUIRE(row.size() == 7);
        CHECK(std::accumulate(row.begin(), row.end(), std::int64_t{0}) == r.pmf.samples);
    }
    for (auto const& row : r.pmf.ci)
    {
        for (auto const& ci : row)
        {
            CHECK(ci.lo >= 0);
            CHECK(ci.hi <= 1);
            CHECK(ci.lo <= ci.hi);
        }
    }
}

TEST_CASE("results do not depend on the worker count")
{
    ExperimentConfig cfg = small_doubling();
    cfg.samples = 600;
    std::string reference;
    for (int w : {1, 2, 8})
    {
        cfg.workers = w;
        std::string csv = pmf_csv(run_distributional(cfg));
        if (reference.empty())
        {
            reference = csv;
        }
        CHECK(csv == reference);
    }

    ExperimentConfig beta;
    beta.map = "beta";
    beta.n = 512;
    beta.samples = 200;
    std::string b1;
    for (int w : {1, 2, 8})
    {
        beta.workers = w;
        std::string csv = pmf_csv(run_distributional(beta));
        if (b1.empty())
        {
            b1 = csv;
        }
        CHECK(csv == b1);
    }
}

TEST_CASE("degenerate intensity leaves almost every count at zero")
{
    ExperimentConfig cfg = small_doubling();
    cfg.tau_grid = {0.001};
    DistributionalResult r = run_distributional(cfg);
    CHECK(r.pmf.phat(0, 0) >= 0.99);
}

TEST_CASE("empirical mean approaches tau times the integral of rho squared")
{
    ExperimentConfig cfg;
    cfg.n = 4096;
    cfg.samples = 4000;
    cfg.tau_grid = {0.5, 1, 2};
    DistributionalResult r = run_distributional(cfg);
    for (auto const& s : r.per_tau)
    {
        double allowance = 4 * std::sqrt(s.variance) / std::sqrt(static_cast<double>(r.pmf.samples)) + 0.01;
        INFO("tau=" << s.tau << " mean=" << s.mean);
        CHECK(s.mean_theory == doctest::Approx(s.tau));
        CHECK(std::abs(s.mean - s.mean_theory) <= allowance);
    }
}

TEST_CASE("dyadic fast path and BigFixed give identical samples")
{
    ExperimentConfig fast = small_doubling();
    fast.samples = 100;
    fast.precision_kind = "exact_dyadic";
    ExperimentConfig slow = fast;
    slow.precision_kind = "bigfixed";
    DistributionalResult a = run_distributional(fast);
    DistributionalResult b = run_distributional(slow);
    CHECK(a.pmf.counts == b.pmf.counts);
}

TEST_CASE("hardware doubling orbits abort and fail the run")
{
    ExperimentConfig cfg = small_doubling();
    cfg.samples = 100;
    cfg.precision_kind = "hardware";
    DistributionalResult r = run_distributional(cfg);
    CHECK(r.failed);
    CHECK(r.excluded == 100);
    CHECK_FALSE(r.aborts.empty());
}

TEST_CASE("subsequence n_k = floor(a^k)")
{
    auto s = subsequence(1.5, 1000);
    REQUIRE_FALSE(s.empty());
    CHECK(s.front().second >= 16);
    CHECK(s.back().second <= 1000);
    for (auto const& [k, nk] : s)
    {
        CHECK(nk == static_cast<std::int64_t>(std::floor(std::pow(1.5, k))));
    }
    for (std::size_t i = 1; i < s.size(); ++i)
    {
        CHECK(s[i].second > s[i - 1].second);
    }
    auto dense = subsequence(1.01, 100);
    for (std::size_t i = 1; i < dense.size(); ++i)
    {
        CHECK(dense[i].second > dense[i - 1].second);
    }
}

TEST_CASE("almost-sure bookkeeping")
{
    ExperimentConfig cfg;
    cfg.as_n_max = 4096;
    cfg.as_paths = 200;
    AlmostSureResult r = run_almost_sure(cfg);
    REQUIRE_FALSE(r.failed);
    REQUIRE_FALSE(r.rows.empty());
    for (auto const& path : r.sample_paths)
    {
        for (std::size_t i = 1; i < path.size(); ++i)
        {
            CHECK(path[i] <= path[i - 1]);
        }
    }
    for (auto const& row : r.rows)
    {
        double l = std::log(static_cast<double>(row.n_k));
        CHECK(row.r_upper == doctest::Approx(std::log(l) / row.n_k));
        CHECK(row.s_lower == doctest::Approx(1 / (row.n_k * l * l)));
        CHECK(row.paths == 200);
        CHECK(row.upper_ci.contains(row.upper_freq()));
    }
    cfg.as_gamma = 2;
    AlmostSureResult g = run_almost_sure(cfg);
    double l = std::log(static_cast<double>(g.rows.back().n_k));
    CHECK(g.rows.back().r_upper == doctest::Approx(l * l / (2.0 * g.rows.back().n_k)));
}

TEST_CASE("A2 estimates against the branch oracle")
{
    ExperimentConfig cfg;
    cfg.a2_n_grid = {100, 10000};
    cfg.a2_samples = 20000;
    AssumptionReport rep = check_assumption_A2(cfg, 0.5);
    REQUIRE_FALSE(rep.failed);
    CHECK(rep.j_max[0] == a2_j_max(100));
    CHECK(a2_j_max(100) == static_cast<int>(std::ceil(std::pow(std::log(100.0), 2))));
    int outside = 0;
    int total = 0;
    for (auto const& e : rep.entries)
    {
        REQUIRE(e.oracle.has_value());
        if (e.j <= 14)
        {
            CHECK(*e.oracle == doctest::Approx(oracle::doubling_return_measure_by_branches(e.j, e.r)).epsilon(1e-10));
        }
        CHECK(e.mu_hat >= 0);
        CHECK(e.mu_hat <= 1);
        if (e.j <= 10)
        {
            ++total;
            outside += e.ci.contains(*e.oracle) ? 0 : 1;
        }
    }
    CHECK(total > 0);
    CHECK(outside <= 1 + total / 20);
    REQUIRE(rep.beta0.has_value());
    CHECK(*rep.beta0 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("A2 estimate vanishes with the radius")
{
    ExperimentConfig cfg;
    cfg.a2_samples = 2000;
    cfg.a2_n_grid = {1000000000};
    AssumptionReport rep = check_assumption_A2(cfg, 0.9);
    for (auto const& e : rep.entries)
    {
        CHECK(e.mu_hat == 0.0);
    }
}

TEST_CASE("E2 exact sum at the fixed point")
{
    CHECK(doubling_e2_exact(0, 0.01, 5) == doctest::Approx(0.0096875).epsilon(1e-13));
    CHECK(doubling_e2_exact(0, 0.01, 5) == doctest::Approx(oracle::doubling_e2_by_branches(0, 0.01, 5)).epsilon(1e-13));
    double zeta = std::sqrt(2.0) - 1;
    for (int p : {1, 3, 5, 8})
    {
        CHECK(doubling_e2_exact(zeta, 0.01, p)
              == doctest::Approx(oracle::doubling_e2_by_branches(zeta, 0.01, p)).epsilon(1e-12));
    }
    CHECK(doubling_e2_exact(0.3, 0.01, 0) == 0.0);
}

TEST_CASE("E2 Monte Carlo separates periodic and generic centres")
{
    ExperimentConfig cfg;
    cfg.e2_samples = 200000;
    E2Result fixed = chen_stein_e2(cfg, 0, 0.01, 5);
    REQUIRE(fixed.exact.has_value());
    CHECK(fixed.ci.contains(*fixed.exact));
    E2Result generic = chen_stein_e2(cfg, std::sqrt(2.0) - 1, 0.01, 5);
    CHECK(generic.estimate < fixed.estimate / 10);
    CHECK(generic.ci.contains(*generic.exact));
    E2Result none = chen_stein_e2(cfg, 0.5, 0.01, 0);
    CHECK(none.estimate == 0.0);
}

TEST_CASE("hitting counts cluster at the fixed point")
{
    ExperimentConfig cfg;
    cfg.n = 4096;
    cfg.samples = 2000;
    double r = 1.0 / cfg.n;
    Dispersion periodic = hitting_dispersion(cfg, 0.0, 2 * r);
    Dispersion generic = hitting_dispersion(cfg, std::sqrt(2.0) - 1, r);
    CHECK(generic.mean == doctest::Approx(2.0).epsilon(0.1));
    CHECK(periodic.mean == doctest::Approx(2.0).epsilon(0.15));
    CHECK(generic.index() == doctest::Approx(1.0).epsilon(0.15));
    CHECK(periodic.index() > 2.0);
}
