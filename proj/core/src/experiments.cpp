#include "recurlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <thread>

#include "recurlab/dyadic.hpp"
#include "recurlab/errors.hpp"
#include "recurlab/recurrence.hpp"

namespace recurlab
{
namespace
{
// Runs body(local, index) over [0, total) split into contiguous ranges, one
// per worker. Locals come back in worker order, so merges are deterministic.
template<class Local, class Body>
std::vector<Local> partitioned(int workers, std::int64_t total, Body const& body)
{
    int w = static_cast<int>(std::clamp<std::int64_t>(workers, 1, std::max<std::int64_t>(total, 1)));
    std::vector<Local> locals(static_cast<std::size_t>(w));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
    auto task = [&](int id) {
        try
        {
            std::int64_t begin = total * id / w;
            std::int64_t end = total * (id + 1) / w;
            for (std::int64_t i = begin; i < end; ++i)
            {
                body(locals[static_cast<std::size_t>(id)], i);
            }
        }
        catch (...)
        {
            errors[static_cast<std::size_t>(id)] = std::current_exception();
        }
    };
    if (w == 1)
    {
        task(0);
    }
    else
    {
        std::vector<std::thread> threads;
        for (int id = 0; id < w; ++id)
        {
            threads.emplace_back(task, id);
        }
        for (auto& t : threads)
        {
            t.join();
        }
    }
    for (auto& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
    return locals;
}

// Starting point for sample i, drawn from its own stream.
class OrbitRunner
{
  public:
    OrbitRunner(ExperimentConfig const& cfg, MapModel const& map, PrecisionPolicy policy, std::int64_t n)
        : cfg_(cfg), map_(map), policy_(policy), n_(n)
    {
        sampler_.burn_in = cfg.burn_in;
    }

    BigReal start(std::uint64_t index) const
    {
        auto engine = make_sample_engine(cfg_.seed, index, StreamTag::InitialPoint);
        if (map_.id() == MapId::Doubling)
        {
            return stream(engine).to_real();
        }
        BigReal x(starting_bits(map_, n_, policy_));
        sample_invariant(x, map_, engine, sampler_);
        return x;
    }

    RecurrenceSeries run(std::uint64_t index, RecurrenceRequest const& request) const
    {
        if (map_.id() == MapId::Doubling && policy_.kind == PrecisionKind::ExactDyadic
            && !request.center)
        {
            auto engine = make_sample_engine(cfg_.seed, index, StreamTag::InitialPoint);
            return observe_recurrence(stream(engine), n_, request, policy_.slack_bits);
        }
        return observe_recurrence(map_, start(index), n_, request, policy_);
    }

    RecurrenceSeries run_from(BigReal const& x0, RecurrenceRequest const& request) const
    {
        return observe_recurrence(map_, x0, n_, request, policy_);
    }

  private:
    DyadicStream stream(SampleEngine& engine) const
    {
        return DyadicStream::random(engine, static_cast<std::size_t>(n_ + policy_.slack_bits));
    }

    ExperimentConfig const& cfg_;
    MapModel const& map_;
    PrecisionPolicy policy_;
    std::int64_t n_;
    SamplerOptions sampler_;
};

std::string policy_label(PrecisionPolicy const& p)
{
    return to_string(p.kind);
}

}  // namespace

//---------------------------------------------------------------------------//
void ExperimentConfig::validate() const
{
    auto fail = [](char const* key, std::string const& msg) { throw ConfigError(key, msg); };
    static char const* const maps[] = {"doubling", "beta", "gauss", "mp", "cusp", "logistic"};
    if (std::find(std::begin(maps), std::end(maps), map) == std::end(maps))
    {
        fail("map", "unknown map '" + map + "'");
    }
    if (map == "beta" && !(beta > 1))
    {
        fail("beta", "must exceed 1");
    }
    if (map == "mp" && !(gamma > 0 && gamma < 1))
    {
        fail("gamma", "must lie in (0, 1)");
    }
    if (density_source != "closed_form" && density_source != "ulam" && density_source != "histogram")
    {
        fail("density.source", "expected closed_form, ulam or histogram");
    }
    if (ulam_bins < 16)
    {
        fail("ulam.bins", "must be at least 16");
    }
    if (!(ulam.tolerance > 0) || ulam.max_iterations < 1 || ulam.max_branches_per_bin < 1)
    {
        fail("ulam", "tolerance, max_iterations and max_branches_per_bin must be positive");
    }
    if (histogram_bins < 1 || histogram_samples < 1)
    {
        fail("density.histogram_bins", "histogram bins and samples must be positive");
    }
    if (n < 1)
    {
        fail("n", "must be at least 1");
    }
    if (samples < 100)
    {
        fail("samples", "must be at least 100");
    }
    if (tau_grid.empty())
    {
        fail("tau_grid", "must not be empty");
    }
    for (std::size_t i = 0; i < tau_grid.size(); ++i)
    {
        if (!(tau_grid[i] > 0) || !std::isfinite(tau_grid[i])
            || (i > 0 && !(tau_grid[i] > tau_grid[i - 1])))
        {
            fail("tau_grid", "must be positive and strictly ascending");
        }
    }
    if (k_max < 0)
    {
        fail("k_max", "must be nonnegative");
    }
    if (workers < 1)
    {
        fail("workers", "must be at least 1");
    }
    if (precision_kind != "auto" && precision_kind != "hardware" && precision_kind != "bigfixed"
        && precision_kind != "exact_dyadic")
    {
        fail("precision.kind", "expected auto, hardware, bigfixed or exact_dyadic");
    }
    if (precision_kind == "exact_dyadic" && map != "doubling")
    {
        fail("precision.kind", "exact_dyadic is only valid for the doubling map");
    }
    if (precision.bits != 0 && precision.bits < 128)
    {
        fail("precision.bits", "must be 0 (derived) or at least 128");
    }
    if (precision.slack_bits < 1 || precision.slack_bits > 1024)
    {
        fail("precision.slack_bits", "must lie in [1, 1024]");
    }
    if (!(precision.abort_fraction > 0))
    {
        fail("precision.abort_fraction", "must be positive");
    }
    if (precision.retries < 0)
    {
        fail("precision.retries", "must be nonnegative");
    }
    if (!(quadrature.abs_tol > 0))
    {
        fail("quadrature.abs_tol", "must be positive");
    }
    if (quadrature.max_subdivisions < 1)
    {
        fail("quadrature.max_subdivisions", "must be positive");
    }
    if (burn_in < 0)
    {
        fail("burn_in", "must be nonnegative");
    }
    if (!(abort_limit >= 0 && abort_limit <= 1))
    {
        fail("abort_limit", "must lie in [0, 1]");
    }
    if (!(subseq_base > 1))
    {
        fail("subseq_base", "must exceed 1");
    }
    if (!(as_constant > 0))
    {
        fail("as_constant", "must be positive");
    }
    if (!(as_gamma >= 0))
    {
        fail("as_gamma", "must be nonnegative");
    }
    if (as_n_max < 16)
    {
        fail("almost_sure.n_max", "must be at least 16");
    }
    if (as_paths < 1)
    {
        fail("almost_sure.paths", "must be positive");
    }
    if (!(a2_exponent > 0 && a2_exponent < 1))
    {
        fail("a2.a_exponent", "must lie in (0, 1)");
    }
    if (a2_n_grid.empty())
    {
        fail("a2.n_grid", "must not be empty");
    }
    for (auto v : a2_n_grid)
    {
        if (v < 2)
        {
            fail("a2.n_grid", "entries must be at least 2");
        }
    }
    if (a2_samples < 1 || !(a2_max_rel_width > 0))
    {
        fail("a2.samples", "samples and max_rel_width must be positive");
    }
    if (!(e2_radius >= 0) || e2_p < 0 || e2_samples < 1)
    {
        fail("e2", "radius and p must be nonnegative, samples positive");
    }
    if (!(tv_threshold > 0))
    {
        fail("compare.tv_threshold", "must be positive");
    }
}

MapModel ExperimentConfig::make_map() const
{
    return MapModel::from_name(map, beta, gamma);
}

PrecisionPolicy ExperimentConfig::resolved_policy() const
{
    PrecisionPolicy p = precision;
    if (precision_kind == "auto")
    {
        p.kind = map == "doubling" ? PrecisionKind::ExactDyadic : PrecisionKind::BigFixed;
    }
    else
    {
        p.kind = precision_kind_from_string(precision_kind);
    }
    return p;
}

//---------------------------------------------------------------------------//
double EmpiricalPmf::phat(std::size_t t, std::size_t k) const
{
    return samples > 0 ? static_cast<double>(counts.at(t).at(k)) / static_cast<double>(samples) : 0.0;
}

double DistributionalResult::max_tv() const
{
    double m = 0;
    for (auto const& s : per_tau)
    {
        m = std::max(m, s.tv);
    }
    return m;
}

DensityModel theory_density(ExperimentConfig const& cfg, MapModel const& map)
{
    if (cfg.density_source == "ulam")
    {
        return ulam_density(map, cfg.ulam_bins, cfg.ulam);
    }
    if (cfg.density_source == "histogram")
    {
        SamplerOptions opts;
        opts.burn_in = cfg.burn_in;
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(cfg.histogram_samples));
        for (std::int64_t i = 0; i < cfg.histogram_samples; ++i)
        {
            auto engine = make_sample_engine(cfg.seed, static_cast<std::uint64_t>(i), StreamTag::Diagnostic);
            xs.push_back(sample_invariant(map, engine, opts));
        }
        return histogram_density(xs, map.lo(), map.hi(), cfg.histogram_bins,
                                 "histogram(" + map.name() + ")");
    }
    if (!map.has_closed_form_density())
    {
        throw ConfigError("density.source",
                          "map " + map.name() + " has no closed-form density; use ulam or histogram");
    }
    return map.density();
}

DistributionalResult run_distributional(ExperimentConfig const& cfg)
{
    cfg.validate();
    MapModel map = cfg.make_map();
    PrecisionPolicy policy = cfg.resolved_policy();
    policy.validate(map);

    struct Theory
    {
        LimitLawTable table;
        std::string label;
        double l2 = 0;
    };
    auto theory = std::async(std::launch::async, [&] {
        DensityModel density = theory_density(cfg, map);
        Theory t;
        t.table = build_limit_law_table(map, density, cfg.tau_grid, cfg.k_max, cfg.quadrature,
                                        cfg.density_source == "closed_form");
        t.label = t.table.density_label;
        t.l2 = density.l2_mass();
        return t;
    });

    std::size_t nt = cfg.tau_grid.size();
    std::size_t nk = static_cast<std::size_t>(cfg.k_max) + 2;
    RecurrenceRequest request;
    for (double tau : cfg.tau_grid)
    {
        request.radii.push_back(tau / (2.0 * static_cast<double>(cfg.n)));
    }

    struct Local
    {
        std::vector<std::vector<std::int64_t>> counts;
        std::vector<std::int64_t> sum;
        std::vector<std::int64_t> sum_sq;
        std::int64_t done = 0;
        std::int64_t ties = 0;
        std::vector<AbortRecord> aborts;
    };
    OrbitRunner runner(cfg, map, policy, cfg.n);
    auto locals = partitioned<Local>(cfg.workers, cfg.samples, [&](Local& local, std::int64_t i) {
        if (local.counts.empty())
        {
            local.counts.assign(nt, std::vector<std::int64_t>(nk, 0));
            local.sum.assign(nt, 0);
            local.sum_sq.assign(nt, 0);
        }
        RecurrenceSeries series;
        try
        {
            series = runner.run(static_cast<std::uint64_t>(i), request);
        }
        catch (PrecisionAbort const& e)
        {
            local.aborts.push_back({i, e.step()});
            return;
        }
        for (std::size_t t = 0; t < nt; ++t)
        {
            std::int64_t r = series.counts[t];
            local.counts[t][std::min<std::size_t>(static_cast<std::size_t>(r), nk - 1)] += 1;
            local.sum[t] += r;
            local.sum_sq[t] += r * r;
        }
        local.ties += series.ties;
        ++local.done;
    });

    DistributionalResult result;
    result.requested = cfg.samples;
    result.precision = policy_label(policy);
    EmpiricalPmf& pmf = result.pmf;
    pmf.tau_grid = cfg.tau_grid;
    pmf.k_max = cfg.k_max;
    pmf.counts.assign(nt, std::vector<std::int64_t>(nk, 0));
    std::vector<std::int64_t> sum(nt, 0);
    std::vector<std::int64_t> sum_sq(nt, 0);
    for (auto const& local : locals)
    {
        for (std::size_t t = 0; t < nt && !local.counts.empty(); ++t)
        {
            for (std::size_t k = 0; k < nk; ++k)
            {
                pmf.counts[t][k] += local.counts[t][k];
            }
            sum[t] += local.sum[t];
            sum_sq[t] += local.sum_sq[t];
        }
        pmf.samples += local.done;
        result.ties += local.ties;
        result.aborts.insert(result.aborts.end(), local.aborts.begin(), local.aborts.end());
    }
    result.excluded = static_cast<std::int64_t>(result.aborts.size());

    Theory th = theory.get();
    result.theory = std::move(th.table);
    result.density_label = th.label;

    pmf.ci.assign(nt, {});
    for (std::size_t t = 0; t < nt; ++t)
    {
        TauSummary s;
        s.tau = cfg.tau_grid[t];
        s.mean_theory = s.tau * th.l2;
        double n = static_cast<double>(pmf.samples);
        for (std::size_t k = 0; k < nk; ++k)
        {
            pmf.ci[t].push_back(pmf.samples > 0 ? wilson_interval(pmf.counts[t][k], pmf.samples)
                                                : Interval{0, 1});
            double g = k + 1 < nk ? result.theory.values[t][k] : result.theory.overflow(t);
            double dev = std::abs(pmf.phat(t, k) - g);
            s.tv += dev / 2;
            if (k + 1 < nk)
            {
                s.max_dev = std::max(s.max_dev, dev);
            }
        }
        if (pmf.samples > 1)
        {
            s.mean = static_cast<double>(sum[t]) / n;
            s.variance = (static_cast<double>(sum_sq[t]) - n * s.mean * s.mean) / (n - 1);
        }
        result.per_tau.push_back(s);
    }

    double limit = cfg.abort_limit * static_cast<double>(cfg.samples);
    if (static_cast<double>(result.excluded) > limit)
    {
        result.failed = true;
        result.failure = "precision aborts in " + std::to_string(result.excluded) + " of "
                         + std::to_string(cfg.samples) + " samples exceed the abort limit";
    }
    return result;
}

//---------------------------------------------------------------------------//
std::vector<std::pair<int, std::int64_t>> subsequence(double a, std::int64_t n_max)
{
    if (!(a > 1))
    {
        throw DomainError("subsequence base must exceed 1");
    }
    std::vector<std::pair<int, std::int64_t>> out;
    for (int k = 1;; ++k)
    {
        double v = std::floor(std::pow(a, k));
        if (v > static_cast<double>(n_max))
        {
            break;
        }
        auto nk = static_cast<std::int64_t>(v);
        if (nk >= 16 && (out.empty() || nk > out.back().second))
        {
            out.emplace_back(k, nk);
        }
    }
    return out;
}

AlmostSureResult run_almost_sure(ExperimentConfig const& cfg)
{
    cfg.validate();
    MapModel map = cfg.make_map();
    PrecisionPolicy policy = cfg.resolved_policy();
    policy.validate(map);

    auto ks = subsequence(cfg.subseq_base, cfg.as_n_max);
    if (ks.empty())
    {
        throw ConfigError("almost_sure.n_max", "no checkpoint n_k = floor(a^k) in [16, n_max]");
    }
    std::int64_t n_last = ks.back().second;
    RecurrenceRequest request;
    std::vector<double> upper;
    std::vector<double> lower;
    for (auto const& [k, nk] : ks)
    {
        double n = static_cast<double>(nk);
        double ln = std::log(n);
        request.checkpoints.push_back(nk);
        upper.push_back(cfg.as_gamma > 0 ? std::pow(ln, cfg.as_gamma) / (2 * n)
                                         : cfg.as_constant * std::log(ln) / n);
        lower.push_back(1.0 / (n * ln * ln));
    }

    constexpr std::size_t kept_paths = 8;
    struct Local
    {
        std::vector<std::int64_t> up;
        std::vector<std::int64_t> low;
        std::int64_t done = 0;
        std::int64_t aborted = 0;
        std::vector<std::pair<std::int64_t, std::vector<double>>> kept;
    };
    // Without radii the doubling fast path reports window distances, exact to
    // 2^-64, which is far below every threshold used here.
    OrbitRunner runner(cfg, map, policy, n_last);
    std::size_t nc = ks.size();
    auto locals = partitioned<Local>(cfg.workers, cfg.as_paths, [&](Local& local, std::int64_t i) {
        if (local.up.empty())
        {
            local.up.assign(nc, 0);
            local.low.assign(nc, 0);
        }
        RecurrenceSeries series;
        try
        {
            series = runner.run(static_cast<std::uint64_t>(i), request);
        }
        catch (PrecisionAbort const&)
        {
            ++local.aborted;
            return;
        }
        for (std::size_t c = 0; c < nc; ++c)
        {
            double m = series.min_distance[c];
            local.up[c] += m >= upper[c];
            local.low[c] += m <= lower[c];
        }
        if (static_cast<std::size_t>(i) < kept_paths)
        {
            local.kept.emplace_back(i, series.min_distance);
        }
        ++local.done;
    });

    AlmostSureResult result;
    result.requested = cfg.as_paths;
    std::vector<std::int64_t> up(nc, 0);
    std::vector<std::int64_t> low(nc, 0);
    std::int64_t done = 0;
    for (auto const& local : locals)
    {
        for (std::size_t c = 0; c < nc && !local.up.empty(); ++c)
        {
            up[c] += local.up[c];
            low[c] += local.low[c];
        }
        done += local.done;
        result.excluded += local.aborted;
        for (auto const& kept : local.kept)
        {
            result.sample_paths.push_back(kept.second);
        }
    }
    for (std::size_t c = 0; c < nc; ++c)
    {
        AlmostSureRow row;
        row.k_index = ks[c].first;
        row.n_k = ks[c].second;
        row.r_upper = upper[c];
        row.s_lower = lower[c];
        row.upper_violations = up[c];
        row.lower_violations = low[c];
        row.paths = done;
        if (done > 0)
        {
            row.upper_ci = wilson_interval(up[c], done);
            row.lower_ci = wilson_interval(low[c], done);
        }
        result.rows.push_back(row);
    }
    if (static_cast<double>(result.excluded) > cfg.abort_limit * static_cast<double>(cfg.as_paths))
    {
        result.failed = true;
        result.failure = "precision aborts in " + std::to_string(result.excluded) + " of "
                         + std::to_string(cfg.as_paths) + " paths exceed the abort limit";
    }
    return result;
}

//---------------------------------------------------------------------------//
int a2_j_max(std::int64_t n)
{
    if (n < 2)
    {
        throw DomainError("A2 diagnostic needs n >= 2");
    }
    double l = std::log(static_cast<double>(n));
    return static_cast<int>(std::ceil(l * l));
}

AssumptionReport check_assumption_A2(ExperimentConfig const& cfg, double a_exponent)
{
    ExperimentConfig local_cfg = cfg;
    local_cfg.a2_exponent = a_exponent;
    local_cfg.validate();
    MapModel map = cfg.make_map();
    PrecisionPolicy policy = cfg.resolved_policy();
    policy.validate(map);

    AssumptionReport report;
    report.a_exponent = a_exponent;
    report.n_grid = cfg.a2_n_grid;
    std::vector<double> radius_of;
    int j_top = 0;
    for (auto n : cfg.a2_n_grid)
    {
        report.j_max.push_back(a2_j_max(n));
        j_top = std::max(j_top, report.j_max.back());
        radius_of.push_back(std::pow(static_cast<double>(n), -a_exponent));
    }
    RecurrenceRequest request;
    request.radii = radius_of;
    std::sort(request.radii.begin(), request.radii.end());
    request.radii.erase(std::unique(request.radii.begin(), request.radii.end()), request.radii.end());
    request.record_hits = true;
    std::vector<std::size_t> slot;
    for (double r : radius_of)
    {
        slot.push_back(static_cast<std::size_t>(
            std::lower_bound(request.radii.begin(), request.radii.end(), r) - request.radii.begin()));
    }

    std::size_t ng = cfg.a2_n_grid.size();
    struct Local
    {
        std::vector<std::vector<std::int64_t>> hits;
        std::int64_t done = 0;
        std::int64_t aborted = 0;
    };
    OrbitRunner runner(cfg, map, policy, j_top);
    auto locals = partitioned<Local>(cfg.workers, cfg.a2_samples, [&](Local& local, std::int64_t i) {
        if (local.hits.empty())
        {
            local.hits.assign(ng, std::vector<std::int64_t>(static_cast<std::size_t>(j_top) + 1, 0));
        }
        RecurrenceSeries series;
        try
        {
            series = runner.run(static_cast<std::uint64_t>(i), request);
        }
        catch (PrecisionAbort const&)
        {
            ++local.aborted;
            return;
        }
        for (std::size_t g = 0; g < ng; ++g)
        {
            for (auto j : series.hit_times[slot[g]])
            {
                if (j <= report.j_max[g])
                {
                    ++local.hits[g][static_cast<std::size_t>(j)];
                }
            }
        }
        ++local.done;
    });

    std::vector<std::vector<std::int64_t>> hits(ng, std::vector<std::int64_t>(static_cast<std::size_t>(j_top) + 1, 0));
    std::int64_t done = 0;
    for (auto const& local : locals)
    {
        for (std::size_t g = 0; g < ng && !local.hits.empty(); ++g)
        {
            for (std::size_t j = 0; j < hits[g].size(); ++j)
            {
                hits[g][j] += local.hits[g][j];
            }
        }
        done += local.done;
        report.excluded += local.aborted;
    }
    if (done == 0)
    {
        report.failed = true;
        report.failure = "every sample aborted";
        return report;
    }

    for (std::size_t g = 0; g < ng; ++g)
    {
        for (int j = 1; j <= report.j_max[g]; ++j)
        {
            A2Entry e;
            e.n = cfg.a2_n_grid[g];
            e.j = j;
            e.r = radius_of[g];
            e.hits = hits[g][static_cast<std::size_t>(j)];
            e.samples = done;
            e.mu_hat = static_cast<double>(e.hits) / static_cast<double>(done);
            e.ci = wilson_interval(e.hits, done);
            if (map.id() == MapId::Doubling)
            {
                e.oracle = doubling_return_set_measure(j, e.r);
            }
            e.flagged = e.mu_hat <= 0 || e.ci.width() / e.mu_hat > cfg.a2_max_rel_width;
            report.entries.push_back(e);
        }
    }

    // Pooled within-j slope of log mu_hat on log r (fixed effects per j).
    double sxy = 0;
    double sxx = 0;
    for (int j = 1; j <= j_top; ++j)
    {
        std::vector<double> xs;
        std::vector<double> ys;
        for (auto const& e : report.entries)
        {
            if (e.j == j && !e.flagged)
            {
                xs.push_back(std::log(e.r));
                ys.push_back(std::log(e.mu_hat));
            }
        }
        if (xs.size() < 2)
        {
            continue;
        }
        double mx = 0;
        double my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
        {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        report.fit_points += static_cast<int>(xs.size());
    }
    if (sxx > 0)
    {
        report.beta0 = sxy / sxx;
    }
    if (static_cast<double>(report.excluded) > cfg.abort_limit * static_cast<double>(cfg.a2_samples))
    {
        report.failed = true;
        report.failure = "precision aborts exceed the abort limit";
    }
    return report;
}

//---------------------------------------------------------------------------//
double doubling_e2_exact(double center, double r, int p)
{
    if (p < 0 || !(r >= 0))
    {
        throw DomainError("E2 needs p >= 0 and r >= 0");
    }
    if (p > 40)
    {
        throw DomainError("exact E2 enumerates 2^p branches; p must be at most 40");
    }
    double a = std::max(0.0, center - r);
    double b = std::min(1.0, center + r);
    if (!(b > a))
    {
        return 0;
    }
    double total = 0;
    for (int j = 1; j <= p; ++j)
    {
        double L = std::ldexp(1.0, j);
        // f^-j [a, b] = union of [(m + a)/L, (m + b)/L]; only m near A matter.
        auto m_lo = static_cast<std::int64_t>(std::max(0.0, std::floor(a * L - b)));
        auto m_hi = static_cast<std::int64_t>(std::min(L - 1, std::ceil(b * L - a)));
        for (std::int64_t m = m_lo; m <= m_hi; ++m)
        {
            double lo = std::max(a, (static_cast<double>(m) + a) / L);
            double hi = std::min(b, (static_cast<double>(m) + b) / L);
            total += std::max(0.0, hi - lo);
        }
    }
    return total;
}

E2Result chen_stein_e2(ExperimentConfig const& cfg, double center, double r, int p)
{
    cfg.validate();
    MapModel map = cfg.make_map();
    PrecisionPolicy policy = cfg.resolved_policy();
    policy.validate(map);
    if (p < 0 || !(r >= 0))
    {
        throw DomainError("E2 needs p >= 0 and r >= 0");
    }
    if (!map.contains(center))
    {
        throw DomainError("E2 center outside the map domain");
    }
    E2Result result;
    result.center = center;
    result.r = r;
    result.p = p;
    result.samples = cfg.e2_samples;
    if (map.id() == MapId::Doubling && p <= 40)
    {
        result.exact = doubling_e2_exact(center, r, p);
    }
    if (p == 0)
    {
        result.ci = {0, 0};
        return result;
    }

    RecurrenceRequest request;
    request.radii = {r};
    request.center = center;
    request.record_hits = true;
    struct Local
    {
        std::vector<std::int64_t> hits;
    };
    OrbitRunner runner(cfg, map, policy, p);
    BigReal zeta(center, 64);
    auto locals = partitioned<Local>(cfg.workers, cfg.e2_samples, [&](Local& local, std::int64_t i) {
        if (local.hits.empty())
        {
            local.hits.assign(static_cast<std::size_t>(p) + 1, 0);
        }
        BigReal x0 = runner.start(static_cast<std::uint64_t>(i));
        BigReal d(128);
        abs_difference(d, x0, zeta);
        if (mpfr_cmp_d(d.get(), r) > 0)
        {
            return;
        }
        RecurrenceSeries series = runner.run_from(x0, request);
        for (auto j : series.hit_times[0])
        {
            ++local.hits[static_cast<std::size_t>(j)];
        }
    });
    std::vector<std::int64_t> hits(static_cast<std::size_t>(p) + 1, 0);
    for (auto const& local : locals)
    {
        for (std::size_t j = 0; j < hits.size() && !local.hits.empty(); ++j)
        {
            hits[j] += local.hits[j];
        }
    }
    result.ci = {0, 0};
    for (int j = 1; j <= p; ++j)
    {
        auto h = hits[static_cast<std::size_t>(j)];
        double est = static_cast<double>(h) / static_cast<double>(cfg.e2_samples);
        result.per_j.push_back(est);
        result.estimate += est;
        Interval ci = wilson_interval(h, cfg.e2_samples);
        result.ci.lo += ci.lo;
        result.ci.hi += ci.hi;
    }
    return result;
}

Dispersion hitting_dispersion(ExperimentConfig const& cfg, double center, double r)
{
    cfg.validate();
    MapModel map = cfg.make_map();
    PrecisionPolicy policy = cfg.resolved_policy();
    policy.validate(map);
    RecurrenceRequest request;
    request.radii = {r};
    request.center = center;
    struct Local
    {
        std::int64_t sum = 0;
        std::int64_t sum_sq = 0;
        std::int64_t done = 0;
    };
    OrbitRunner runner(cfg, map, policy, cfg.n);
    auto locals = partitioned<Local>(cfg.workers, cfg.samples, [&](Local& local, std::int64_t i) {
        std::int64_t c = runner.run(static_cast<std::uint64_t>(i), request).counts[0];
        local.sum += c;
        local.sum_sq += c * c;
        ++local.done;
    });
    Dispersion out;
    out.center = center;
    out.r = r;
    std::int64_t sum = 0;
    std::int64_t sum_sq = 0;
    std::int64_t done = 0;
    for (auto const& l : locals)
    {
        sum += l.sum;
        sum_sq += l.sum_sq;
        done += l.done;
    }
    if (done > 1)
    {
        double n = static_cast<double>(done);
        out.mean = static_cast<double>(sum) / n;
        out.variance = (static_cast<double>(sum_sq) - n * out.mean * out.mean) / (n - 1);
    }
    return out;
}

}  // namespace recurlab
