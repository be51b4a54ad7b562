#include "recurlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "recurlab/errors.hpp"

#ifndef RECURLAB_VERSION
#    define RECURLAB_VERSION "0.0.0"
#endif
#ifndef RECURLAB_GIT_REVISION
#    define RECURLAB_GIT_REVISION "unknown"
#endif

namespace recurlab
{
namespace
{
std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// JSON has no infinities; they are written as null.
nlohmann::json jnum(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json jinterval(Interval const& i)
{
    return {jnum(i.lo), jnum(i.hi)};
}

}  // namespace

std::string version_string()
{
    return RECURLAB_VERSION;
}

std::string git_revision()
{
    return RECURLAB_GIT_REVISION;
}

std::string pmf_csv(DistributionalResult const& result)
{
    auto const& pmf = result.pmf;
    auto const& th = result.theory;
    std::string out = "tau,k,count,phat,ci_lo,ci_hi,G,method\n";
    for (std::size_t t = 0; t < pmf.tau_grid.size(); ++t)
    {
        for (std::size_t k = 0; k < pmf.counts[t].size(); ++k)
        {
            bool overflow = static_cast<int>(k) > pmf.k_max;
            double g = overflow ? th.overflow(t) : th.values[t][k];
            char const* method = overflow ? "Tail" : to_string(th.method[t][k]);
            out += num(pmf.tau_grid[t]) + "," + std::to_string(k) + ","
                   + std::to_string(pmf.counts[t][k]) + "," + num(pmf.phat(t, k)) + ","
                   + num(pmf.ci[t][k].lo) + "," + num(pmf.ci[t][k].hi) + "," + num(g) + ","
                   + method + "\n";
        }
    }
    return out;
}

std::string as_csv(AlmostSureResult const& result)
{
    std::string out = "k_index,n_k,r_upper,s_lower,viol_upper_freq,viol_lower_freq,ci_lo,ci_hi\n";
    for (auto const& row : result.rows)
    {
        out += std::to_string(row.k_index) + "," + std::to_string(row.n_k) + "," + num(row.r_upper)
               + "," + num(row.s_lower) + "," + num(row.upper_freq()) + "," + num(row.lower_freq())
               + "," + num(row.upper_ci.lo) + "," + num(row.upper_ci.hi) + "\n";
    }
    return out;
}

std::string a2_csv(AssumptionReport const& report)
{
    std::string out = "j,r,mu_hat,ci_lo,ci_hi,oracle_if_any\n";
    for (auto const& e : report.entries)
    {
        out += std::to_string(e.j) + "," + num(e.r) + "," + num(e.mu_hat) + "," + num(e.ci.lo) + ","
               + num(e.ci.hi) + "," + (e.oracle ? num(*e.oracle) : std::string()) + "\n";
    }
    return out;
}

std::string limitlaw_csv(LimitLawTable const& table)
{
    std::string out = "tau,k,G,method,est_error\n";
    for (std::size_t t = 0; t < table.tau_grid.size(); ++t)
    {
        for (std::size_t k = 0; k < table.values[t].size(); ++k)
        {
            out += num(table.tau_grid[t]) + "," + std::to_string(k) + "," + num(table.values[t][k])
                   + "," + to_string(table.method[t][k]) + "," + num(table.est_error[t][k]) + "\n";
        }
    }
    return out;
}

void write_text_file(std::string const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
    if (!out)
    {
        throw std::runtime_error("failed writing " + path);
    }
}

//---------------------------------------------------------------------------//
struct RunReport::Impl
{
    nlohmann::ordered_json doc;
};

RunReport::RunReport(std::string verb, ExperimentConfig const& cfg) : impl_(std::make_unique<Impl>())
{
    auto& d = impl_->doc;
    d["verb"] = verb;
    d["version"] = version_string();
    d["git_revision"] = git_revision();
    d["failed"] = false;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (auto const& [k, v] : config_to_flat(cfg))
    {
        config[k] = v;
    }
    d["config"] = config;
}

RunReport::~RunReport() = default;
RunReport::RunReport(RunReport&&) noexcept = default;
RunReport& RunReport::operator=(RunReport&&) noexcept = default;

void RunReport::add(DistributionalResult const& r)
{
    nlohmann::ordered_json j;
    j["density"] = r.density_label;
    j["precision"] = r.precision;
    j["samples_requested"] = r.requested;
    j["samples_used"] = r.pmf.samples;
    j["aborts"] = {{"excluded", r.excluded}, {"first", nlohmann::json::array()}};
    for (std::size_t i = 0; i < r.aborts.size() && i < 20; ++i)
    {
        j["aborts"]["first"].push_back({{"sample", r.aborts[i].sample}, {"step", r.aborts[i].step}});
    }
    j["ties"] = r.ties;
    j["max_tv"] = jnum(r.max_tv());
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < r.per_tau.size(); ++t)
    {
        auto const& s = r.per_tau[t];
        nlohmann::ordered_json row;
        row["tau"] = s.tau;
        row["tv"] = jnum(s.tv);
        row["max_dev"] = jnum(s.max_dev);
        row["mean"] = jnum(s.mean);
        row["variance"] = jnum(s.variance);
        row["mean_theory"] = jnum(s.mean_theory);
        auto pmf = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < r.pmf.counts[t].size(); ++k)
        {
            bool overflow = static_cast<int>(k) > r.pmf.k_max;
            pmf.push_back({{"k", k},
                           {"count", r.pmf.counts[t][k]},
                           {"phat", r.pmf.phat(t, k)},
                           {"ci", jinterval(r.pmf.ci[t][k])},
                           {"G", jnum(overflow ? r.theory.overflow(t) : r.theory.values[t][k])},
                           {"method", overflow ? "Tail" : to_string(r.theory.method[t][k])}});
        }
        row["pmf"] = pmf;
        rows.push_back(row);
    }
    j["per_tau"] = rows;
    impl_->doc["distributional"] = j;
    if (r.failed)
    {
        set_failed(r.failure);
    }
}

void RunReport::add(AlmostSureResult const& r)
{
    nlohmann::ordered_json j;
    j["paths_requested"] = r.requested;
    j["aborts"] = {{"excluded", r.excluded}};
    auto rows = nlohmann::ordered_json::array();
    for (auto const& row : r.rows)
    {
        rows.push_back({{"k_index", row.k_index},
                        {"n_k", row.n_k},
                        {"r_upper", row.r_upper},
                        {"s_lower", row.s_lower},
                        {"paths", row.paths},
                        {"viol_upper_freq", row.upper_freq()},
                        {"viol_upper_ci", jinterval(row.upper_ci)},
                        {"viol_lower_freq", row.lower_freq()},
                        {"viol_lower_ci", jinterval(row.lower_ci)}});
    }
    j["rows"] = rows;
    auto paths = nlohmann::ordered_json::array();
    for (auto const& p : r.sample_paths)
    {
        paths.push_back(p);
    }
    j["sample_min_distance"] = paths;
    impl_->doc["almost_sure"] = j;
    if (r.failed)
    {
        set_failed(r.failure);
    }
}

void RunReport::add(AssumptionReport const& r)
{
    nlohmann::ordered_json j;
    j["a_exponent"] = r.a_exponent;
    j["n_grid"] = r.n_grid;
    j["j_max"] = r.j_max;
    j["beta0"] = r.beta0 ? jnum(*r.beta0) : nlohmann::json(nullptr);
    j["fit_points"] = r.fit_points;
    j["aborts"] = {{"excluded", r.excluded}};
    auto rows = nlohmann::ordered_json::array();
    for (auto const& e : r.entries)
    {
        rows.push_back({{"n", e.n},
                        {"j", e.j},
                        {"r", e.r},
                        {"mu_hat", e.mu_hat},
                        {"ci", jinterval(e.ci)},
                        {"oracle", e.oracle ? jnum(*e.oracle) : nlohmann::json(nullptr)},
                        {"flagged", e.flagged}});
    }
    j["entries"] = rows;
    impl_->doc["a2"] = j;
    if (r.failed)
    {
        set_failed(r.failure);
    }
}

void RunReport::add(E2Result const& r)
{
    nlohmann::ordered_json j;
    j["center"] = r.center;
    j["r"] = r.r;
    j["p"] = r.p;
    j["samples"] = r.samples;
    j["estimate"] = r.estimate;
    j["ci"] = jinterval(r.ci);
    j["per_j"] = r.per_j;
    j["exact"] = r.exact ? jnum(*r.exact) : nlohmann::json(nullptr);
    impl_->doc["e2"].push_back(j);
}

void RunReport::add(LimitLawTable const& table)
{
    nlohmann::ordered_json j;
    j["density"] = table.density_label;
    j["tau_grid"] = table.tau_grid;
    j["k_max"] = table.k_max;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < table.tau_grid.size(); ++t)
    {
        for (std::size_t k = 0; k < table.values[t].size(); ++k)
        {
            rows.push_back({{"tau", table.tau_grid[t]},
                            {"k", k},
                            {"G", jnum(table.values[t][k])},
                            {"method", to_string(table.method[t][k])},
                            {"est_error", jnum(table.est_error[t][k])}});
        }
    }
    j["values"] = rows;
    impl_->doc["limitlaw"] = j;
}

void RunReport::add_tail(std::string const& label, TailFit const& fit)
{
    impl_->doc["tail"][label] = {{"kind", fit.kind == TailKind::PowerLaw ? "PowerLaw" : "Exponential"},
                                 {"exponent", jnum(fit.exponent)},
                                 {"rate", jnum(fit.rate)}};
}

void RunReport::add_summability(double gamma0, std::vector<SummabilityResult> const& results)
{
    auto rows = nlohmann::ordered_json::array();
    for (auto const& r : results)
    {
        rows.push_back({{"epsilon", r.epsilon},
                        {"verdict", to_string(r.verdict)},
                        {"partial_sum", jnum(r.partial_sum)},
                        {"envelope", r.stretched ? "stretched_exponential" : "power"},
                        {"envelope_exponent", jnum(r.envelope_exponent)}});
    }
    impl_->doc["summability"] = {{"gamma0", gamma0}, {"results", rows}};
}

void RunReport::set_threshold_breach(std::string const& message)
{
    impl_->doc["threshold_breach"] = message;
}

void RunReport::set_failed(std::string const& message)
{
    impl_->doc["failed"] = true;
    impl_->doc["failure"] = message;
}

bool RunReport::failed() const noexcept
{
    return impl_->doc["failed"].get<bool>();
}

std::string RunReport::dump() const
{
    return impl_->doc.dump(2) + "\n";
}

void RunReport::write(std::string const& path) const
{
    write_text_file(path, dump());
}

}  // namespace recurlab
