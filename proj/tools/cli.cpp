#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "recurlab/config.hpp"
#include "recurlab/errors.hpp"
#include "recurlab/report.hpp"

namespace recurlab::cli
{
namespace
{
struct VerbName
{
    Verb verb;
    char const* name;
    char const* help;
};

constexpr VerbName verbs[] = {
    {Verb::Simulate, "simulate", "Monte Carlo pmf of R_n against the limit law"},
    {Verb::LimitLaw, "limitlaw", "tabulate G(tau, k), tail shape and summability"},
    {Verb::AlmostSure, "almost-sure", "upper/lower rate violations along n_k = floor(a^k)"},
    {Verb::CheckA2, "check-a2", "short-return diagnostic mu(E_j(r_n)) with fitted exponent"},
    {Verb::E2, "e2", "short-return sum at a target ball"},
    {Verb::Compare, "compare", "simulate and print the distance to theory per tau"},
};

std::string fmt(char const* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string summary(ExperimentConfig const& cfg, std::string const& max_tv)
{
    return "map=" + cfg.map + " n=" + std::to_string(cfg.n) + " samples=" + std::to_string(cfg.samples)
           + " max_tv=" + max_tv;
}

std::string join(std::filesystem::path const& dir, char const* name)
{
    return (dir / name).string();
}

}  // namespace

char const* to_string(Verb v)
{
    for (auto const& vn : verbs)
    {
        if (vn.verb == v)
        {
            return vn.name;
        }
    }
    return "simulate";
}

Command parse_and_validate(int argc, char const* const* argv, std::ostream& out)
{
    CLI::App app{"Recurrence statistics laboratory for interval maps", "recurlab"};
    app.require_subcommand(1);

    Command cmd;
    std::string seed;
    std::string samples;
    std::string n;
    std::string map;
    std::vector<std::string> sets;
    for (auto const& vn : verbs)
    {
        CLI::App* sub = app.add_subcommand(vn.name, vn.help);
        sub->add_option("-c,--config", cmd.config_path, "configuration file (key = value, or a report.json)");
        sub->add_option("-o,--output", cmd.output_dir, "output directory");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--samples", samples, "number of samples");
        sub->add_option("--n", n, "orbit length");
        sub->add_option("--map", map, "doubling, beta, gauss, mp, cusp or logistic");
        sub->add_option("--set", sets, "override any key: --set section.key=value");
        sub->add_flag("--strict", cmd.strict, "exit 1 when an acceptance threshold is breached");
        sub->callback([&cmd, v = vn.verb] { cmd.verb = v; });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const&)
    {
        out << app.help();
        throw UsageError(exit_code::ok, "");
    }
    catch (CLI::ParseError const& e)
    {
        throw UsageError(exit_code::usage, e.what());
    }

    for (auto const& [flag, key] : {std::pair{&seed, "seed"}, std::pair{&samples, "samples"},
                                    std::pair{&n, "n"}, std::pair{&map, "map"}})
    {
        if (!flag->empty())
        {
            cmd.overrides.emplace_back(key, *flag);
        }
    }
    for (auto const& s : sets)
    {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
        {
            throw UsageError(exit_code::usage, "--set expects key=value, got '" + s + "'");
        }
        cmd.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }

    try
    {
        FlatConfig flat;
        if (!cmd.config_path.empty())
        {
            flat = load_config_file(cmd.config_path);
        }
        if (char const* w = std::getenv("RECURLAB_WORKERS"); w && *w)
        {
            apply_override(flat, "workers", w);
        }
        for (auto const& [key, value] : cmd.overrides)
        {
            apply_override(flat, key, value);
        }
        cmd.config = config_from_flat(flat);
    }
    catch (MissingFileError const& e)
    {
        throw UsageError(exit_code::missing_file, e.what());
    }
    catch (ConfigError const& e)
    {
        throw UsageError(exit_code::usage, std::string("invalid configuration: ") + e.what());
    }
    return cmd;
}

int execute(Command const& cmd, std::ostream& out, std::ostream& err)
{
    ExperimentConfig const& cfg = cmd.config;
    std::filesystem::path dir(cmd.output_dir);
    RunReport report(to_string(cmd.verb), cfg);
    auto report_path = join(dir, "report.json");
    int code = exit_code::ok;

    auto breach = [&](std::string const& message) {
        report.set_threshold_breach(message);
        err << "threshold breach: " << message << "\n";
        if (cmd.strict)
        {
            code = exit_code::threshold_breach;
        }
    };

    try
    {
        std::filesystem::create_directories(dir);
        switch (cmd.verb)
        {
            case Verb::Simulate:
            case Verb::Compare: {
                DistributionalResult r = run_distributional(cfg);
                report.add(r);
                write_text_file(join(dir, "pmf.csv"), pmf_csv(r));
                if (cmd.verb == Verb::Compare)
                {
                    for (auto const& s : r.per_tau)
                    {
                        out << "tau=" << fmt("%g", s.tau) << " tv=" << fmt("%.6f", s.tv)
                            << " max_dev=" << fmt("%.6f", s.max_dev) << "\n";
                    }
                }
                out << summary(cfg, fmt("%.6f", r.max_tv())) << "\n";
                if (r.failed)
                {
                    err << "failed: " << r.failure << "\n";
                    code = exit_code::precision_abort;
                }
                else if (r.max_tv() > cfg.tv_threshold)
                {
                    breach("max TV distance " + fmt("%.6f", r.max_tv()) + " exceeds "
                           + fmt("%g", cfg.tv_threshold));
                }
                break;
            }
            case Verb::LimitLaw: {
                MapModel map = cfg.make_map();
                DensityModel density = theory_density(cfg, map);
                LimitLawTable table = build_limit_law_table(map, density, cfg.tau_grid, cfg.k_max,
                                                            cfg.quadrature,
                                                            cfg.density_source == "closed_form");
                report.add(table);
                report.add_tail("k0", tail_classification(density, 0, 20.0, cfg.quadrature));
                double gamma0 = cfg.as_gamma > 0 ? std::min(cfg.as_gamma, 1.0) : 1.0;
                report.add_summability(gamma0, as_summability_check(density, gamma0, {1.0}));
                write_text_file(join(dir, "limitlaw.csv"), limitlaw_csv(table));
                out << summary(cfg, "n/a") << "\n";
                break;
            }
            case Verb::AlmostSure: {
                AlmostSureResult r = run_almost_sure(cfg);
                report.add(r);
                write_text_file(join(dir, "as.csv"), as_csv(r));
                out << "map=" << cfg.map << " n=" << cfg.as_n_max << " samples=" << cfg.as_paths
                    << " max_tv=n/a";
                if (!r.rows.empty())
                {
                    out << " final_upper=" << fmt("%.4f", r.rows.back().upper_freq())
                        << " final_lower=" << fmt("%.4f", r.rows.back().lower_freq());
                }
                out << "\n";
                if (r.failed)
                {
                    err << "failed: " << r.failure << "\n";
                    code = exit_code::precision_abort;
                }
                else if (!r.rows.empty()
                         && (r.rows.back().upper_freq() > cfg.as_upper_limit
                             || r.rows.back().lower_freq() > cfg.as_lower_limit))
                {
                    breach("final violation frequency above its limit");
                }
                break;
            }
            case Verb::CheckA2: {
                AssumptionReport r = check_assumption_A2(cfg, cfg.a2_exponent);
                report.add(r);
                write_text_file(join(dir, "a2.csv"), a2_csv(r));
                out << "map=" << cfg.map << " n=" << cfg.a2_n_grid.back()
                    << " samples=" << cfg.a2_samples << " max_tv=n/a beta0="
                    << (r.beta0 ? fmt("%.4f", *r.beta0) : std::string("n/a")) << "\n";
                if (r.failed)
                {
                    err << "failed: " << r.failure << "\n";
                    code = exit_code::precision_abort;
                }
                else
                {
                    bool outside = false;
                    for (auto const& e : r.entries)
                    {
                        outside |= e.j <= 10 && e.oracle && !e.ci.contains(*e.oracle);
                    }
                    if (outside)
                    {
                        breach("an exact value lies outside its 99% interval");
                    }
                    else if (r.beta0 && (*r.beta0 < 0.9 || *r.beta0 > 1.1))
                    {
                        breach("fitted exponent outside [0.9, 1.1]");
                    }
                }
                break;
            }
            case Verb::E2: {
                E2Result r = chen_stein_e2(cfg, cfg.e2_center, cfg.e2_radius, cfg.e2_p);
                report.add(r);
                out << "map=" << cfg.map << " n=" << cfg.e2_p << " samples=" << cfg.e2_samples
                    << " max_tv=n/a e2=" << fmt("%.6g", r.estimate);
                if (r.exact)
                {
                    out << " exact=" << fmt("%.6g", *r.exact);
                }
                out << "\n";
                break;
            }
        }
    }
    catch (PrecisionAbort const& e)
    {
        report.set_failed(e.what());
        code = exit_code::precision_abort;
        err << "precision abort: " << e.what() << "\n";
    }
    catch (MissingFileError const& e)
    {
        report.set_failed(e.what());
        code = exit_code::missing_file;
        err << e.what() << "\n";
    }
    catch (std::exception const& e)
    {
        report.set_failed(e.what());
        code = exit_code::usage;
        err << "error: " << e.what() << "\n";
    }

    try
    {
        report.write(report_path);
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << "\n";
        if (code == exit_code::ok)
        {
            code = exit_code::usage;
        }
    }
    return code;
}

int run(int argc, char const* const* argv, std::ostream& out, std::ostream& err)
{
    Command cmd;
    try
    {
        cmd = parse_and_validate(argc, argv, out);
    }
    catch (UsageError const& e)
    {
        if (e.code() != exit_code::ok)
        {
            err << e.what() << "\n";
        }
        return e.code();
    }
    return execute(cmd, out, err);
}

}  // namespace recurlab::cli
