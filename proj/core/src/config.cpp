#include "recurlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "recurlab/errors.hpp"

namespace recurlab
{
namespace
{
std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
    {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s)
{
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

// Drop # and ; comments that are not inside quotes.
std::string strip_comment(std::string const& line)
{
    char quote = 0;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        char c = line[i];
        if (quote)
        {
            if (c == quote)
            {
                quote = 0;
            }
        }
        else if (c == '"' || c == '\'')
        {
            quote = c;
        }
        else if (c == '#' || c == ';')
        {
            return line.substr(0, i);
        }
    }
    return line;
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Prefer the shortest text that reads back identically.
    for (int digits = 1; digits < 17; ++digits)
    {
        char shorter[40];
        std::snprintf(shorter, sizeof shorter, "%.*g", digits, v);
        if (std::strtod(shorter, nullptr) == v)
        {
            return shorter;
        }
    }
    return buf;
}

double parse_double(std::string const& key, std::string const& text)
{
    std::string t = trim(text);
    double v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    return v;
}

template<class Int>
Int parse_int(std::string const& key, std::string const& text)
{
    std::string t = trim(text);
    Int v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return v;
}

bool parse_bool(std::string const& key, std::string const& text)
{
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes")
    {
        return true;
    }
    if (t == "false" || t == "0" || t == "no")
    {
        return false;
    }
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(std::string const& key, std::string const& text)
{
    std::string t = trim(text);
    if (!t.empty() && t.front() == '[')
    {
        if (t.back() != ']')
        {
            throw ConfigError(key, "unterminated list '" + text + "'");
        }
        t = t.substr(1, t.size() - 2);
    }
    std::vector<std::string> items;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
        {
            items.push_back(item);
        }
    }
    return items;
}

template<class T, class Parse>
std::vector<T> parse_list(std::string const& key, std::string const& text, Parse parse)
{
    std::vector<T> out;
    for (auto const& item : split_list(key, text))
    {
        out.push_back(parse(key, item));
    }
    return out;
}

template<class T, class Format>
std::string format_list(std::vector<T> const& values, Format format)
{
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        s += (i ? ", " : "") + format(values[i]);
    }
    return s + "]";
}

struct Field
{
    char const* key;
    std::function<void(ExperimentConfig&, std::string const&)> set;
    std::function<std::string(ExperimentConfig const&)> get;
};

#define RL_DOUBLE(name, member)                                                                \
    Field                                                                                      \
    {                                                                                          \
        name, [](ExperimentConfig& c, std::string const& v) { c.member = parse_double(name, v); }, \
            [](ExperimentConfig const& c) { return format_double(c.member); }                   \
    }
#define RL_INT(name, member)                                                                   \
    Field                                                                                      \
    {                                                                                          \
        name,                                                                                  \
            [](ExperimentConfig& c, std::string const& v) {                                    \
                c.member = parse_int<decltype(c.member)>(name, v);                             \
            },                                                                                 \
            [](ExperimentConfig const& c) { return std::to_string(c.member); }                 \
    }
#define RL_STRING(name, member)                                                                \
    Field                                                                                      \
    {                                                                                          \
        name, [](ExperimentConfig& c, std::string const& v) { c.member = unquote(v); },         \
            [](ExperimentConfig const& c) { return c.member; }                                 \
    }

std::vector<Field> const& fields()
{
    static std::vector<Field> const table = {
        RL_STRING("map", map),
        RL_DOUBLE("beta", beta),
        RL_DOUBLE("gamma", gamma),
        RL_INT("n", n),
        RL_INT("samples", samples),
        Field{"tau_grid",
              [](ExperimentConfig& c, std::string const& v) {
                  c.tau_grid = parse_list<double>("tau_grid", v, parse_double);
              },
              [](ExperimentConfig const& c) { return format_list(c.tau_grid, format_double); }},
        RL_INT("k_max", k_max),
        RL_INT("seed", seed),
        RL_INT("workers", workers),
        RL_INT("burn_in", burn_in),
        RL_DOUBLE("abort_limit", abort_limit),
        RL_DOUBLE("subseq_base", subseq_base),
        RL_DOUBLE("as_constant", as_constant),
        RL_DOUBLE("as_gamma", as_gamma),
        RL_STRING("density.source", density_source),
        RL_INT("density.histogram_bins", histogram_bins),
        RL_INT("density.histogram_samples", histogram_samples),
        RL_INT("ulam.bins", ulam_bins),
        RL_DOUBLE("ulam.tolerance", ulam.tolerance),
        RL_INT("ulam.max_iterations", ulam.max_iterations),
        RL_INT("ulam.max_branches_per_bin", ulam.max_branches_per_bin),
        RL_STRING("precision.kind", precision_kind),
        RL_INT("precision.bits", precision.bits),
        RL_INT("precision.slack_bits", precision.slack_bits),
        Field{"precision.taper",
              [](ExperimentConfig& c, std::string const& v) {
                  c.precision.taper = parse_bool("precision.taper", v);
              },
              [](ExperimentConfig const& c) { return std::string(c.precision.taper ? "true" : "false"); }},
        RL_DOUBLE("precision.abort_fraction", precision.abort_fraction),
        RL_INT("precision.retries", precision.retries),
        RL_DOUBLE("quadrature.abs_tol", quadrature.abs_tol),
        RL_INT("quadrature.max_subdivisions", quadrature.max_subdivisions),
        Field{"quadrature.splits",
              [](ExperimentConfig& c, std::string const& v) {
                  c.quadrature.splits = parse_list<double>("quadrature.splits", v, parse_double);
              },
              [](ExperimentConfig const& c) { return format_list(c.quadrature.splits, format_double); }},
        RL_INT("almost_sure.n_max", as_n_max),
        RL_INT("almost_sure.paths", as_paths),
        RL_DOUBLE("almost_sure.upper_limit", as_upper_limit),
        RL_DOUBLE("almost_sure.lower_limit", as_lower_limit),
        RL_DOUBLE("a2.a_exponent", a2_exponent),
        Field{"a2.n_grid",
              [](ExperimentConfig& c, std::string const& v) {
                  c.a2_n_grid = parse_list<std::int64_t>("a2.n_grid", v, parse_int<std::int64_t>);
              },
              [](ExperimentConfig const& c) {
                  return format_list(c.a2_n_grid, [](std::int64_t x) { return std::to_string(x); });
              }},
        RL_INT("a2.samples", a2_samples),
        RL_DOUBLE("a2.max_rel_width", a2_max_rel_width),
        RL_DOUBLE("e2.center", e2_center),
        RL_DOUBLE("e2.radius", e2_radius),
        RL_INT("e2.p", e2_p),
        RL_INT("e2.samples", e2_samples),
        RL_DOUBLE("compare.tv_threshold", tv_threshold),
    };
    return table;
}

#undef RL_DOUBLE
#undef RL_INT
#undef RL_STRING

Field const* find_field(std::string const& key)
{
    for (auto const& f : fields())
    {
        if (key == f.key)
        {
            return &f;
        }
    }
    return nullptr;
}

void flatten_json(nlohmann::json const& j, std::string const& prefix, FlatConfig& out)
{
    for (auto it = j.begin(); it != j.end(); ++it)
    {
        std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        auto const& v = it.value();
        if (v.is_object())
        {
            flatten_json(v, key, out);
        }
        else if (v.is_string())
        {
            out[key] = v.get<std::string>();
        }
        else if (v.is_array())
        {
            std::string s = "[";
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                s += (i ? ", " : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
            }
            out[key] = s + "]";
        }
        else
        {
            out[key] = v.dump();
        }
    }
}

}  // namespace

FlatConfig parse_config_text(std::string const& text)
{
    FlatConfig flat;
    std::string head = trim(text);
    if (!head.empty() && head.front() == '{')
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(text);
        }
        catch (nlohmann::json::exception const& e)
        {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        if (j.contains("config") && j["config"].is_object())
        {
            j = j["config"];
        }
        flatten_json(j, "", flat);
        return flat;
    }

    std::stringstream cleaned;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line))
    {
        cleaned << strip_comment(line) << '\n';
    }
    boost::property_tree::ptree tree;
    try
    {
        boost::property_tree::read_ini(cleaned, tree);
    }
    catch (boost::property_tree::ini_parser_error const& e)
    {
        throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (auto const& [name, node] : tree)
    {
        if (node.empty())
        {
            flat[name] = unquote(node.data());
            continue;
        }
        for (auto const& [sub, leaf] : node)
        {
            flat[name + "." + sub] = unquote(leaf.data());
        }
    }
    return flat;
}

FlatConfig load_config_file(std::string const& path)
{
    if (!std::filesystem::exists(path))
    {
        throw MissingFileError(path);
    }
    std::ifstream in(path);
    if (!in)
    {
        throw ConfigError("config", "cannot read " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::vector<std::string> known_config_keys()
{
    std::vector<std::string> keys;
    for (auto const& f : fields())
    {
        keys.emplace_back(f.key);
    }
    return keys;
}

void apply_override(FlatConfig& flat, std::string const& key, std::string const& value)
{
    if (!find_field(key))
    {
        throw ConfigError(key, "unknown configuration key");
    }
    flat[key] = unquote(value);
}

ExperimentConfig config_from_flat(FlatConfig const& flat)
{
    ExperimentConfig cfg;
    for (auto const& [key, value] : flat)
    {
        Field const* f = find_field(key);
        if (!f)
        {
            throw ConfigError(key, "unknown configuration key");
        }
        f->set(cfg, value);
    }
    cfg.validate();
    return cfg;
}

FlatConfig config_to_flat(ExperimentConfig const& cfg)
{
    FlatConfig flat;
    for (auto const& f : fields())
    {
        flat[f.key] = f.get(cfg);
    }
    return flat;
}

}  // namespace recurlab
