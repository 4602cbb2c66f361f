#pragma once

// Scenario configuration: flat, sectioned key = value text.
//
//   [model]    gamma, kappa (quadratic|triple_well), k, mu1, c, p, theta_a, theta_b
//   [grid]     n
//   [time]     t_end, rel_tol, abs_tol, eq_tol, dt_max
//   [initial]  mu (zeros|constant|cosine|nodes), value, nodes, mu_nat
//   [equilibria] alpha, alpha_min, alpha_max, n_points
//   [output]   directory, formats, stride, eigenfunctions
//
// Every key is optional; unknown sections or keys are rejected.

#include "../dynamics.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strutlab::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class InitialKind { zeros, constant, cosine, nodes };

struct ScenarioConfig {
    // model
    double gamma = 4.0;
    KappaFamily kappa_family = KappaFamily::quadratic;
    double k = 1.0;
    double mu1 = 1.0;
    double c = 1.0;
    double p = 2.0;
    double theta_a = 2.5;
    double theta_b = 0.0;
    // grid
    int n = 400;
    // time
    double t_end = 200.0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-8;
    double eq_tol = 1e-10;
    double dt_max = 1.0;
    // initial data
    InitialKind initial = InitialKind::cosine;
    double initial_value = 0.01; // constant c or cosine amplitude a in a cos(pi s / 2)
    std::vector<double> initial_nodes;
    double mu_nat0 = 0.0;
    // equilibria
    double alpha = 0.0;
    double alpha_min = -0.5;
    double alpha_max = 0.5;
    int n_points = 101;
    // output
    std::string directory = "out";
    bool write_csv = true;
    bool write_svg = true;
    int stride = 1;
    int eigenfunctions = 0;

    Grid grid() const { return Grid(n); }

    ConstitutiveSet constitutive() const
    {
        KappaSpec kappa = kappa_family == KappaFamily::quadratic ? KappaSpec::quadratic(k)
                                                                 : KappaSpec::triple_well(k, mu1);
        return {kappa, RateSpec(c, p), ThresholdSpec(theta_a, theta_b)};
    }

    ModelParams params() const { return ModelParams(gamma, constitutive()); }

    SimulationOptions simulation() const
    {
        SimulationOptions o;
        o.t_end = t_end;
        o.tol.rel = rel_tol;
        o.tol.abs = abs_tol;
        o.tol.dt_max = dt_max;
        o.eq_tol = eq_tol;
        return o;
    }

    RodState initial_state() const
    {
        const Grid g = grid();
        switch (initial) {
        case InitialKind::zeros:
            return {Field::zeros(g), mu_nat0};
        case InitialKind::constant:
            return {Field::constant(g, initial_value), mu_nat0};
        case InitialKind::cosine: {
            const double a = initial_value;
            return {Field::sample(g, [a](double s) { return a * std::cos(0.5 * M_PI * s); }), mu_nat0};
        }
        case InitialKind::nodes:
            return {Field{g, Eigen::Map<const Eigen::VectorXd>(initial_nodes.data(),
                                                               static_cast<Eigen::Index>(initial_nodes.size()))},
                    mu_nat0};
        }
        throw ConfigError("initial: unknown kind");
    }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used])))
        ++used;
    if (used != text.size())
        throw ConfigError(key + ": trailing characters in '" + text + "'");
    if (!std::isfinite(v))
        throw ConfigError(key + ": value must be finite");
    return v;
}

inline std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
    }
    return out;
}

inline int parse_int(const std::string& key, const std::string& text)
{
    const double v = parse_number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

} // namespace detail

/// Checks bounds that the typed fields cannot express. Throws ConfigError naming the violated bound.
inline void validate_config(const ScenarioConfig& cfg)
{
    if (cfg.n < Grid::min_intervals)
        throw ConfigError("grid.n must be >= " + std::to_string(Grid::min_intervals) + " (got " +
                          std::to_string(cfg.n) + ")");
    if (!(cfg.gamma >= 0.0))
        throw ConfigError("model.gamma must be >= 0");
    if (!(cfg.t_end > 0.0))
        throw ConfigError("time.t_end must be > 0");
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || !(cfg.eq_tol > 0.0))
        throw ConfigError("time tolerances (rel_tol, abs_tol, eq_tol) must be > 0");
    if (!(cfg.dt_max > 0.0))
        throw ConfigError("time.dt_max must be > 0");
    if (cfg.stride < 1)
        throw ConfigError("output.stride must be >= 1");
    if (cfg.eigenfunctions < 0)
        throw ConfigError("output.eigenfunctions must be >= 0");
    if (cfg.n_points < 2)
        throw ConfigError("equilibria.n_points must be >= 2");
    if (!(cfg.alpha_min < cfg.alpha_max))
        throw ConfigError("equilibria.alpha_min must be < alpha_max");
    if (cfg.initial == InitialKind::nodes && static_cast<int>(cfg.initial_nodes.size()) != cfg.n + 1)
        throw ConfigError("initial.nodes must list n + 1 = " + std::to_string(cfg.n + 1) + " values (got " +
                          std::to_string(cfg.initial_nodes.size()) + ")");
    try {
        (void)cfg.constitutive();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

inline ScenarioConfig parse_config(std::istream& in)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    static const std::map<std::string, std::set<std::string>> schema = {
        {"model", {"gamma", "kappa", "k", "mu1", "c", "p", "theta_a", "theta_b"}},
        {"grid", {"n"}},
        {"time", {"t_end", "rel_tol", "abs_tol", "eq_tol", "dt_max"}},
        {"initial", {"mu", "value", "nodes", "mu_nat"}},
        {"equilibria", {"alpha", "alpha_min", "alpha_max", "n_points"}},
        {"output", {"directory", "formats", "stride", "eigenfunctions"}},
    };

    ScenarioConfig cfg;
    for (const auto& [section, body] : tree) {
        const auto known = schema.find(section);
        if (known == schema.end() || body.empty())
            throw ConfigError("unknown section [" + section + "]");
        for (const auto& [key, node] : body) {
            if (!known->second.count(key))
                throw ConfigError("unknown key " + section + "." + key);
            const std::string name = section + "." + key;
            const std::string v = node.get_value<std::string>();
            auto num = [&] { return detail::parse_number(name, v); };
            auto integer = [&] { return detail::parse_int(name, v); };

            if (section == "model") {
                if (key == "kappa") {
                    if (v == "quadratic")
                        cfg.kappa_family = KappaFamily::quadratic;
                    else if (v == "triple_well")
                        cfg.kappa_family = KappaFamily::triple_well;
                    else
                        throw ConfigError(name + ": expected quadratic or triple_well, got '" + v + "'");
                }
                else if (key == "gamma") cfg.gamma = num();
                else if (key == "k") cfg.k = num();
                else if (key == "mu1") cfg.mu1 = num();
                else if (key == "c") cfg.c = num();
                else if (key == "p") cfg.p = num();
                else if (key == "theta_a") cfg.theta_a = num();
                else if (key == "theta_b") cfg.theta_b = num();
            } else if (section == "grid") {
                cfg.n = integer();
            } else if (section == "time") {
                if (key == "t_end") cfg.t_end = num();
                else if (key == "rel_tol") cfg.rel_tol = num();
                else if (key == "abs_tol") cfg.abs_tol = num();
                else if (key == "eq_tol") cfg.eq_tol = num();
                else if (key == "dt_max") cfg.dt_max = num();
            } else if (section == "initial") {
                if (key == "mu") {
                    if (v == "zeros") cfg.initial = InitialKind::zeros;
                    else if (v == "constant") cfg.initial = InitialKind::constant;
                    else if (v == "cosine") cfg.initial = InitialKind::cosine;
                    else if (v == "nodes") cfg.initial = InitialKind::nodes;
                    else throw ConfigError(name + ": expected zeros, constant, cosine or nodes, got '" + v + "'");
                }
                else if (key == "value") cfg.initial_value = num();
                else if (key == "mu_nat") cfg.mu_nat0 = num();
                else if (key == "nodes") {
                    cfg.initial_nodes.clear();
                    for (const auto& item : detail::split(v, ','))
                        cfg.initial_nodes.push_back(detail::parse_number(name, item));
                }
            } else if (section == "equilibria") {
                if (key == "alpha") cfg.alpha = num();
                else if (key == "alpha_min") cfg.alpha_min = num();
                else if (key == "alpha_max") cfg.alpha_max = num();
                else if (key == "n_points") cfg.n_points = integer();
            } else if (section == "output") {
                if (key == "directory") cfg.directory = v;
                else if (key == "stride") cfg.stride = integer();
                else if (key == "eigenfunctions") cfg.eigenfunctions = integer();
                else if (key == "formats") {
                    cfg.write_csv = cfg.write_svg = false;
                    for (const auto& f : detail::split(v, ',')) {
                        if (f == "csv") cfg.write_csv = true;
                        else if (f == "svg") cfg.write_svg = true;
                        else throw ConfigError(name + ": unknown format '" + f + "'");
                    }
                }
            }
        }
    }
    validate_config(cfg);
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Parses "a,b,n" as used by --alpha-range and --gamma-range.
struct Range {
    double lo;
    double hi;
    int count;

    double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

inline Range parse_range(const std::string& option, const std::string& text)
{
    const auto parts = detail::split(text, ',');
    if (parts.size() != 3)
        throw ConfigError(option + ": expected a,b,n (got '" + text + "')");
    Range r{detail::parse_number(option, parts[0]), detail::parse_number(option, parts[1]),
            detail::parse_int(option, parts[2])};
    if (r.count < 1)
        throw ConfigError(option + ": n must be >= 1");
    if (r.count > 1 && !(r.lo < r.hi))
        throw ConfigError(option + ": a must be < b");
    return r;
}

} // namespace strutlab::cli
