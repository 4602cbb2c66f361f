#pragma once

#include "../validation.hpp"
#include "config.hpp"
#include "output.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace strutlab::cli {

enum ExitCode : int { ok = 0, config_error = 2, integration_error = 3, inadmissible = 4, validation_failure = 5 };

class InadmissibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommandOptions {
    std::optional<std::string> out_dir;
    std::optional<double> alpha;
    std::optional<Range> alpha_range;
    std::optional<Range> gamma_range;
};

struct RunSummary {
    bool converged = false;
    double final_time = 0.0;
    double final_norm_F = 0.0;
    std::string final_state_digest;
    double v_initial = 0.0;
    double v_final = 0.0;
    std::vector<double> regime_crossings;
};

/// FNV-1a over the 17-digit text of every value, so equal CSV means equal digest.
inline std::string state_digest(const RodState& s)
{
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&](double v) {
        for (char ch : format_double(v)) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ull;
        }
        h ^= ',';
        h *= 1099511628211ull;
    };
    for (int i = 0; i < s.mu.size(); ++i)
        feed(s.mu[i]);
    feed(s.mu_nat);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline RunSummary summarize(const TrajectoryRecord& rec)
{
    return {rec.converged,          rec.times.back(),         rec.norm_F.back(), state_digest(rec.final_state()),
            rec.liapunov.front(),   rec.liapunov.back(),      rec.regime_crossings};
}

namespace detail {

inline std::filesystem::path output_dir(const ScenarioConfig& cfg, const CommandOptions& opt)
{
    std::filesystem::path dir = opt.out_dir.value_or(cfg.directory);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<std::size_t> snapshot_rows(std::size_t count, int stride)
{
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < count; k += static_cast<std::size_t>(stride))
        rows.push_back(k);
    if (rows.back() != count - 1)
        rows.push_back(count - 1);
    return rows;
}

inline const char* palette(std::size_t i)
{
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    return colors[i % 6];
}

inline void write_summary(std::ostream& out, const RunSummary& s, double gamma)
{
    out << "converged = " << (s.converged ? "true" : "false") << '\n'
        << "final_time = " << format_double(s.final_time) << '\n'
        << "final_norm_F = " << format_double(s.final_norm_F) << '\n'
        << "final_state_digest = " << s.final_state_digest << '\n'
        << "gamma = " << format_double(gamma) << '\n'
        << "V_initial = " << format_double(s.v_initial) << '\n'
        << "V_final = " << format_double(s.v_final) << '\n'
        << "regime_crossings =";
    for (std::size_t i = 0; i < s.regime_crossings.size(); ++i)
        out << (i ? "," : " ") << format_double(s.regime_crossings[i]);
    out << '\n';
}

} // namespace detail

inline RunSummary run_simulate(const ScenarioConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const ModelParams params = cfg.params();
    const TrajectoryRecord rec = simulate(cfg.initial_state(), params, cfg.simulation());
    const RunSummary summary = summarize(rec);
    const auto dir = detail::output_dir(cfg, opt);
    const auto rows = detail::snapshot_rows(rec.size(), cfg.stride);

    if (cfg.write_csv) {
        auto out = open_output((dir / "trajectory.csv").string());
        CsvWriter csv(out, {"t", "mu_nat", "V", "D_hat", "theta_of_mu_nat", "regime", "norm_F", "dt"});
        for (std::size_t k = 0; k < rec.size(); ++k)
            csv.row(rec.times[k], rec.snapshots[k].mu_nat, rec.liapunov[k], rec.d_hat[k], rec.threshold[k],
                    to_string(rec.regimes[k]), rec.norm_F[k], rec.step_sizes[k]);

        auto snap = open_output((dir / "snapshots.csv").string());
        CsvWriter scsv(snap, {"t", "s", "mu"});
        for (std::size_t k : rows) {
            const Field& mu = rec.snapshots[k].mu;
            for (int i = 0; i < mu.size(); ++i)
                scsv.row(rec.times[k], mu.grid.node(i), mu[i]);
        }
    }
    if (cfg.write_svg) {
        SvgPlot shape("Rod center line", "x", "y");
        shape.equal_aspect();
        const std::size_t shown = std::min<std::size_t>(6, rows.size());
        for (std::size_t j = 0; j < shown; ++j) {
            const std::size_t k = rows[shown == 1 ? 0 : j * (rows.size() - 1) / (shown - 1)];
            const PlanarCurve c = reconstruct_shape(rec.snapshots[k].mu);
            shape.add({c.x, c.y, "t = " + format_double(rec.times[k]).substr(0, 8), detail::palette(j)});
        }
        auto out = open_output((dir / "shape.svg").string());
        shape.write(out);

        SvgPlot lv("Liapunov functional", "t", "V");
        lv.add({rec.times, rec.liapunov, "V(t)"});
        auto vout = open_output((dir / "liapunov.svg").string());
        lv.write(vout);
    }
    {
        auto out = open_output((dir / "summary.txt").string());
        detail::write_summary(out, summary, params.gamma);
    }
    detail::write_summary(log, summary, params.gamma);
    return summary;
}

inline BranchCurve run_equilibria(const ScenarioConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const ModelParams params = cfg.params();
    const Range r = opt.alpha_range.value_or(Range{cfg.alpha_min, cfg.alpha_max, cfg.n_points});
    if (r.count < 2)
        throw ConfigError("--alpha-range: equilibria needs n >= 2");
    const BranchCurve curve = branch_sweep(r.lo, r.hi, r.count, params, cfg.grid());
    const auto dir = detail::output_dir(cfg, opt);

    std::vector<EquilibriumPoint> boundary;
    for (double a : curve.boundary_alphas)
        boundary.push_back(equilibrium_from_alpha(a, params, cfg.grid()));

    if (cfg.write_csv) {
        auto out = open_output((dir / "branch.csv").string());
        CsvWriter csv(out, {"alpha", "nu_nat", "phi_at_1", "D_hat", "theta", "admissible"});
        const int n = cfg.n;
        for (const auto& p : curve.points)
            csv.row(p.alpha, p.nu_nat, p.phi[n], p.d_value, p.threshold, p.admissible ? "1" : "0");
        for (const auto& p : boundary)
            csv.row(p.alpha, p.nu_nat, p.phi[n], p.d_value, p.threshold, "boundary");
    }
    if (cfg.write_svg) {
        SvgPlot plot("Equilibrium branch (shaded: admissible)", "alpha", "nu_nat");
        Series s{{}, {}, "nu_nat(alpha)"};
        for (const auto& p : curve.points) {
            s.x.push_back(p.alpha);
            s.y.push_back(p.nu_nat);
        }
        // Shade runs of admissible points, closed off at the bisected boundaries.
        std::vector<std::pair<double, bool>> marks;
        for (const auto& p : curve.points)
            marks.emplace_back(p.alpha, p.admissible);
        for (double a : curve.boundary_alphas)
            marks.emplace_back(a, true);
        std::sort(marks.begin(), marks.end());
        for (std::size_t i = 1; i < marks.size(); ++i)
            if (marks[i - 1].second && marks[i].second)
                plot.shade(marks[i - 1].first, marks[i].first);
        plot.add(std::move(s));
        auto out = open_output((dir / "bifurcation.svg").string());
        plot.write(out);
    }
    std::size_t admissible = 0;
    for (const auto& p : curve.points)
        admissible += p.admissible;
    log << "points = " << curve.points.size() << '\n' << "admissible = " << admissible << '\n' << "boundary_alphas =";
    for (std::size_t i = 0; i < curve.boundary_alphas.size(); ++i)
        log << (i ? "," : " ") << format_double(curve.boundary_alphas[i]);
    log << '\n';
    return curve;
}

inline SpectrumReport run_spectrum(const ScenarioConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const ModelParams params = cfg.params();
    const double alpha = opt.alpha.value_or(cfg.alpha);
    const EquilibriumPoint eq = equilibrium_from_alpha(alpha, params, cfg.grid());
    if (!eq.admissible)
        throw InadmissibleError("alpha = " + format_double(alpha) + " gives an inadmissible equilibrium: |D| = " +
                                format_double(std::abs(eq.d_value)) + " > Theta = " + format_double(eq.threshold));
    const SpectrumReport rep = spectrum(eq, params, std::nullopt, cfg.eigenfunctions);
    const auto dir = detail::output_dir(cfg, opt);
    const char* stability = !eq.strict ? "boundary" : rep.n_unstable > 0 ? "unstable" : "stable";

    if (cfg.write_csv) {
        auto out = open_output((dir / "spectrum.csv").string());
        CsvWriter csv(out, {"rank", "lambda", "source", "unstable"});
        bool zero_written = false;
        int rank = 0;
        for (double l : rep.nystrom_eigenvalues) {
            if (!zero_written && l <= 0.0) {
                csv.row(rank++, 0.0, "kernel", "0");
                zero_written = true;
            }
            csv.row(rank++, l, "nystrom", l > rep.pos_tol ? "1" : "0");
        }
        if (!zero_written)
            csv.row(rank++, 0.0, "kernel", "0");

        if (!rep.eigenfunctions.empty()) {
            auto ef = open_output((dir / "eigenfunctions.csv").string());
            std::vector<std::string> header{"s"};
            for (std::size_t k = 0; k < rep.eigenfunctions.size(); ++k)
                header.push_back("mode_" + std::to_string(k));
            header.push_back("kernel_field");
            for (std::size_t c = 0; c < header.size(); ++c)
                ef << (c ? "," : "") << header[c];
            ef << '\n';
            const Grid g = cfg.grid();
            for (int i = 0; i < g.size(); ++i) {
                ef << format_double(g.node(i));
                for (const auto& f : rep.eigenfunctions)
                    ef << ',' << format_double(f[i]);
                ef << ',' << format_double(rep.zero_eigenvector.field[i]) << '\n';
            }
        }
    }
    std::ostringstream summary;
    summary << "alpha = " << format_double(alpha) << '\n'
            << "gamma = " << format_double(params.gamma) << '\n'
            << "nu_nat = " << format_double(eq.nu_nat) << '\n'
            << "D_hat = " << format_double(eq.d_value) << '\n'
            << "theta = " << format_double(eq.threshold) << '\n'
            << "stability = " << stability << '\n'
            << "n_unstable = " << rep.n_unstable << '\n'
            << "pos_tol = " << format_double(rep.pos_tol) << '\n'
            << "zero_residual = " << format_double(rep.zero_residual) << '\n'
            << "zero_eigenvector_scalar = " << format_double(rep.zero_eigenvector.scalar) << '\n'
            << "lambda_max = " << format_double(rep.nystrom_eigenvalues.front()) << '\n';
    {
        auto out = open_output((dir / "spectrum_summary.txt").string());
        out << summary.str();
    }
    log << summary.str();
    return rep;
}

namespace detail {
/// Runs job(i) for i in [0, count) on a small worker pool; results are indexed, so order is deterministic.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job)
{
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}
} // namespace detail

/// Returns the number of scenarios that failed to integrate.
inline int run_sweep(const ScenarioConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    if (!opt.gamma_range && !opt.alpha_range)
        throw ConfigError("sweep needs --gamma-range and/or --alpha-range");
    const auto dir = detail::output_dir(cfg, opt);
    int failures = 0;

    if (opt.gamma_range) {
        const Range r = *opt.gamma_range;
        struct Row {
            std::string status;
            RunSummary summary;
            RodState final_state;
            double lambda_max_trivial;
            int n_unstable_trivial;
        };
        std::vector<std::optional<Row>> rows(r.count);
        detail::parallel_for(r.count, [&](std::size_t i) {
            ScenarioConfig c = cfg;
            c.gamma = r.at(static_cast<int>(i));
            validate_config(c);
            const ModelParams params = c.params();
            const SpectrumReport trivial = spectrum(equilibrium_from_alpha(0.0, params, c.grid()), params);
            try {
                const TrajectoryRecord rec = simulate(c.initial_state(), params, c.simulation());
                rows[i] = Row{"ok", summarize(rec), rec.final_state(), trivial.nystrom_eigenvalues.front(),
                              trivial.n_unstable};
            } catch (const IntegrationError& e) {
                rows[i] = Row{"integration_failure", {}, c.initial_state(), trivial.nystrom_eigenvalues.front(),
                              trivial.n_unstable};
            }
        });
        auto out = open_output((dir / "sweep_gamma.csv").string());
        CsvWriter csv(out, {"gamma", "status", "converged", "final_time", "norm_F", "mu_at_0", "mu_nat", "V_final",
                            "lambda_max_trivial", "n_unstable_trivial"});
        for (int i = 0; i < r.count; ++i) {
            const Row& row = *rows[i];
            failures += row.status != "ok";
            csv.row(r.at(i), row.status, row.summary.converged ? "1" : "0", row.summary.final_time,
                    row.summary.final_norm_F, row.final_state.mu[0], row.final_state.mu_nat, row.summary.v_final,
                    row.lambda_max_trivial, row.n_unstable_trivial);
        }
        log << "gamma_points = " << r.count << '\n';
    }

    if (opt.alpha_range) {
        const Range r = *opt.alpha_range;
        const ModelParams params = cfg.params();
        struct Row {
            EquilibriumPoint eq;
            std::optional<SpectrumReport> rep;
        };
        std::vector<std::optional<Row>> rows(r.count);
        detail::parallel_for(r.count, [&](std::size_t i) {
            EquilibriumPoint eq = equilibrium_from_alpha(r.at(static_cast<int>(i)), params, cfg.grid());
            std::optional<SpectrumReport> rep;
            if (eq.admissible)
                rep = spectrum(eq, params);
            rows[i] = Row{std::move(eq), std::move(rep)};
        });
        auto out = open_output((dir / "sweep_alpha.csv").string());
        CsvWriter csv(out, {"alpha", "nu_nat", "D_hat", "theta", "status", "lambda_max", "n_unstable",
                            "zero_residual"});
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (int i = 0; i < r.count; ++i) {
            const Row& row = *rows[i];
            const char* status = !row.eq.admissible ? "inadmissible" : row.eq.strict ? "strict" : "boundary";
            csv.row(row.eq.alpha, row.eq.nu_nat, row.eq.d_value, row.eq.threshold, status,
                    row.rep ? row.rep->nystrom_eigenvalues.front() : nan, row.rep ? row.rep->n_unstable : -1,
                    row.rep ? row.rep->zero_residual : nan);
        }
        log << "alpha_points = " << r.count << '\n';
    }
    return failures;
}

inline InvariantReport run_validate(const ScenarioConfig& cfg, const CommandOptions& opt, std::ostream& log)
{
    const ModelParams params = cfg.params();
    const SimulationOptions sim = cfg.simulation();
    const TrajectoryRecord rec = simulate(cfg.initial_state(), params, sim);
    InvariantReport rep = run_invariant_suite(rec, params, sim.tol);

    const ConstitutiveReport cons = validate(params.constitutive, -5.0, 5.0, 201);
    rep.results.insert(rep.results.begin(),
                       InvariantResult{"constitutive_hypotheses", cons.ok(), static_cast<double>(cons.violations.size()),
                                       0.0, cons.ok() ? "no violations on [-5, 5]"
                                                      : cons.violations.front().hypothesis + " at x = " +
                                                            format_double(cons.violations.front().witness)});

    const auto dir = detail::output_dir(cfg, opt);
    auto out = open_output((dir / "validate_report.txt").string());
    for (const auto& r : rep.results) {
        const std::string line = std::string(r.passed ? "PASS " : "FAIL ") + r.name +
                                 " measured=" + format_double(r.measured) + " threshold=" + format_double(r.threshold) +
                                 " (" + r.detail + ")\n";
        out << line;
        log << line;
    }
    return rep;
}

/// Dispatches a subcommand and maps failures onto the documented exit codes.
inline int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opt,
                       std::ostream& log, std::ostream& err)
{
    try {
        const ScenarioConfig cfg = load_config(config_path);
        if (command == "simulate") {
            run_simulate(cfg, opt, log);
            return ok;
        }
        if (command == "equilibria") {
            run_equilibria(cfg, opt, log);
            return ok;
        }
        if (command == "spectrum") {
            run_spectrum(cfg, opt, log);
            return ok;
        }
        if (command == "sweep")
            return run_sweep(cfg, opt, log) == 0 ? ok : integration_error;
        if (command == "validate")
            return run_validate(cfg, opt, log).all_passed() ? ok : validation_failure;
        err << "unknown subcommand '" << command << "'\n";
        return config_error;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const IntegrationError& e) {
        err << "integration failure: " << e.what() << " (last dt = " << format_double(e.dt()) << ")\n";
        return integration_error;
    } catch (const InadmissibleError& e) {
        err << "inadmissible: " << e.what() << '\n';
        return inadmissible;
    }
}

} // namespace strutlab::cli
