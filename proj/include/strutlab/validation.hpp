#pragma once

// Invariant checks over a simulated trajectory and the equilibrium it reaches.

#include "spectral.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace strutlab {

struct InvariantResult {
    std::string name;
    bool passed;
    double measured;  // worst observed value of the checked quantity
    double threshold; // pass iff measured <= threshold (or as noted in detail)
    std::string detail;
};

struct InvariantReport {
    std::vector<InvariantResult> results;

    bool all_passed() const
    {
        for (const auto& r : results)
            if (!r.passed)
                return false;
        return true;
    }
};

/// Centered difference of V along the flow, using +-delta Dormand-Prince sub-steps.
inline double liapunov_rate_fd(const RodState& state, const ModelParams& params, double delta = 1e-4)
{
    const Grid grid = state.mu.grid;
    const auto rhs = packed_rhs(params, grid);
    const Eigen::VectorXd y = pack(state);
    const RodState plus = unpack(dormand_prince_step(rhs, y, delta).y, grid);
    const RodState minus = unpack(dormand_prince_step(rhs, y, -delta).y, grid);
    return (liapunov(plus, params) - liapunov(minus, params)) / (2.0 * delta);
}

inline InvariantResult check_liapunov_descent(const TrajectoryRecord& rec, double slack = 1e-9)
{
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        const double inc = rec.liapunov[k] - rec.liapunov[k - 1];
        if (inc > worst) {
            worst = inc;
            at = k;
        }
    }
    if (rec.size() < 2)
        worst = 0.0;
    std::ostringstream os;
    os << "max V(t_k+1) - V(t_k) over " << rec.size() - 1 << " steps, at record " << at;
    return {"liapunov_descent", worst <= slack, worst, slack, os.str()};
}

/// |fd dV/dt - dissipation| / (1e-3 (1 + |dissipation|)) at interior snapshots; pass iff <= 1.
inline InvariantResult check_liapunov_identity(const TrajectoryRecord& rec, const ModelParams& params,
                                               double rel = 1e-3)
{
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < rec.size(); ++k) {
        const double fd = liapunov_rate_fd(rec.snapshots[k], params);
        const double diss = dissipation_rate(rec.snapshots[k], params);
        worst = std::max(worst, std::abs(fd - diss) / (rel * (1.0 + std::abs(diss))));
    }
    return {"liapunov_identity", worst <= 1.0, worst, 1.0,
            "max |dV/dt(fd) - dissipation| / (1e-3 (1 + |dissipation|))"};
}

/// sign(D) * mu_nat_t >= 0 at every snapshot.
inline InvariantResult check_sign_property(const TrajectoryRecord& rec, const ModelParams& params)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        const double f2 = eval_F(rec.snapshots[k], params).scalar;
        const double d = rec.d_hat[k];
        const double prod = (d > 0.0 ? 1.0 : d < 0.0 ? -1.0 : 0.0) * f2;
        worst = std::min(worst, prod);
    }
    return {"sign_property", worst >= 0.0, worst < 0.0 ? -worst : 0.0, 0.0, "max of -sign(D) * F2 over snapshots"};
}

/// On consecutive stick snapshots mu_nat stays constant to integrator tolerance.
inline InvariantResult check_stick_conservation(const TrajectoryRecord& rec, const Tolerances& tol)
{
    double worst_ratio = 0.0;
    for (std::size_t k = 1; k < rec.size(); ++k) {
        if (rec.regimes[k] != Regime::stick || rec.regimes[k - 1] != Regime::stick)
            continue;
        const double a = rec.snapshots[k - 1].mu_nat;
        const double b = rec.snapshots[k].mu_nat;
        const double allowed = 10.0 * (tol.abs + tol.rel * std::max(std::abs(a), std::abs(b)));
        worst_ratio = std::max(worst_ratio, std::abs(b - a) / allowed);
    }
    return {"stick_conservation", worst_ratio <= 1.0, worst_ratio, 1.0,
            "max |delta mu_nat| / (10 tol) across stick-stick steps"};
}

inline InvariantResult check_global_bound(const TrajectoryRecord& rec, const ModelParams& params)
{
    const BoundCheck b = global_bound_check(rec, params);
    return {"global_bound", b.holds, -b.min_margin, 0.0, "-(V(initial) + gamma - elastic energy), minimised over run"};
}

/// apply_DF against central differences of eval_F at the given states, random unit directions.
inline InvariantResult check_frechet(const std::vector<RodState>& states, const ModelParams& params,
                                     std::uint32_t seed = 7, double eps = 1e-6, double rel = 1e-5)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (const RodState& st : states) {
        const Grid g = st.mu.grid;
        Eigen::VectorXd dir(g.size());
        for (int i = 0; i < g.size(); ++i)
            dir[i] = gauss(rng);
        ProductVector d{Field{g, dir}, gauss(rng)};
        const double scale = product_norm(d);
        d.field.values /= scale;
        d.scalar /= scale;
        const RodState plus{Field{g, st.mu.values + eps * d.field.values}, st.mu_nat + eps * d.scalar};
        const RodState minus{Field{g, st.mu.values - eps * d.field.values}, st.mu_nat - eps * d.scalar};
        const ProductVector fp = eval_F(plus, params);
        const ProductVector fm = eval_F(minus, params);
        const ProductVector fd{Field{g, (fp.field.values - fm.field.values) / (2.0 * eps)},
                               (fp.scalar - fm.scalar) / (2.0 * eps)};
        const ProductVector an = apply_DF(st, params, d);
        worst = std::max(worst, product_norm(fd - an) / std::max(product_norm(an), 1e-300));
    }
    return {"frechet_derivative", worst <= rel, worst, rel, "max relative error of apply_DF vs central FD"};
}

/// ||L(theta0', theta0'(1))|| is O(h^2): shrinks >= 3.5x when the grid is halved.
inline InvariantResult check_kernel_residual(double alpha, const ModelParams& params, const Grid& grid)
{
    const EquilibriumPoint coarse = equilibrium_from_alpha(alpha, params, grid);
    const EquilibriumPoint fine = equilibrium_from_alpha(alpha, params, Grid(2 * grid.intervals()));
    const double r1 = product_norm(apply_L(coarse, params, theta0_solve(coarse, params)));
    const double r2 = product_norm(apply_L(fine, params, theta0_solve(fine, params)));
    const bool negligible = r1 <= 1e-12;
    const double ratio = negligible ? std::numeric_limits<double>::infinity() : r1 / std::max(r2, 1e-300);
    std::ostringstream os;
    os.precision(6);
    os << "alpha = " << alpha << ", residual(n) = " << r1 << ", residual(2n) = " << r2 << ", ratio";
    return {"kernel_residual", negligible || ratio >= 3.5, ratio, 3.5, os.str() + " (pass iff >= 3.5)"};
}

inline InvariantResult check_tangent(double alpha, const ModelParams& params, const Grid& grid, double tol = 1e-4)
{
    const TangentCheck t = tangent_check(alpha, params, grid);
    std::ostringstream os;
    os << "branch tangent vs theta0 at alpha = " << alpha;
    return {"tangent_check", t.discrepancy <= tol, t.discrepancy, tol, os.str()};
}

/// Full suite on one trajectory. The spectral checks use the equilibrium the
/// run converged to when it is strictly admissible, else the straight rod.
inline InvariantReport run_invariant_suite(const TrajectoryRecord& rec, const ModelParams& params,
                                           const Tolerances& tol)
{
    InvariantReport rep;
    rep.results.push_back(check_liapunov_descent(rec));
    rep.results.push_back(check_liapunov_identity(rec, params));
    rep.results.push_back(check_sign_property(rec, params));
    rep.results.push_back(check_stick_conservation(rec, tol));
    rep.results.push_back(check_global_bound(rec, params));

    std::vector<RodState> probes;
    const std::size_t m = rec.size();
    for (std::size_t k : {std::size_t{0}, m / 4, m / 2, (3 * m) / 4, m - 1})
        probes.push_back(rec.snapshots[std::min(k, m - 1)]);
    rep.results.push_back(check_frechet(probes, params));

    const Grid grid = rec.final_state().mu.grid;
    double alpha = 0.0;
    if (rec.converged) {
        const EquilibriumPoint eq = equilibrium_from_alpha(rec.final_state().mu[0], params, grid);
        if (eq.strict)
            alpha = eq.alpha;
    }
    rep.results.push_back(check_kernel_residual(alpha, params, grid));
    rep.results.push_back(check_tangent(alpha, params, grid));
    return rep;
}

} // namespace strutlab
