#pragma once

// Equilibria via shooting. Every equilibrium is (phi', phi'(1)) where
//   phi'' + gamma sin(phi) = 0,  phi(0) = 0,  phi'(0) = alpha,
// and it is admissible when |phi(1) - phi'(1) - kappa'(phi'(1))| <= Theta(phi'(1)).

#include "dynamics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace strutlab {

namespace detail {

/// Classical RK4 for an autonomous system, recording the state at every
/// `substeps`-th step (i.e. at the grid nodes).
template <std::size_t N, class Rhs>
std::vector<std::array<double, N>> rk4_on_grid(const Rhs& rhs, std::array<double, N> y, const Grid& grid,
                                                int substeps)
{
    const double h = grid.h() / substeps;
    std::vector<std::array<double, N>> out;
    out.reserve(grid.size());
    out.push_back(y);
    auto axpy = [](const std::array<double, N>& a, double c, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i)
            r[i] = a[i] + c * b[i];
        return r;
    };
    for (int node = 0; node < grid.intervals(); ++node) {
        for (int k = 0; k < substeps; ++k) {
            const auto k1 = rhs(y);
            const auto k2 = rhs(axpy(y, 0.5 * h, k1));
            const auto k3 = rhs(axpy(y, 0.5 * h, k2));
            const auto k4 = rhs(axpy(y, h, k3));
            for (std::size_t i = 0; i < N; ++i)
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push_back(y);
    }
    return out;
}

inline int substeps_for(const Grid& grid, int n_fine)
{
    if (n_fine == 0)
        n_fine = 10 * grid.intervals();
    if (n_fine < grid.intervals() || n_fine % grid.intervals() != 0)
        throw std::invalid_argument("shoot: n_fine must be a positive multiple of the grid interval count (got " +
                                    std::to_string(n_fine) + ")");
    return n_fine / grid.intervals();
}

} // namespace detail

struct ShotProfile {
    Field phi;
    Field phi_prime;
};

/// RK4 solve of the pendulum IVP on n_fine uniform substeps (default 10 n).
inline ShotProfile shoot(double alpha, double gamma, const Grid& grid, int n_fine = 0)
{
    const int sub = detail::substeps_for(grid, n_fine);
    auto rhs = [gamma](const std::array<double, 2>& y) { return std::array<double, 2>{y[1], -gamma * std::sin(y[0])}; };
    const auto traj = detail::rk4_on_grid<2>(rhs, {0.0, alpha}, grid, sub);
    Eigen::VectorXd phi(grid.size()), dphi(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        phi[i] = traj[i][0];
        dphi[i] = traj[i][1];
    }
    return {Field{grid, std::move(phi)}, Field{grid, std::move(dphi)}};
}

struct EquilibriumPoint {
    Field nu;          // phi'
    double nu_nat;     // phi'(1)
    double alpha;      // phi'(0)
    double d_value;    // phi(1) - phi'(1) - kappa'(phi'(1))
    double threshold;  // Theta(nu_nat)
    bool admissible;   // |D| <= Theta
    bool strict;       // |D| < Theta
    Field phi;
    int n_fine;

    RodState state() const { return {nu, nu_nat}; }
    ProductVector as_vector() const { return {nu, nu_nat}; }
};

inline EquilibriumPoint equilibrium_from_alpha(double alpha, const ModelParams& params, const Grid& grid,
                                               int n_fine = 0)
{
    const int sub = detail::substeps_for(grid, n_fine);
    ShotProfile shot = shoot(alpha, params.gamma, grid, sub * grid.intervals());
    const int n = grid.intervals();
    const double nu_nat = shot.phi_prime[n];
    const auto& set = params.constitutive;
    const double d = shot.phi[n] - nu_nat - set.kappa.prime(nu_nat);
    const double th = set.threshold.eval(nu_nat);
    return {std::move(shot.phi_prime),
            nu_nat,
            alpha,
            d,
            th,
            std::abs(d) <= th,
            std::abs(d) < th,
            std::move(shot.phi),
            sub * n};
}

/// Product norm of eval_F at the point; O(h^2) for an admissible equilibrium.
inline double equilibrium_residual(const EquilibriumPoint& point, const ModelParams& params)
{
    return product_norm(eval_F(point.state(), params));
}

struct BranchCurve {
    std::vector<EquilibriumPoint> points;
    std::vector<double> boundary_alphas; // |D| = Theta, bisected
};

/// Root of |D(alpha)| - Theta(nu_nat(alpha)) inside [lo, hi], bisected to `width`.
inline double bisect_admissibility_boundary(double lo, double hi, const ModelParams& params, const Grid& grid,
                                            int n_fine, double width = 1e-10)
{
    auto gap = [&](double a) {
        const EquilibriumPoint p = equilibrium_from_alpha(a, params, grid, n_fine);
        return std::abs(p.d_value) - p.threshold;
    };
    double g_lo = gap(lo);
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = gap(mid);
        if ((g_mid <= 0.0) == (g_lo <= 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline BranchCurve branch_sweep(double alpha_min, double alpha_max, int n_points, const ModelParams& params,
                                const Grid& grid, int n_fine = 0)
{
    if (!(alpha_min < alpha_max))
        throw std::invalid_argument("branch_sweep: alpha_min must be < alpha_max");
    if (n_points < 2)
        throw std::invalid_argument("branch_sweep: n_points must be >= 2");
    BranchCurve curve;
    curve.points.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        const double a = alpha_min + (alpha_max - alpha_min) * i / (n_points - 1);
        curve.points.push_back(equilibrium_from_alpha(a, params, grid, n_fine));
    }
    for (int i = 1; i < n_points; ++i) {
        const auto& p = curve.points[i - 1];
        const auto& q = curve.points[i];
        if (p.admissible != q.admissible)
            curve.boundary_alphas.push_back(bisect_admissibility_boundary(p.alpha, q.alpha, params, grid, n_fine));
    }
    return curve;
}

/// (theta0', theta0'(1)) where theta0'' + gamma cos(phi) theta0 = 0, theta0(0) = 0, theta0'(0) = 1.
/// The pendulum is re-integrated alongside so phi is available at every RK4 stage.
inline ProductVector theta0_solve(const EquilibriumPoint& eq, const ModelParams& params)
{
    const Grid grid = eq.nu.grid;
    const double gamma = params.gamma;
    auto rhs = [gamma](const std::array<double, 4>& y) {
        return std::array<double, 4>{y[1], -gamma * std::sin(y[0]), y[3], -gamma * std::cos(y[0]) * y[2]};
    };
    const auto traj =
        detail::rk4_on_grid<4>(rhs, {0.0, eq.alpha, 0.0, 1.0}, grid, detail::substeps_for(grid, eq.n_fine));
    Eigen::VectorXd dtheta(grid.size());
    for (int i = 0; i < grid.size(); ++i)
        dtheta[i] = traj[i][3];
    const double end = dtheta[grid.intervals()];
    return {Field{grid, std::move(dtheta)}, end};
}

struct TangentCheck {
    ProductVector fd_tangent;
    ProductVector theta0_tangent;
    double discrepancy;
};

/// Central difference of the branch alpha -> (nu, nu_nat) against theta0.
inline TangentCheck tangent_check(double alpha, const ModelParams& params, const Grid& grid, double step = 1e-4,
                                  int n_fine = 0)
{
    const EquilibriumPoint base = equilibrium_from_alpha(alpha, params, grid, n_fine);
    if (!base.strict)
        throw std::domain_error("tangent_check: equilibrium at alpha = " + std::to_string(alpha) +
                                " is not strictly admissible");
    const EquilibriumPoint plus = equilibrium_from_alpha(alpha + step, params, grid, n_fine);
    const EquilibriumPoint minus = equilibrium_from_alpha(alpha - step, params, grid, n_fine);
    ProductVector fd{Field{grid, (plus.nu.values - minus.nu.values) / (2.0 * step)},
                     (plus.nu_nat - minus.nu_nat) / (2.0 * step)};
    ProductVector th = theta0_solve(base, params);
    const double disc = product_norm(fd - th);
    return {std::move(fd), std::move(th), disc};
}

struct RefinedEquilibrium {
    EquilibriumPoint point;
    double residual;
    std::vector<std::pair<int, double>> history; // (n_fine, residual)
};

/// Re-shoots with doubled n_fine until the eval_F residual stops decreasing.
/// The residual floor is the O(h^2) quadrature error of the grid itself.
inline RefinedEquilibrium refine(const EquilibriumPoint& point, const ModelParams& params, int max_doublings = 6)
{
    const Grid grid = point.nu.grid;
    EquilibriumPoint best = point;
    double best_res = equilibrium_residual(point, params);
    RefinedEquilibrium out{best, best_res, {{point.n_fine, best_res}}};
    int n_fine = point.n_fine;
    for (int k = 0; k < max_doublings && best_res > 0.0; ++k) {
        n_fine *= 2;
        EquilibriumPoint cand = equilibrium_from_alpha(point.alpha, params, grid, n_fine);
        const double res = equilibrium_residual(cand, params);
        out.history.emplace_back(n_fine, res);
        if (!(res < best_res * (1.0 - 1e-6)))
            break;
        best = std::move(cand);
        best_res = res;
    }
    out.point = std::move(best);
    out.residual = best_res;
    return out;
}

} // namespace strutlab
