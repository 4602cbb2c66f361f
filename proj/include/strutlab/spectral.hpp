#pragma once

// Linearization at an equilibrium (nu, nu_nat) with phi = int_0^s nu:
//
//   L(xi, xi_nat) = ( xi_nat - xi + int_0^1 K(s, z) xi(z) dz , 0 ),
//   K(s, z) = gamma * int_{max(s,z)}^1 cos(phi).
//
// K is symmetric, so the Nystrom matrix W^{1/2} K W^{1/2} (trapezoid
// weights W) is symmetric too; its eigenvalues rho give lambda = rho - 1.

#include "equilibria.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strutlab {

class EigensolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KernelMatrix {
    Grid grid;
    Eigen::VectorXd tail_cos;     // c_i = gamma * int_{s_i}^1 cos(phi), so K_ij = c_max(i,j)
    Eigen::VectorXd sqrt_weights;
    Eigen::MatrixXd symmetric;    // W^{1/2} K W^{1/2}

    double kernel(int i, int j) const { return tail_cos[std::max(i, j)]; }

    /// Nystrom action sum_j K_ij w_j xi_j, recovered from the symmetric form.
    Eigen::VectorXd apply(const Eigen::VectorXd& xi) const
    {
        return (symmetric * sqrt_weights.cwiseProduct(xi)).cwiseQuotient(sqrt_weights);
    }
};

namespace detail {
inline Eigen::VectorXd kernel_tail_cos(const Field& phi, double gamma)
{
    return gamma * tail_integral(Field{phi.grid, phi.values.array().cos().matrix()}).values;
}
} // namespace detail

inline KernelMatrix assemble_kernel(const EquilibriumPoint& eq, const ModelParams& params)
{
    const Grid grid = eq.phi.grid;
    const int m = grid.size();
    KernelMatrix km{grid, detail::kernel_tail_cos(eq.phi, params.gamma), grid.weights().cwiseSqrt(),
                    Eigen::MatrixXd(m, m)};
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            km.symmetric(i, j) = (km.sqrt_weights[i] * km.sqrt_weights[j]) * km.tail_cos[std::max(i, j)];
    return km;
}

/// Matrix-free L using prefix/suffix sums; same quadrature as the Nystrom matrix.
inline ProductVector apply_L(const EquilibriumPoint& eq, const ModelParams& params, const ProductVector& dir)
{
    const Grid grid = dir.field.grid;
    if (!(grid == eq.phi.grid))
        throw std::invalid_argument("apply_L: direction grid does not match equilibrium grid");
    const Eigen::VectorXd c = detail::kernel_tail_cos(eq.phi, params.gamma);
    const Eigen::VectorXd w = grid.weights();
    const Eigen::VectorXd& xi = dir.field.values;
    const int m = grid.size();

    // sum_j c_max(i,j) w_j xi_j = c_i * sum_{j<=i} w_j xi_j + sum_{j>i} c_j w_j xi_j
    Eigen::VectorXd suffix(m);
    suffix[m - 1] = 0.0;
    for (int i = m - 2; i >= 0; --i)
        suffix[i] = suffix[i + 1] + c[i + 1] * w[i + 1] * xi[i + 1];
    Eigen::VectorXd out(m);
    double prefix = 0.0;
    for (int i = 0; i < m; ++i) {
        prefix += w[i] * xi[i];
        out[i] = dir.scalar - xi[i] + c[i] * prefix + suffix[i];
    }
    return {Field{grid, std::move(out)}, 0.0};
}

/// Exact derivative of the discrete eval_F at an arbitrary state.
inline ProductVector apply_DF(const RodState& state, const ModelParams& params, const ProductVector& dir)
{
    const Grid grid = state.mu.grid;
    if (!(grid == dir.field.grid))
        throw std::invalid_argument("apply_DF: direction grid does not match state grid");
    const Field theta = cumulative(state.mu);
    const Field big_xi = cumulative(dir.field);
    const Field weighted{grid, theta.values.array().cos().matrix().cwiseProduct(big_xi.values)};
    Eigen::VectorXd first = (dir.scalar - dir.field.values.array()).matrix() + params.gamma * tail_integral(weighted).values;

    const auto& set = params.constitutive;
    const double mn = state.mu_nat;
    const double d = driving_force(state, params);
    const double th = set.threshold.eval(mn);
    const double dd = integral(dir.field) - dir.scalar - set.kappa.second(mn) * dir.scalar;
    const double dth = set.threshold.prime(mn) * dir.scalar;
    const double second = set.rate.prime(d - th) * (dd - dth) + set.rate.prime(-th - d) * (dd + dth);
    return {Field{grid, std::move(first)}, second};
}

struct SpectrumReport {
    std::vector<double> eigenvalues;          // Nystrom values and the exact 0, descending
    std::vector<double> nystrom_eigenvalues;  // rho - 1 from the L2 component, descending
    ProductVector zero_eigenvector;           // (theta0', theta0'(1))
    int n_unstable = 0;
    double pos_tol = 0.0;
    double zero_residual = 0.0;
    bool accumulates_at_minus_one = true;
    std::vector<Field> eigenfunctions;        // leading L2-normalized eigenfunctions, if requested
};

/// Largest Nystrom eigenvalue of L (rho_max - 1), values only.
inline double largest_eigenvalue(const EquilibriumPoint& eq, const ModelParams& params)
{
    const KernelMatrix km = assemble_kernel(eq, params);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(km.symmetric, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw EigensolveError("largest_eigenvalue: symmetric eigensolve failed");
    return solver.eigenvalues()[solver.eigenvalues().size() - 1] - 1.0;
}

inline SpectrumReport spectrum(const EquilibriumPoint& eq, const ModelParams& params,
                               std::optional<double> pos_tol = std::nullopt, int n_eigenfunctions = 0)
{
    const KernelMatrix km = assemble_kernel(eq, params);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        km.symmetric, n_eigenfunctions > 0 ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw EigensolveError("spectrum: symmetric eigensolve failed (n = " + std::to_string(km.grid.intervals()) +
                              ", gamma = " + std::to_string(params.gamma) +
                              ", max |entry| = " + std::to_string(km.symmetric.cwiseAbs().maxCoeff()) + ")");

    SpectrumReport rep{{}, {}, theta0_solve(eq, params)};
    const Eigen::VectorXd& rho = solver.eigenvalues(); // ascending
    const int m = static_cast<int>(rho.size());
    rep.nystrom_eigenvalues.reserve(m);
    for (int i = m - 1; i >= 0; --i)
        rep.nystrom_eigenvalues.push_back(rho[i] - 1.0);

    rep.zero_residual = product_norm(apply_L(eq, params, rep.zero_eigenvector));
    rep.pos_tol = pos_tol.value_or(std::max(1e-8, 10.0 * rep.zero_residual));
    rep.n_unstable = static_cast<int>(std::count_if(rep.nystrom_eigenvalues.begin(), rep.nystrom_eigenvalues.end(),
                                                    [&](double l) { return l > rep.pos_tol; }));

    rep.eigenvalues = rep.nystrom_eigenvalues;
    rep.eigenvalues.insert(std::upper_bound(rep.eigenvalues.begin(), rep.eigenvalues.end(), 0.0, std::greater<>()),
                           0.0);

    for (int k = 0; k < std::min(n_eigenfunctions, m); ++k) {
        Eigen::VectorXd v = solver.eigenvectors().col(m - 1 - k).cwiseQuotient(km.sqrt_weights);
        Field fn{km.grid, std::move(v)};
        const double norm = l2_norm(fn);
        if (norm > 0.0)
            fn.values /= norm;
        // Sign convention: positive at s = 0.
        if (fn.values[0] < 0.0)
            fn.values = -fn.values;
        rep.eigenfunctions.push_back(std::move(fn));
    }
    return rep;
}

/// Bisection on gamma -> lambda_max of the straight rod, to `width`.
inline double buckling_threshold(const ConstitutiveSet& set, const Grid& grid, double gamma_lo, double gamma_hi,
                                 double width = 1e-6)
{
    if (!(gamma_lo < gamma_hi))
        throw std::invalid_argument("buckling_threshold: empty bracket");
    auto lambda_max = [&](double gamma) {
        const ModelParams p(gamma, set);
        return largest_eigenvalue(equilibrium_from_alpha(0.0, p, grid, grid.intervals()), p);
    };
    double f_lo = lambda_max(gamma_lo);
    const double f_hi = lambda_max(gamma_hi);
    if ((f_lo > 0.0) == (f_hi > 0.0))
        throw std::domain_error("buckling_threshold: no sign change of the largest eigenvalue in [" +
                                std::to_string(gamma_lo) + ", " + std::to_string(gamma_hi) + "]");
    while (gamma_hi - gamma_lo > width) {
        const double mid = 0.5 * (gamma_lo + gamma_hi);
        const double f_mid = lambda_max(mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            gamma_lo = mid;
            f_lo = f_mid;
        } else {
            gamma_hi = mid;
        }
    }
    return 0.5 * (gamma_lo + gamma_hi);
}

} // namespace strutlab
