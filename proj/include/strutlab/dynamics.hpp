#pragma once

// Quasistatic strut dynamics on L2(0,1) x R:
//
//   mu_t     = mu_nat - mu + gamma * int_s^1 sin(theta) dsigma,  theta = int_0^s mu
//   mu_nat_t = f(D - Theta(mu_nat)) - f(-Theta(mu_nat) - D)
//
// with driving force D = int mu - mu_nat - kappa'(mu_nat).

#include "constitutive.hpp"
#include "discretization.hpp"
#include "embedded_rk.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace strutlab {

struct RodState {
    Field mu;
    double mu_nat = 0.0;

    static RodState trivial(const Grid& grid) { return {Field::zeros(grid), 0.0}; }
    bool all_finite() const { return mu.all_finite() && std::isfinite(mu_nat); }
};

struct ModelParams {
    double gamma;
    ConstitutiveSet constitutive;

    ModelParams(double load, ConstitutiveSet set) : gamma(load), constitutive(std::move(set))
    {
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("model: gamma must be finite and >= 0");
    }
};

using StateVelocity = ProductVector;

inline double driving_force(const RodState& state, const ModelParams& params)
{
    return integral(state.mu) - state.mu_nat - params.constitutive.kappa.prime(state.mu_nat);
}

/// Slip rate of the natural curvature for a given driving force.
inline double natural_curvature_rate(double d_value, double mu_nat, const ConstitutiveSet& set)
{
    const double threshold = set.threshold.eval(mu_nat);
    return set.rate.eval(d_value - threshold) - set.rate.eval(-threshold - d_value);
}

inline StateVelocity eval_F(const RodState& state, const ModelParams& params)
{
    const Field g = tail_sine_integral(state.mu);
    Eigen::VectorXd f1 = (state.mu_nat - state.mu.values.array()).matrix() + params.gamma * g.values;
    const double f2 = natural_curvature_rate(driving_force(state, params), state.mu_nat, params.constitutive);
    return {Field{state.mu.grid, std::move(f1)}, f2};
}

/// V = 1/2 int (mu - mu_nat)^2 + kappa(mu_nat) + gamma int cos(theta)
inline double liapunov(const RodState& state, const ModelParams& params)
{
    const Eigen::VectorXd w = state.mu.grid.weights();
    const Eigen::ArrayXd dev = state.mu.values.array() - state.mu_nat;
    const Field theta = cumulative(state.mu);
    return 0.5 * w.dot((dev * dev).matrix()) + params.constitutive.kappa.eval(state.mu_nat) +
           params.gamma * w.dot(theta.values.array().cos().matrix());
}

/// Stored-energy part of V, the quantity bounded by V(initial) + gamma.
inline double elastic_energy(const RodState& state, const ModelParams& params)
{
    const Eigen::VectorXd w = state.mu.grid.weights();
    const Eigen::ArrayXd dev = state.mu.values.array() - state.mu_nat;
    return 0.5 * w.dot((dev * dev).matrix()) + params.constitutive.kappa.eval(state.mu_nat);
}

/// -int F1^2 - |D| |F2|; the rate of V along the flow.
inline double dissipation_rate(const RodState& state, const ModelParams& params)
{
    const StateVelocity v = eval_F(state, params);
    const double d = driving_force(state, params);
    return -v.field.grid.weights().dot(v.field.values.cwiseAbs2()) - std::abs(d) * std::abs(v.scalar);
}

enum class Regime { stick, slip_positive, slip_negative };

inline const char* to_string(Regime r)
{
    switch (r) {
    case Regime::stick:
        return "stick";
    case Regime::slip_positive:
        return "slip_positive";
    case Regime::slip_negative:
        return "slip_negative";
    }
    return "unknown";
}

inline Regime regime(const RodState& state, const ModelParams& params)
{
    const double d = driving_force(state, params);
    if (std::abs(d) <= params.constitutive.threshold.eval(state.mu_nat))
        return Regime::stick;
    return d > 0.0 ? Regime::slip_positive : Regime::slip_negative;
}

/// Contact moment M = (mu - mu_nat) + mu_t with mu_t taken from F1.
inline Field contact_moment(const RodState& state, const ModelParams& params)
{
    const StateVelocity v = eval_F(state, params);
    return {state.mu.grid, (state.mu.values.array() - state.mu_nat).matrix() + v.field.values};
}

// Flat layout used by the integrator: [mu_0 .. mu_n, mu_nat].
inline Eigen::VectorXd pack(const RodState& state)
{
    const int m = state.mu.size();
    Eigen::VectorXd y(m + 1);
    y.head(m) = state.mu.values;
    y[m] = state.mu_nat;
    return y;
}

inline RodState unpack(const Eigen::VectorXd& y, const Grid& grid)
{
    const int m = grid.size();
    return {Field{grid, y.head(m)}, y[m]};
}

inline auto packed_rhs(const ModelParams& params, const Grid& grid)
{
    return [&params, grid](const Eigen::VectorXd& y) {
        const StateVelocity v = eval_F(unpack(y, grid), params);
        Eigen::VectorXd dy(y.size());
        dy.head(grid.size()) = v.field.values;
        dy[grid.size()] = v.scalar;
        return dy;
    };
}

struct StepOutcome {
    RodState state;
    double dt = 0.0;
    double error = 0.0;
    double next_dt = 0.0;
};

inline StepOutcome step(const RodState& state, const ModelParams& params, double dt_suggestion,
                        const Tolerances& tol, PIController& controller)
{
    const Grid grid = state.mu.grid;
    AdaptiveStep s = adaptive_step(packed_rhs(params, grid), pack(state), dt_suggestion, tol, controller);
    return {unpack(s.y, grid), s.dt, s.error, s.next_dt};
}

inline StepOutcome step(const RodState& state, const ModelParams& params, double dt_suggestion,
                        const Tolerances& tol)
{
    PIController controller;
    return step(state, params, dt_suggestion, tol, controller);
}

struct SimulationOptions {
    double t_end = 200.0;
    Tolerances tol;
    double eq_tol = 1e-10;
    double dt_initial = 1e-3;
    std::size_t max_steps = 2'000'000;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<RodState> snapshots;
    std::vector<double> liapunov;
    std::vector<double> d_hat;
    std::vector<double> threshold;
    std::vector<Regime> regimes;
    std::vector<double> step_sizes; // 0 for the initial record
    std::vector<double> norm_F;
    std::vector<double> regime_crossings; // times where |D| - Theta changes sign
    bool converged = false;

    std::size_t size() const { return times.size(); }
    const RodState& final_state() const { return snapshots.back(); }
};

namespace detail {
inline void append_record(TrajectoryRecord& rec, double t, double dt, const RodState& state,
                          const ModelParams& params)
{
    const double d = driving_force(state, params);
    const double th = params.constitutive.threshold.eval(state.mu_nat);
    if (!rec.times.empty()) {
        const double prev = std::abs(rec.d_hat.back()) - rec.threshold.back();
        const double cur = std::abs(d) - th;
        if ((prev <= 0.0) != (cur <= 0.0)) {
            const double t0 = rec.times.back();
            rec.regime_crossings.push_back(prev == cur ? t : t0 + (t - t0) * prev / (prev - cur));
        }
    }
    rec.times.push_back(t);
    rec.snapshots.push_back(state);
    rec.liapunov.push_back(liapunov(state, params));
    rec.d_hat.push_back(d);
    rec.threshold.push_back(th);
    rec.regimes.push_back(regime(state, params));
    rec.step_sizes.push_back(dt);
    rec.norm_F.push_back(product_norm(eval_F(state, params)));
}
} // namespace detail

/// Integrates until t_end or until the product norm of F drops below eq_tol.
inline TrajectoryRecord simulate(const RodState& initial, const ModelParams& params, const SimulationOptions& opt)
{
    if (!(opt.t_end > 0.0))
        throw std::invalid_argument("simulate: t_end must be > 0");
    if (!initial.all_finite())
        throw IntegrationError("simulate: non-finite initial state", pack(initial), 0.0);

    TrajectoryRecord rec;
    detail::append_record(rec, 0.0, 0.0, initial, params);
    if (rec.norm_F.back() < opt.eq_tol) {
        rec.converged = true;
        return rec;
    }

    PIController controller;
    RodState state = initial;
    double t = 0.0;
    double dt = opt.dt_initial;
    for (std::size_t k = 0; k < opt.max_steps && t < opt.t_end; ++k) {
        dt = std::min(dt, opt.t_end - t);
        StepOutcome s = step(state, params, dt, opt.tol, controller);
        if (!s.state.all_finite())
            throw IntegrationError("simulate: non-finite state at t = " + std::to_string(t), pack(state), s.dt);
        // The last step may land a hair short of t_end through roundoff.
        t = (opt.t_end - (t + s.dt) < 1e-12 * opt.t_end) ? opt.t_end : t + s.dt;
        state = std::move(s.state);
        dt = s.next_dt;
        detail::append_record(rec, t, s.dt, state, params);
        if (rec.norm_F.back() < opt.eq_tol) {
            rec.converged = true;
            break;
        }
    }
    return rec;
}

struct BoundCheck {
    bool holds = true;
    double min_margin = std::numeric_limits<double>::infinity();
};

/// 1/2 int (mu - mu_nat)^2 + kappa(mu_nat) <= V(initial) + gamma at every snapshot.
inline BoundCheck global_bound_check(const TrajectoryRecord& rec, const ModelParams& params)
{
    if (rec.size() == 0)
        throw std::invalid_argument("global_bound_check: empty record");
    const double bound = rec.liapunov.front() + params.gamma;
    BoundCheck out;
    for (const RodState& s : rec.snapshots) {
        const double margin = bound - elastic_energy(s, params);
        out.min_margin = std::min(out.min_margin, margin);
    }
    out.holds = out.min_margin >= 0.0;
    return out;
}

} // namespace strutlab
