#pragma once

// Dormand-Prince 5(4) pair with a PI step-size controller, for autonomous
// systems y' = F(y) on Eigen vectors.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace strutlab {

struct Tolerances {
    double rel = 1e-8;
    double abs = 1e-8;
    double dt_min = 1e-12;
    double dt_max = 1.0;
};

struct EmbeddedStep {
    Eigen::VectorXd y;     // fifth-order solution
    Eigen::VectorXd error; // difference between the fifth- and fourth-order solutions
};

namespace dp45 {
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                        b6 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                        e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
} // namespace dp45

/// One unconditional Dormand-Prince step of size dt (dt may be negative).
template <class Rhs>
EmbeddedStep dormand_prince_step(const Rhs& rhs, const Eigen::VectorXd& y, double dt)
{
    using namespace dp45;
    const Eigen::VectorXd k1 = rhs(y);
    const Eigen::VectorXd k2 = rhs(y + dt * (a21 * k1));
    const Eigen::VectorXd k3 = rhs(y + dt * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = rhs(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 = rhs(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 = rhs(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    EmbeddedStep out;
    out.y = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = rhs(out.y);
    out.error = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return out;
}

/// RMS of err_i / (abs + rel * max(|y0_i|, |y1_i|)).
inline double scaled_error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                                const Tolerances& tol)
{
    const Eigen::ArrayXd scale = tol.abs + tol.rel * y0.array().abs().max(y1.array().abs());
    return std::sqrt((err.array() / scale).square().mean());
}

/// Gustafsson-style PI control, exponents from Hairer & Wanner for order 5.
class PIController {
public:
    double propose(double dt, double err, bool accepted)
    {
        constexpr double alpha = 0.7 / 5.0;
        constexpr double beta = 0.4 / 5.0;
        constexpr double safety = 0.9;
        constexpr double fac_min = 0.2;
        constexpr double fac_max = 5.0;
        double fac;
        if (err <= 0.0) {
            fac = fac_max;
        } else {
            fac = safety * std::pow(err, -alpha);
            if (accepted)
                fac *= std::pow(prev_err_, beta);
            fac = std::clamp(fac, fac_min, fac_max);
        }
        if (accepted) {
            prev_err_ = std::max(err, 1e-4);
        } else {
            fac = std::min(fac, 1.0);
        }
        return dt * fac;
    }

private:
    double prev_err_ = 1e-4;
};

/// Integration aborted; carries the last good state for diagnostics.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, Eigen::VectorXd state, double dt)
        : std::runtime_error(what), state_(std::move(state)), dt_(dt)
    {
    }
    const Eigen::VectorXd& state() const { return state_; }
    double dt() const { return dt_; }

private:
    Eigen::VectorXd state_;
    double dt_;
};

class StiffnessFailure : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

struct AdaptiveStep {
    Eigen::VectorXd y;
    double dt = 0.0;        // accepted step
    double error = 0.0;     // scaled error norm of the accepted step (<= 1)
    double next_dt = 0.0;   // controller suggestion for the following step
    int rejections = 0;
};

/// Retries with shrinking dt until the scaled error is <= 1.
template <class Rhs>
AdaptiveStep adaptive_step(const Rhs& rhs, const Eigen::VectorXd& y, double dt, const Tolerances& tol,
                           PIController& controller)
{
    if (!(tol.rel > 0.0) || !(tol.abs > 0.0))
        throw std::invalid_argument("tolerances must be > 0");
    dt = std::min(dt, tol.dt_max);
    AdaptiveStep out;
    for (;;) {
        if (!(dt >= tol.dt_min))
            throw StiffnessFailure("step size underflow: dt = " + std::to_string(dt) + " below dt_min", y, dt);
        EmbeddedStep trial = dormand_prince_step(rhs, y, dt);
        double err = scaled_error_norm(trial.error, y, trial.y, tol);
        if (!std::isfinite(err))
            err = std::numeric_limits<double>::infinity();
        if (err <= 1.0 && trial.y.allFinite()) {
            out.y = std::move(trial.y);
            out.dt = dt;
            out.error = err;
            out.next_dt = std::min(controller.propose(dt, err, true), tol.dt_max);
            return out;
        }
        ++out.rejections;
        dt = std::isfinite(err) ? controller.propose(dt, err, false) : 0.25 * dt;
    }
}

} // namespace strutlab
