#include "strutlab/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace strutlab;

namespace {
ModelParams make(double gamma, double theta_a = 2.5, double theta_b = 0.0, double k = 1.0)
{
    return ModelParams(gamma, {KappaSpec::quadratic(k), RateSpec(1.0, 2.0), ThresholdSpec(theta_a, theta_b)});
}

RodState random_state(std::mt19937& rng, const Grid& g, double scale)
{
    std::normal_distribution<double> n(0.0, scale);
    const double a = n(rng), b = n(rng), c = n(rng);
    return {Field::sample(g, [&](double s) { return a + b * std::cos(3 * s) + c * s * s; }), n(rng)};
}
} // namespace

TEST(ModelParams, NegativeGammaRejected)
{
    EXPECT_THROW(make(-1.0), std::invalid_argument);
}

TEST(DrivingForce, Examples)
{
    const Grid g(32);
    const auto p = make(1.0);
    EXPECT_EQ(driving_force({Field::zeros(g), 0.0}, p), 0.0);
    EXPECT_NEAR(driving_force({Field::constant(g, 0.7), 0.0}, p), 0.7, 1e-15);
    EXPECT_NEAR(driving_force({Field::constant(g, 0.7), 0.7}, p), -0.7, 1e-15);
}

TEST(EvalF, StraightRodIsStationary)
{
    const auto F = eval_F({Field::zeros(Grid(16)), 0.0}, make(3.0));
    EXPECT_EQ(F.field.values.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(F.scalar, 0.0);
}

TEST(EvalF, NaturalConfigurationIsStationaryWithoutLoad)
{
    const double c = 0.8;
    const auto F = eval_F({Field::constant(Grid(16), c), c}, make(0.0, 1.0));
    EXPECT_NEAR(F.field.values.cwiseAbs().maxCoeff(), 0.0, 1e-15);
    EXPECT_EQ(F.scalar, 0.0);
}

TEST(EvalF, QuarterTurnClosedForm)
{
    auto err = [](int n) {
        const auto F = eval_F({Field::constant(Grid(n), M_PI / 2), 0.0}, make(1.0));
        double e = 0;
        for (int i = 0; i <= n; ++i) {
            const double s = F.field.grid.node(i);
            e = std::max(e, std::abs(F.field[i] - (-M_PI / 2 + 2 / M_PI * std::cos(M_PI * s / 2))));
        }
        return e;
    };
    EXPECT_LT(err(200), 1e-4);
    EXPECT_GE(err(100) / err(200), 3.5);
}

TEST(Liapunov, Examples)
{
    const Grid g(20);
    EXPECT_DOUBLE_EQ(liapunov({Field::zeros(g), 0.0}, make(2.0)), 2.0);
    EXPECT_NEAR(liapunov({Field::constant(g, 0.6), 0.6}, make(0.0)), 0.18, 1e-15);
}

TEST(Dissipation, ZeroAtRestAndNonpositive)
{
    const Grid g(40);
    EXPECT_EQ(dissipation_rate({Field::constant(g, 0.5), 0.5}, make(0.0)), 0.0);
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto p = make(4.0, 0.3);
        const RodState s = random_state(rng, g, 2.0);
        const double d = dissipation_rate(s, p);
        EXPECT_LE(d, 0.0);
        const auto F = eval_F(s, p);
        if (F.scalar == 0.0)
            EXPECT_NEAR(d, -std::pow(l2_norm(F.field), 2), 1e-12 * (1 + std::abs(d)));
    }
}

TEST(Regime, StraightRodSticks)
{
    EXPECT_EQ(regime({Field::zeros(Grid(8)), 0.0}, make(1.0)), Regime::stick);
}

TEST(Regime, SlipBeyondThreshold)
{
    // gamma = 0, mu = c, mu_nat = 0: D = c. Theta = 0.5 so c = 1.5 gives D - Theta = 1.
    const auto p = make(0.0, 0.5);
    const RodState s{Field::constant(Grid(8), 1.5), 0.0};
    EXPECT_EQ(regime(s, p), Regime::slip_positive);
    EXPECT_NEAR(eval_F(s, p).scalar, 1.0, 1e-14);
    const RodState m{Field::constant(Grid(8), -1.5), 0.0};
    EXPECT_EQ(regime(m, p), Regime::slip_negative);
    EXPECT_NEAR(eval_F(m, p).scalar, -1.0, 1e-14);
}

TEST(Regime, SignPropertyOnRandomStates)
{
    std::mt19937 rng(5);
    const Grid g(30);
    for (int i = 0; i < 200; ++i) {
        const auto p = make(3.0, 0.2, 0.4);
        const RodState s = random_state(rng, g, 3.0);
        const double d = driving_force(s, p);
        EXPECT_GE((d > 0 ? 1 : d < 0 ? -1 : 0) * eval_F(s, p).scalar, 0.0);
    }
}

TEST(Step, EquilibriumIsFixedPoint)
{
    const RodState s{Field::zeros(Grid(16)), 0.0};
    const auto out = step(s, make(2.0), 0.1, Tolerances{});
    EXPECT_EQ(out.state.mu.values.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(out.state.mu_nat, 0.0);
}

TEST(Step, LinearDecayWithoutLoad)
{
    const Grid g(50);
    const auto p = make(0.0, 10.0);
    const Field mu0 = Field::sample(g, [](double s) { return 0.4 * std::cos(2 * s); });
    const double mu_nat = 0.1;
    SimulationOptions opt;
    opt.t_end = 10.0;
    opt.eq_tol = 0.0;
    const auto rec = simulate({mu0, mu_nat}, p, opt);
    double worst = 0;
    for (std::size_t k = 0; k < rec.size(); ++k)
        for (int i = 0; i <= 50; ++i) {
            const double exact = mu_nat + (mu0[i] - mu_nat) * std::exp(-rec.times[k]);
            worst = std::max(worst, std::abs(rec.snapshots[k].mu[i] - exact));
        }
    EXPECT_LT(worst, 10 * opt.tol.abs);
    EXPECT_DOUBLE_EQ(rec.times.back(), 10.0);
}

TEST(Step, DormandPrinceIsFifthOrder)
{
    std::mt19937 rng(1);
    const Grid g(24);
    const auto p = make(4.0, 0.2);
    const RodState s = random_state(rng, g, 1.0);
    const auto rhs = packed_rhs(p, g);
    const Eigen::VectorXd y = pack(s);
    auto doubling_gap = [&](double h) {
        const Eigen::VectorXd full = dormand_prince_step(rhs, y, h).y;
        const Eigen::VectorXd half = dormand_prince_step(rhs, dormand_prince_step(rhs, y, h / 2).y, h / 2).y;
        return (full - half).norm();
    };
    // Local error is O(h^6): halving h shrinks the gap by ~64.
    const double order = std::log2(doubling_gap(0.01) / doubling_gap(0.005));
    EXPECT_GT(order, 5.5);
    EXPECT_LT(order, 7.5);
}

TEST(Simulate, TrivialInitialDataConvergesImmediately)
{
    const auto rec = simulate({Field::zeros(Grid(20)), 0.0}, make(4.0), SimulationOptions{});
    EXPECT_TRUE(rec.converged);
    EXPECT_EQ(rec.size(), 1u);
    EXPECT_EQ(rec.times.back(), 0.0);
    EXPECT_DOUBLE_EQ(rec.liapunov.front(), 4.0);
}

TEST(Simulate, UnloadedRodRelaxesToNaturalCurvature)
{
    const Grid g(40);
    const auto rec = simulate({Field::sample(g, [](double s) { return 0.2 * s; }), 0.05}, make(0.0), {});
    ASSERT_TRUE(rec.converged);
    EXPECT_LT(rec.norm_F.back(), 1e-10);
    const RodState& f = rec.final_state();
    EXPECT_NEAR(f.mu_nat, 0.05, 1e-12);
    EXPECT_LT((f.mu.values.array() - 0.05).abs().maxCoeff(), 1e-9);
}

TEST(Simulate, NonFiniteInitialDataRejected)
{
    RodState s{Field::zeros(Grid(8)), std::nan("")};
    EXPECT_THROW(simulate(s, make(1.0), {}), IntegrationError);
}

TEST(Simulate, SlipRunRecordsRegimeCrossings)
{
    SimulationOptions opt;
    opt.t_end = 40;
    const auto rec = simulate({Field::constant(Grid(200), 4.0), 0.0}, make(4.0, 0.5), opt);
    EXPECT_NE(rec.regimes.front(), Regime::stick);
    EXPECT_FALSE(rec.regime_crossings.empty());
    for (std::size_t k = 1; k < rec.size(); ++k)
        EXPECT_LE(rec.liapunov[k], rec.liapunov[k - 1] + 1e-9);
}

TEST(GlobalBound, TrivialRunMargin)
{
    // V(0, 0) = gamma and the elastic energy is 0, so the margin is V + gamma - 0 = 2 gamma.
    const auto rec = simulate({Field::zeros(Grid(20)), 0.0}, make(3.0), {});
    const auto b = global_bound_check(rec, make(3.0));
    EXPECT_TRUE(b.holds);
    EXPECT_DOUBLE_EQ(b.min_margin, 6.0);
}

TEST(GlobalBound, LargeInitialData)
{
    const Grid g(100);
    const auto p = make(4.0, 0.5);
    SimulationOptions opt;
    opt.t_end = 30;
    const auto rec = simulate({Field::constant(g, 50.0), -3.0}, p, opt);
    EXPECT_TRUE(global_bound_check(rec, p).holds);
}
