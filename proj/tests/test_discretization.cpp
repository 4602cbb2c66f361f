#include "strutlab/discretization.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace strutlab;

namespace {
double sup_error(const Field& f, double (*exact)(double))
{
    double e = 0;
    for (int i = 0; i < f.size(); ++i)
        e = std::max(e, std::abs(f[i] - exact(f.grid.node(i))));
    return e;
}
} // namespace

TEST(Grid, RejectsTooFewIntervals)
{
    EXPECT_THROW(Grid(4), std::invalid_argument);
    EXPECT_NO_THROW(Grid(8));
}

TEST(Grid, WeightsSumToOne)
{
    const Grid g(37);
    EXPECT_NEAR(g.weights().sum(), 1.0, 1e-15);
    EXPECT_EQ(g.size(), 38);
    EXPECT_DOUBLE_EQ(g.node(37), 1.0);
}

TEST(Integral, ExactForConstantsAndLinear)
{
    const Grid g(50);
    EXPECT_NEAR(integral(Field::constant(g, 1.0)), 1.0, 1e-15);
    EXPECT_NEAR(integral(Field::sample(g, [](double s) { return s; })), 0.5, 1e-15);
}

TEST(Integral, Sine)
{
    const Grid g(100);
    EXPECT_NEAR(integral(Field::sample(g, [](double s) { return std::sin(M_PI * s); })), 2 / M_PI, 2e-4);
}

TEST(Integral, SecondOrderUnderRefinement)
{
    auto err = [](int n) {
        return std::abs(integral(Field::sample(Grid(n), [](double s) { return std::exp(s); })) - (M_E - 1));
    };
    const double ratio = err(40) / err(80);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(Cumulative, ConstantsAndZero)
{
    const Grid g(20);
    const Field c = cumulative(Field::constant(g, 1.0));
    for (int i = 0; i < g.size(); ++i)
        EXPECT_NEAR(c[i], g.node(i), 1e-15);
    EXPECT_EQ(cumulative(Field::zeros(g)).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Cumulative, Cosine)
{
    const Field c = cumulative(Field::sample(Grid(200), [](double s) { return std::cos(M_PI * s / 2); }));
    EXPECT_LT(sup_error(c, [](double s) { return 2 / M_PI * std::sin(M_PI * s / 2); }), 1e-4);
}

TEST(TailIntegral, VanishesAtOneAndComplementsCumulative)
{
    const Field f = Field::sample(Grid(64), [](double s) { return std::exp(-s) * (1 + s * s); });
    const Field t = tail_integral(f);
    const Field c = cumulative(f);
    EXPECT_EQ(t[64], 0.0);
    for (int i = 0; i <= 64; ++i)
        EXPECT_NEAR(t[i] + c[i], integral(f), 1e-14);
}

TEST(TailSine, Zero)
{
    EXPECT_EQ(tail_sine_integral(Field::zeros(Grid(16))).values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TailSine, QuarterTurn)
{
    const Field t = tail_sine_integral(Field::constant(Grid(200), M_PI / 2));
    EXPECT_NEAR(t[0], 2 / M_PI, 1e-4);
    EXPECT_LT(sup_error(t, [](double s) { return 2 / M_PI * std::cos(M_PI * s / 2); }), 1e-4);
}

TEST(TailSine, ConstantCurvatureClosedFormSecondOrder)
{
    for (double c : {-2.0, 0.3, 1.0, 3.0}) {
        auto err = [c](int n) {
            const Field t = tail_sine_integral(Field::constant(Grid(n), c));
            double e = 0;
            for (int i = 0; i <= n; ++i) {
                const double s = t.grid.node(i);
                e = std::max(e, std::abs(t[i] - (std::cos(c * s) - std::cos(c)) / c));
            }
            return e;
        };
        const double ratio = err(50) / err(100);
        EXPECT_GE(ratio, 3.5) << "c = " << c;
        EXPECT_LE(ratio, 4.5) << "c = " << c;
    }
}

TEST(Norms, Basics)
{
    const Grid g(100);
    EXPECT_NEAR(l2_norm(Field::constant(g, 1.0)), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(product_norm(Field::zeros(g), 3.0), 3.0);
    EXPECT_NEAR(l2_norm(Field::sample(g, [](double s) { return s; })), 1 / std::sqrt(3.0), 1e-4);
}

TEST(Shape, StraightRod)
{
    const PlanarCurve c = reconstruct_shape(Field::zeros(Grid(10)));
    for (int i = 0; i <= 10; ++i) {
        EXPECT_NEAR(c.x[i], i / 10.0, 1e-15);
        EXPECT_EQ(c.y[i], 0.0);
    }
}

TEST(Shape, CircularArcAndInextensibility)
{
    const double k = 2.0;
    auto err = [k](int n) {
        const PlanarCurve c = reconstruct_shape(Field::constant(Grid(n), k));
        double e = 0;
        for (int i = 0; i <= n; ++i) {
            const double s = static_cast<double>(i) / n;
            e = std::max({e, std::abs(c.x[i] - std::sin(k * s) / k), std::abs(c.y[i] - (1 - std::cos(k * s)) / k)});
        }
        return std::pair{e, std::abs(c.length() - 1.0)};
    };
    const auto [e1, l1] = err(100);
    const auto [e2, l2] = err(200);
    EXPECT_LT(e1, 1e-3);
    EXPECT_LT(l1, 1e-3);
    EXPECT_GE(e1 / e2, 3.5);
    EXPECT_LT(l2, l1);
}
