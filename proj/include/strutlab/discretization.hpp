#pragma once

// Uniform grid on [0,1] with composite trapezoid quadrature. Every spatial
// integral in the library goes through this header.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace strutlab {

class Grid {
public:
    static constexpr int min_intervals = 8;

    explicit Grid(int intervals) : n_(intervals)
    {
        if (intervals < min_intervals)
            throw std::invalid_argument("grid: interval count n must be >= " + std::to_string(min_intervals) +
                                        " (got " + std::to_string(intervals) + ")");
    }

    int intervals() const { return n_; }
    int size() const { return n_ + 1; }
    double h() const { return 1.0 / n_; }
    double node(int i) const { return i == n_ ? 1.0 : static_cast<double>(i) / n_; }
    double weight(int i) const { return (i == 0 || i == n_) ? 0.5 * h() : h(); }

    Eigen::VectorXd nodes() const
    {
        Eigen::VectorXd s(size());
        for (int i = 0; i < size(); ++i)
            s[i] = node(i);
        return s;
    }

    Eigen::VectorXd weights() const
    {
        Eigen::VectorXd w = Eigen::VectorXd::Constant(size(), h());
        w[0] = w[n_] = 0.5 * h();
        return w;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int n_;
};

/// A function on [0,1] sampled at the grid nodes.
struct Field {
    Grid grid;
    Eigen::VectorXd values;

    Field(const Grid& g, Eigen::VectorXd v) : grid(g), values(std::move(v))
    {
        if (values.size() != grid.size())
            throw std::invalid_argument("field: value count " + std::to_string(values.size()) +
                                        " does not match grid size " + std::to_string(grid.size()));
    }

    static Field zeros(const Grid& g) { return {g, Eigen::VectorXd::Zero(g.size())}; }
    static Field constant(const Grid& g, double c) { return {g, Eigen::VectorXd::Constant(g.size(), c)}; }

    static Field sample(const Grid& g, const std::function<double(double)>& fn)
    {
        Eigen::VectorXd v(g.size());
        for (int i = 0; i < g.size(); ++i)
            v[i] = fn(g.node(i));
        return {g, std::move(v)};
    }

    int size() const { return grid.size(); }
    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }
    bool all_finite() const { return values.allFinite(); }
};

/// An element of L2(0,1) x R: a field paired with a scalar.
struct ProductVector {
    Field field;
    double scalar = 0.0;
};

inline double integral(const Field& f)
{
    return f.grid.weights().dot(f.values);
}

/// value_i = trapezoid integral of f over [0, s_i].
inline Field cumulative(const Field& f)
{
    const int n = f.grid.intervals();
    const double half_h = 0.5 * f.grid.h();
    Eigen::VectorXd c(n + 1);
    c[0] = 0.0;
    for (int i = 1; i <= n; ++i)
        c[i] = c[i - 1] + half_h * (f.values[i - 1] + f.values[i]);
    return {f.grid, std::move(c)};
}

/// value_i = trapezoid integral of f over [s_i, 1]; the last entry is exactly 0.
inline Field tail_integral(const Field& f)
{
    const int n = f.grid.intervals();
    const double half_h = 0.5 * f.grid.h();
    Eigen::VectorXd t(n + 1);
    t[n] = 0.0;
    for (int i = n - 1; i >= 0; --i)
        t[i] = t[i + 1] + half_h * (f.values[i] + f.values[i + 1]);
    return {f.grid, std::move(t)};
}

/// g(s) = int_s^1 sin( int_0^sigma mu ) dsigma
inline Field tail_sine_integral(const Field& mu)
{
    const Field theta = cumulative(mu);
    return tail_integral(Field{mu.grid, theta.values.array().sin().matrix()});
}

inline double l2_norm(const Field& f)
{
    return std::sqrt(f.grid.weights().dot(f.values.cwiseAbs2()));
}

inline double product_norm(const Field& f, double scalar_part)
{
    return l2_norm(f) + std::abs(scalar_part);
}

inline double product_norm(const ProductVector& v)
{
    return product_norm(v.field, v.scalar);
}

inline ProductVector operator-(const ProductVector& a, const ProductVector& b)
{
    return {Field{a.field.grid, a.field.values - b.field.values}, a.scalar - b.scalar};
}

struct PlanarCurve {
    std::vector<double> x;
    std::vector<double> y;

    double length() const
    {
        double total = 0.0;
        for (std::size_t i = 1; i < x.size(); ++i)
            total += std::hypot(x[i] - x[i - 1], y[i] - y[i - 1]);
        return total;
    }
};

/// Center line of the clamped rod: r(0) = 0, r_s = (cos theta, sin theta).
inline PlanarCurve reconstruct_shape(const Field& mu)
{
    const Field theta = cumulative(mu);
    const Field x = cumulative(Field{mu.grid, theta.values.array().cos().matrix()});
    const Field y = cumulative(Field{mu.grid, theta.values.array().sin().matrix()});
    PlanarCurve curve;
    curve.x.assign(x.values.begin(), x.values.end());
    curve.y.assign(y.values.begin(), y.values.end());
    return curve;
}

} // namespace strutlab
