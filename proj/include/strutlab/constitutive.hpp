#pragma once

// Constitutive scalar functions of the strut model:
//   kappa  - stored energy of the natural curvature (even, C2, coercive)
//   f      - slip rate law, zero on x <= 0
//   Theta  - activation threshold, even and bounded below by a positive constant
//
// All specs are immutable after construction; invalid parameters are
// rejected by the named constructors, never at evaluation time.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace strutlab {

enum class KappaFamily { quadratic, triple_well };

inline const char* to_string(KappaFamily family)
{
    return family == KappaFamily::quadratic ? "quadratic" : "triple_well";
}

class KappaSpec {
public:
    /// kappa(x) = (k/2) x^2
    static KappaSpec quadratic(double k)
    {
        if (!(k > 0.0) || !std::isfinite(k))
            throw std::invalid_argument("kappa: stiffness k must be > 0");
        return KappaSpec(KappaFamily::quadratic, k, 0.0);
    }

    /// kappa(x) = k x^2 (x^2 - mu1^2)^2 / mu1^4, with wells at 0 and +-mu1.
    static KappaSpec triple_well(double k, double mu1)
    {
        if (!(k > 0.0) || !std::isfinite(k))
            throw std::invalid_argument("kappa: stiffness k must be > 0");
        if (!(mu1 > 0.0) || !std::isfinite(mu1))
            throw std::invalid_argument("kappa: well location mu1 must be > 0");
        return KappaSpec(KappaFamily::triple_well, k, mu1);
    }

    KappaFamily family() const { return family_; }
    double k() const { return k_; }
    double mu1() const { return mu1_; }

    double eval(double x) const
    {
        if (family_ == KappaFamily::quadratic)
            return 0.5 * k_ * x * x;
        const double u = x * x;
        const double m2 = mu1_ * mu1_;
        const double d = u - m2;
        return k_ * u * d * d / (m2 * m2);
    }

    double prime(double x) const
    {
        if (family_ == KappaFamily::quadratic)
            return k_ * x;
        const double u = x * x;
        const double m2 = mu1_ * mu1_;
        return 2.0 * k_ * x * (u - m2) * (3.0 * u - m2) / (m2 * m2);
    }

    double second(double x) const
    {
        if (family_ == KappaFamily::quadratic)
            return k_;
        const double u = x * x;
        const double m2 = mu1_ * mu1_;
        return 2.0 * k_ * (15.0 * u * u - 12.0 * m2 * u + m2 * m2) / (m2 * m2);
    }

private:
    KappaSpec(KappaFamily family, double k, double mu1) : family_(family), k_(k), mu1_(mu1) {}

    KappaFamily family_;
    double k_;
    double mu1_;
};

/// f(x) = c * max(x, 0)^p with p >= 2, so f is C1 with f'(0) = 0.
class RateSpec {
public:
    RateSpec(double c, double p) : c_(c), p_(p)
    {
        if (!(c > 0.0) || !std::isfinite(c))
            throw std::invalid_argument("rate: coefficient c must be > 0");
        if (!(p >= 2.0) || !std::isfinite(p))
            throw std::invalid_argument("rate: exponent p must be >= 2");
    }

    double c() const { return c_; }
    double p() const { return p_; }

    double eval(double x) const { return x > 0.0 ? c_ * std::pow(x, p_) : 0.0; }
    double prime(double x) const { return x > 0.0 ? c_ * p_ * std::pow(x, p_ - 1.0) : 0.0; }

private:
    double c_;
    double p_;
};

/// Theta(x) = theta_a + theta_b x^2; inf Theta = theta_a > 0.
class ThresholdSpec {
public:
    ThresholdSpec(double theta_a, double theta_b) : a_(theta_a), b_(theta_b)
    {
        if (!(theta_a > 0.0) || !std::isfinite(theta_a))
            throw std::invalid_argument("threshold: inf theta > 0 violated (theta_a must be > 0)");
        if (!(theta_b >= 0.0) || !std::isfinite(theta_b))
            throw std::invalid_argument("threshold: theta_b must be >= 0");
    }

    double theta_a() const { return a_; }
    double theta_b() const { return b_; }
    double infimum() const { return a_; }

    double eval(double x) const { return a_ + b_ * x * x; }
    double prime(double x) const { return 2.0 * b_ * x; }

private:
    double a_;
    double b_;
};

struct ConstitutiveSet {
    KappaSpec kappa;
    RateSpec rate;
    ThresholdSpec threshold;
};

inline ConstitutiveSet default_constitutive()
{
    return {KappaSpec::quadratic(1.0), RateSpec(1.0, 2.0), ThresholdSpec(2.5, 0.0)};
}

struct HypothesisViolation {
    std::string hypothesis;
    double witness;
    std::string detail;
};

struct ConstitutiveReport {
    std::vector<HypothesisViolation> violations;
    bool well_conditions_checked = false;

    bool ok() const { return violations.empty(); }
};

/// Samples the hypotheses on kappa, f and Theta over [lo, hi].
inline ConstitutiveReport validate(const ConstitutiveSet& set, double lo, double hi, int n_samples)
{
    if (n_samples < 2)
        throw std::invalid_argument("validate: n_samples must be >= 2");
    if (!(lo < hi))
        throw std::invalid_argument("validate: empty sample range");

    ConstitutiveReport report;
    auto flag = [&](const char* what, double x, double value) {
        std::ostringstream os;
        os.precision(17);
        os << "value " << value;
        report.violations.push_back({what, x, os.str()});
    };

    const double tiny = 1e-12;
    for (int i = 0; i < n_samples; ++i) {
        const double x = lo + (hi - lo) * i / (n_samples - 1);
        const double kx = set.kappa.eval(x);
        if (kx < 0.0)
            flag("kappa >= 0", x, kx);
        if (std::abs(kx - set.kappa.eval(-x)) > tiny * (1.0 + std::abs(kx)))
            flag("kappa even", x, kx - set.kappa.eval(-x));
        const double tx = set.threshold.eval(x);
        if (std::abs(tx - set.threshold.eval(-x)) > tiny * (1.0 + std::abs(tx)))
            flag("theta even", x, tx - set.threshold.eval(-x));
        if (tx < set.threshold.theta_a() || !(set.threshold.theta_a() > 0.0))
            flag("inf theta > 0", x, tx);
        const double fx = set.rate.eval(x);
        if (fx < 0.0)
            flag("f >= 0", x, fx);
        if (x <= 0.0 && fx != 0.0)
            flag("f = 0 on x <= 0", x, fx);
    }

    const double mid = 0.5 * (lo + hi);
    const double k_mid = set.kappa.eval(mid);
    if (!(set.kappa.eval(lo) > k_mid) && !(set.kappa.eval(hi) > k_mid))
        flag("kappa grows at infinity", hi, set.kappa.eval(hi));

    if (set.kappa.family() == KappaFamily::triple_well) {
        const double m = set.kappa.mu1();
        for (double x : {m, -m}) {
            if (std::abs(set.kappa.eval(x)) > tiny)
                flag("kappa(+-mu1) = 0", x, set.kappa.eval(x));
            if (std::abs(set.kappa.prime(x)) > tiny)
                flag("kappa'(+-mu1) = 0", x, set.kappa.prime(x));
        }
        report.well_conditions_checked = true;
    }
    return report;
}

} // namespace strutlab
