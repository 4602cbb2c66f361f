// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "strutlab/validation.hpp"

#include <chrono>
#include <cstdarg>
#include <deque>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace strutlab;

namespace {

// Pinned tolerances.
constexpr double kTrivialEigTol = 1e-4;
constexpr double kTrivialRuntimeLimit = 2.0;
constexpr double kBucklingTol = 1e-3;
constexpr double kKernelShrink = 3.5;
constexpr double kDescentSlack = 1e-9;
constexpr double kIdentityRel = 1e-3;
constexpr double kIdentityRelFloor = 1e-6;
constexpr double kLinearFactor = 10.0;
constexpr double kEqTol = 1e-10;
constexpr double kLimitTol = 1e-5;
constexpr double kStickTol = 1e-12;
constexpr double kFrechetRel = 1e-5;
constexpr double kTangentTrivialTol = 1e-5;
constexpr double kTangentBuckledTol = 1e-4;

int failures = 0;

void report(int id, bool pass, const std::string& what, const char* fmt, ...)
{
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    std::printf("%s [C%d] %s: %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), buf);
    std::fflush(stdout);
    failures += !pass;
}

ModelParams params(double gamma, double theta_a = 2.5)
{
    return ModelParams(gamma, {KappaSpec::quadratic(1.0), RateSpec(1.0, 2.0), ThresholdSpec(theta_a, 0.0)});
}

RodState cosine_start(const Grid& g, double a)
{
    return {Field::sample(g, [a](double s) { return a * std::cos(0.5 * M_PI * s); }), 0.0};
}

struct Run {
    std::string name;
    TrajectoryRecord rec;
    ModelParams params;
};

std::deque<Run> runs;  // every simulation here is a validation run for C7 and C10

const Run& keep(std::string name, TrajectoryRecord rec, const ModelParams& p)
{
    runs.push_back({std::move(name), std::move(rec), p});
    return runs.back();
}

void c1_trivial_spectrum()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ModelParams p = params(1.0);
    const SpectrumReport rep = spectrum(equilibrium_from_alpha(0.0, p, Grid(400)), p);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double exact = 4.0 / ((2 * k + 1) * (2 * k + 1) * M_PI * M_PI) - 1.0;
        worst = std::max(worst, std::abs(rep.nystrom_eigenvalues[k] - exact));
    }
    report(1, worst <= kTrivialEigTol && seconds < kTrivialRuntimeLimit, "trivial-branch spectrum (gamma=1, n=400)",
           "max |lambda_k - closed form| over k=0..4 = %.3e (tol %.0e); runtime %.3f s (limit %.0f s)", worst,
           kTrivialEigTol, seconds, kTrivialRuntimeLimit);
}

void c2_buckling()
{
    const double g = buckling_threshold(default_constitutive(), Grid(400), 2.0, 3.0);
    const double err = std::abs(g - M_PI * M_PI / 4);
    report(2, err <= kBucklingTol, "buckling threshold", "gamma* = %.7f, |gamma* - pi^2/4| = %.3e (tol %.0e)", g, err,
           kBucklingTol);
}

void c3_zero_eigenvalue()
{
    bool pass = true;
    int tested = 0;
    double worst_ratio = INFINITY, worst_c = 0.0;
    for (double gamma : {0.0, 1.0, 4.0})
        for (double alpha : {0.0, 0.1, 0.3}) {
            const ModelParams p = params(gamma);
            const Grid coarse(200), fine(400);
            const EquilibriumPoint e1 = equilibrium_from_alpha(alpha, p, coarse);
            if (!e1.strict)
                continue;
            const EquilibriumPoint e2 = equilibrium_from_alpha(alpha, p, fine);
            const double r1 = product_norm(apply_L(e1, p, theta0_solve(e1, p)));
            const double r2 = product_norm(apply_L(e2, p, theta0_solve(e2, p)));
            ++tested;
            worst_c = std::max(worst_c, r2 / (fine.h() * fine.h()));
            if (r1 <= 1e-12)
                continue; // exact to roundoff (gamma = 0)
            worst_ratio = std::min(worst_ratio, r1 / r2);
            pass = pass && r1 / r2 >= kKernelShrink;
        }
    report(3, pass && tested == 9, "zero eigenvalue residual",
           "%d strictly admissible equilibria; min shrink under halving %.3f (need >= %.1f); max C = res/h^2 = %.3e",
           tested, worst_ratio, kKernelShrink, worst_c);
}

void c4_liapunov(const Run& run)
{
    const InvariantResult descent = check_liapunov_descent(run.rec, kDescentSlack);
    double worst_mixed = 0.0, worst_rel = 0.0;
    for (std::size_t k = 1; k + 1 < run.rec.size(); ++k) {
        const double fd = liapunov_rate_fd(run.rec.snapshots[k], run.params);
        const double diss = dissipation_rate(run.rec.snapshots[k], run.params);
        worst_mixed = std::max(worst_mixed, std::abs(fd - diss) / (kIdentityRel * (1.0 + std::abs(diss))));
        if (std::abs(diss) >= kIdentityRelFloor)
            worst_rel = std::max(worst_rel, std::abs(fd - diss) / std::abs(diss));
    }
    const bool pass = descent.passed && worst_mixed <= 1.0 && worst_rel <= kIdentityRel;
    report(4, pass, "Liapunov descent and identity (gamma=4 buckling run)",
           "max V increase %.3e (slack %.0e); identity max rel err %.3e where |dV/dt| >= %.0e, "
           "max |fd - diss| / (1 + |diss|) = %.3e (tol %.0e)",
           descent.measured, kDescentSlack, worst_rel, kIdentityRelFloor, worst_mixed * kIdentityRel, kIdentityRel);
}

void c5_linear_regime()
{
    const Grid g(100);
    const ModelParams p = params(0.0);
    const Field mu0 = Field::sample(g, [](double s) { return 0.5 * std::cos(2.0 * s) - 0.2 * s; });
    const double mu_nat = 0.1;
    SimulationOptions opt;
    opt.t_end = 10.0;
    opt.eq_tol = 0.0; // run the full interval
    const Run& run = keep("linear", simulate({mu0, mu_nat}, p, opt), p);
    double worst = 0.0;
    bool stick = true;
    for (std::size_t k = 0; k < run.rec.size(); ++k) {
        stick = stick && run.rec.regimes[k] == Regime::stick;
        const double decay = std::exp(-run.rec.times[k]);
        for (int i = 0; i < g.size(); ++i)
            worst = std::max(worst, std::abs(run.rec.snapshots[k].mu[i] - (mu_nat + (mu0[i] - mu_nat) * decay)));
    }
    const double limit = kLinearFactor * std::max(opt.tol.abs, opt.tol.rel);
    report(5, stick && worst <= limit && run.rec.times.back() == 10.0, "exact linear regime (gamma=0, stick)",
           "max |mu - exact| on [0, 10] = %.3e (limit %.0e = 10 x tol), %zu steps, stick throughout: %s", worst, limit,
           run.rec.size() - 1, stick ? "yes" : "no");
}

void c6_convergence(const Run& run)
{
    const RodState& last = run.rec.final_state();
    const EquilibriumPoint eq = equilibrium_from_alpha(last.mu[0], run.params, last.mu.grid);
    const double dist = product_norm(ProductVector{last.mu, last.mu_nat} - eq.as_vector());
    const bool pass = run.rec.converged && run.rec.norm_F.back() < kEqTol && run.rec.times.back() < 200.0 &&
                      dist < kLimitTol;
    report(6, pass, "convergence to an equilibrium (gamma=4, a=0.01, n=800)",
           "converged %s at t = %.3f, ||F|| = %.3e (tol %.0e); distance to shot equilibrium at alpha = %.6f: %.3e "
           "(tol %.0e)",
           run.rec.converged ? "yes" : "no", run.rec.times.back(), run.rec.norm_F.back(), kEqTol, last.mu[0], dist,
           kLimitTol);
}

void c7_stick_and_sign()
{
    const Grid g(400);
    const ModelParams p = params(4.0, 10.0);
    RodState start{Field::sample(g, [](double s) { return 0.9 * std::cos(0.5 * M_PI * s) + 0.3 * s; }), 0.2};
    const double norm0 = product_norm(start.mu, start.mu_nat);
    const Run& run = keep("stick", simulate(start, p, SimulationOptions{}), p);
    double drift = 0.0;
    for (const RodState& s : run.rec.snapshots)
        drift = std::max(drift, std::abs(s.mu_nat - start.mu_nat));

    bool sign_ok = true;
    double worst = 0.0;
    for (const Run& r : runs) {
        const InvariantResult s = check_sign_property(r.rec, r.params);
        sign_ok = sign_ok && s.passed;
        worst = std::max(worst, s.measured);
    }
    report(7, drift <= kStickTol && norm0 <= 1.0 && sign_ok, "stick conservation and sign property",
           "theta_a=10 run (|initial| = %.3f): max |mu_nat(t) - mu_nat(0)| = %.3e (tol %.0e); "
           "sign(D) F2 >= 0 on %zu runs, worst violation %.3e",
           norm0, drift, kStickTol, runs.size(), worst);
}

void c8_frechet()
{
    std::mt19937 rng(2024);
    std::normal_distribution<double> n(0.0, 1.0);
    const Grid g(100);
    const ModelParams quadratic(4.0, {KappaSpec::quadratic(1.3), RateSpec(1.0, 2.0), ThresholdSpec(0.4, 0.5)});
    const ModelParams triple(2.0, {KappaSpec::triple_well(0.7, 0.8), RateSpec(2.0, 3.0), ThresholdSpec(0.2, 1.0)});
    double worst = 0.0;
    int slipping = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams& p = trial % 2 ? triple : quadratic;
        const double a = 1.5 * n(rng), b = n(rng), c = n(rng), freq = 1.0 + 4.0 * std::abs(n(rng));
        const RodState st{Field::sample(g, [&](double s) { return a + b * std::cos(freq * s) + c * s * s; }), n(rng)};
        slipping += regime(st, p) != Regime::stick;
        const InvariantResult r = check_frechet({st}, p, static_cast<std::uint32_t>(trial + 1), 1e-6, kFrechetRel);
        worst = std::max(worst, r.measured);
    }
    report(8, worst <= kFrechetRel, "Frechet derivative",
           "20 random states/directions (%d slipping): max relative error %.3e (tol %.0e)", slipping, worst,
           kFrechetRel);
}

void c9_tangent()
{
    const Grid g(400);
    const ModelParams p = params(1.0);
    const TangentCheck t0 = tangent_check(0.0, p, g);
    Eigen::VectorXd exact(g.size());
    for (int i = 0; i < g.size(); ++i)
        exact[i] = std::cos(g.node(i));
    const double closed = product_norm(Field{g, t0.fd_tangent.field.values - exact},
                                       t0.fd_tangent.scalar - std::cos(1.0));
    const TangentCheck t2 = tangent_check(0.2, p, g);
    report(9, closed <= kTangentTrivialTol && t2.discrepancy <= kTangentBuckledTol, "equilibrium-curve tangent (gamma=1)",
           "alpha=0: |fd - (cos s, cos 1)| = %.3e (tol %.0e); alpha=0.2: |fd - theta0| = %.3e (tol %.0e)", closed,
           kTangentTrivialTol, t2.discrepancy, kTangentBuckledTol);
}

void c10_global_bound()
{
    const Grid g(200);
    const ModelParams p = params(4.0);
    SimulationOptions opt;
    opt.t_end = 50.0;
    keep("adversarial", simulate({Field::constant(g, 50.0), -5.0}, p, opt), p);
    bool all = true;
    double margin = INFINITY, loaded_margin = INFINITY;
    std::string tightest;
    for (const Run& r : runs) {
        const BoundCheck b = global_bound_check(r.rec, r.params);
        all = all && b.holds;
        if (b.min_margin < margin) {
            margin = b.min_margin;
            tightest = r.name;
        }
        if (r.params.gamma > 0.0)
            loaded_margin = std::min(loaded_margin, b.min_margin);
    }
    report(10, all, "global bound on every validation run",
           "%zu runs incl. |mu0| = 50; smallest margin V0 + gamma - elastic energy = %.6e (%s run), "
           "smallest with gamma > 0 = %.6e",
           runs.size(), margin, tightest.c_str(), loaded_margin);
}

} // namespace

int main()
{
    c1_trivial_spectrum();
    c2_buckling();
    c3_zero_eigenvalue();

    SimulationOptions opt; // rel = abs = 1e-8, eq_tol = 1e-10, t_end = 200
    const ModelParams p4 = params(4.0);
    const Run& buckling = keep("buckling", simulate(cosine_start(Grid(400), 0.01), p4, opt), p4);
    c4_liapunov(buckling);
    c5_linear_regime();
    const Run& fine = keep("buckling_n800", simulate(cosine_start(Grid(800), 0.01), p4, opt), p4);
    c6_convergence(fine);

    const ModelParams slip = params(4.0, 0.5);
    keep("slip", simulate({Field::constant(Grid(200), 4.0), 0.0}, slip, opt), slip);
    c7_stick_and_sign();
    c8_frechet();
    c9_tangent();
    c10_global_bound();

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
