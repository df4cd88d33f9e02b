#include "oracles.hpp"
#include "rqd/optimizer.hpp"
#include "rqd/driver.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace rqd;

namespace {

ComplexMatrix paper_dense(double phi) {
    ModelParams p;
    p.phi = phi;
    return pauli_to_dense(jordan_wigner(build_aubry_andre(p), 6));
}

Objective wrap(std::function<double(const RealVector&)> f) {
    return [f](std::span<const double> x) {
        return f(Eigen::Map<const RealVector>(x.data(), static_cast<Eigen::Index>(x.size())));
    };
}

ObjectiveContext noisy_context() {
    ModelParams p;
    p.phi = 1.93146731;
    const auto ph = jordan_wigner(build_aubry_andre(p), 6);
    const auto lc = schedule(compile_trotter_step(ph, 0.04, p.phi, {}));
    NoiseParams np;
    np.t1_ms = 25;
    np.t2s_ms = 25;
    ObjectiveContext ctx{run_noisy_circuit(DensityMatrix::basis(6, 0b101010), lc, np),
                         number_conserving_spec(6, 3), np, FidelityMode::InverseCircuitNoisy};
    return ctx;
}

}  // namespace

TEST(NumericGradient, Quadratic) {
    const auto f = wrap([](const RealVector& x) { return x.squaredNorm(); });
    const RealVector g = numeric_gradient(f, RealVector{{1.0, 2.0}}, 1e-5);
    EXPECT_NEAR(g(0), 2.0, 1e-6);
    EXPECT_NEAR(g(1), 4.0, 1e-6);
}

TEST(NumericGradient, ConstantIsZero) {
    const auto f = wrap([](const RealVector&) { return 3.5; });
    EXPECT_EQ(numeric_gradient(f, RealVector::Ones(4), 1e-6).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(numeric_gradient(f, RealVector::Ones(1), 0.0), std::invalid_argument);
}

TEST(NumericGradient, MatchesRichardsonOnRestartObjective) {
    const auto ctx = noisy_context();
    const Objective f = [&](std::span<const double> x) { return restart_objective(ctx, x); };
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RealVector x(38);
    for (auto& v : x) v = u(rng);
    const RealVector g = numeric_gradient(f, x, 1e-6);
    const auto ref_v = oracle::richardson_gradient(
        [&](const std::vector<double>& v) { return f(v); }, std::vector<double>(x.begin(), x.end()), 1e-2);
    const RealVector ref = Eigen::Map<const RealVector>(ref_v.data(), 38);
    EXPECT_LT((g - ref).norm() / ref.norm(), 1e-4);
}

TEST(Minimize, ConvexQuadratic) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    RealVector a(5);
    for (auto& v : a) v = u(rng);
    const auto f = wrap([a](const RealVector& x) { return (x - a).squaredNorm(); });
    const auto r = minimize(f, RealVector::Zero(5));
    EXPECT_LT((r.params - a).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(r.iterations, 30);
    EXPECT_TRUE(r.converged);
}

TEST(Minimize, Rosenbrock) {
    const auto f = wrap([](const RealVector& x) {
        return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2);
    });
    OptimizerSettings s;
    s.max_iterations = 200;
    const auto r = minimize(f, RealVector{{-1.2, 1.0}}, s);
    EXPECT_NEAR(r.params(0), 1.0, 1e-5);
    EXPECT_NEAR(r.params(1), 1.0, 1e-5);
    EXPECT_LE(r.iterations, 200);
}

TEST(Minimize, OracleAnsatzConvergesOnExactStep) {
    const ComplexMatrix h = paper_dense(1.93146731);
    const StateVector psi = herm_expm(h, 0.04) * basis_state(6, 0b101010);
    ObjectiveContext ctx{DensityMatrix::pure(psi), oracle_spec(h, 3), NoiseParams::disabled(),
                         FidelityMode::InverseCircuitNoisy};
    const Objective f = [&](std::span<const double> x) { return restart_objective(ctx, x); };
    const auto r = minimize(f, RealVector::Zero(1));
    EXPECT_LT(r.objective_value, 1e-12);
    EXPECT_LE(r.iterations, 80);
    // objective (1-F)^2 <= 1e-12 bounds the infidelity by 1e-6
    EXPECT_GE(fidelity(ctx, std::span<const double>(r.params.data(), 1)), 1.0 - 1e-6);
}

TEST(Minimize, TraceIsMonotone) {
    const auto ctx = noisy_context();
    const Objective f = [&](std::span<const double> x) { return restart_objective(ctx, x); };
    OptimizerSettings s;
    s.keep_trace = true;
    s.max_iterations = 10;
    const auto r = minimize(f, RealVector::Zero(38), s);
    ASSERT_GE(r.trace.size(), 2u);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        EXPECT_LE(r.trace[i].objective, r.trace[i - 1].objective);
    }
    EXPECT_GE(r.objective_value, 0.0);
    EXPECT_LE(r.objective_value, 1.0);
    EXPECT_GT(r.function_evals, 10 * 76);
    std::ostringstream os;
    write_optimizer_trace_csv(os, 3, r.trace, true);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "restart,iteration,objective,grad_norm");
}

TEST(Minimize, PermutationInvariance) {
    RealVector a{{0.3, -0.7, 1.1, 0.2}};
    RealVector w{{1.0, 3.0, 0.5, 2.0}};
    const std::vector<int> perm{2, 0, 3, 1};
    const auto f = wrap([&](const RealVector& x) {
        return (w.array() * (x - a).array().square()).sum() + std::pow(x(0) * x(1) - a(0) * a(1), 2);
    });
    const auto g = wrap([&](const RealVector& y) {
        RealVector x(4);
        for (int i = 0; i < 4; ++i) x(perm[i]) = y(i);
        return (w.array() * (x - a).array().square()).sum() + std::pow(x(0) * x(1) - a(0) * a(1), 2);
    });
    const RealVector x0{{0.1, 0.2, 0.3, 0.4}};
    RealVector y0(4);
    for (int i = 0; i < 4; ++i) y0(i) = x0(perm[i]);
    const auto rf = minimize(f, x0);
    const auto rg = minimize(g, y0);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(rg.params(i), rf.params(perm[i]), 1e-10);
}

TEST(Fidelity, MaximallyMixedGivesUniformPopulation) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> p(38);
    for (auto& v : p) v = u(rng);
    ObjectiveContext ctx{DensityMatrix::maximally_mixed(6), number_conserving_spec(6, 3),
                         NoiseParams::disabled(), FidelityMode::InverseCircuitNoiseless};
    EXPECT_NEAR(fidelity(ctx, p), 1.0 / 64, 1e-14);
}

TEST(Fidelity, PureOverlapEqualsNoiselessInverse) {
    std::mt19937_64 rng(44);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> p(38);
        for (auto& v : p) v = u(rng);
        ObjectiveContext ctx{DensityMatrix::pure(oracle::random_state(64, rng)), number_conserving_spec(6, 3),
                             NoiseParams::disabled(), FidelityMode::PureOverlap};
        const double a = fidelity(ctx, p);
        ctx.mode = FidelityMode::InverseCircuitNoiseless;
        EXPECT_NEAR(a, fidelity(ctx, p), 1e-10);
    }
}

TEST(Fidelity, NoisyInverseIsBoundedAndBelowNoiseless) {
    auto ctx = noisy_context();
    const std::vector<double> p(38, 0.0);
    const double noisy = fidelity(ctx, p);
    ctx.mode = FidelityMode::InverseCircuitNoiseless;
    const double clean = fidelity(ctx, p);
    EXPECT_GT(noisy, 0.0);
    EXPECT_LT(noisy, clean);
    EXPECT_LE(clean, 1.0 + 1e-9);
}

TEST(Fidelity, ModeNames) {
    for (const auto m : {FidelityMode::InverseCircuitNoisy, FidelityMode::InverseCircuitNoiseless,
                         FidelityMode::PureOverlap}) {
        EXPECT_EQ(fidelity_mode_from_name(fidelity_mode_name(m)), m);
    }
    EXPECT_FALSE(fidelity_mode_from_name("overlap"));
}

TEST(Fidelity, ParameterCountMismatch) {
    const auto ctx = noisy_context();
    const std::vector<double> p(3, 0.0);
    EXPECT_THROW(fidelity(ctx, p), ParameterCountMismatch);
}
