#include <gtest/gtest.h>

#include <cmath>

#include "savflow/errors.hpp"
#include "savflow/exponential.hpp"
#include "savflow/kdv.hpp"
#include "savflow/kepler.hpp"
#include "savflow/scheme_cn.hpp"
#include "test_support.hpp"

using namespace savflow;
using savflow::testkit::Rng;
using savflow::testkit::random_vector;

namespace {

const StateVector kW0{0.2, 0.0, 0.0, 0.3};

double rel_max_diff(const AugmentedState& a, const AugmentedState& b) {
    return max_abs(a - b) / std::max(1.0, max_abs(b));
}

// Scalar system u' = -(dE/du) with L = 0, E_L = 0 and E_U = 2u. At u = 0 with
// a_U = 1 and dt = 1 the auxiliary 2x2 system is exactly singular.
GradientSystem singular_scalar_system() {
    GradientSystem sys;
    sys.name = "scalar";
    sys.dim = 1;
    DenseMatrix d(1, 1, -1.0);
    sys.D = DenseOperator(d);
    sys.D_kind = OperatorKind::NegativeSemidefinite;
    sys.L = DenseOperator(DenseMatrix(1, 1, 0.0));
    sys.energy_L = [](const StateVector&) { return 0.0; };
    sys.energy_U = [](const StateVector& u) { return 2.0 * u[0]; };
    sys.grad_energy_L = [](const StateVector&) { return StateVector{0.0}; };
    sys.grad_energy_U = [](const StateVector&) { return StateVector{2.0}; };
    return sys;
}

}  // namespace

TEST(Predictor, ExtrapolationFirstStepIsCurrentState) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    EXPECT_EQ(predict_half(Predictor{PredictorKind::Extrapolation, std::nullopt}, sys, z, 0.1, 0), kW0);
}

TEST(Predictor, ExtrapolationFixedPoint) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    const StateVector out = predict_half(Predictor{PredictorKind::Extrapolation, kW0}, sys, z, 0.1, 5);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(out[i], kW0[i], 1e-16);
    const StateVector prev{0.0, 0.0, 0.0, 0.1};
    const StateVector lin = predict_half(Predictor{PredictorKind::Extrapolation, prev}, sys, z, 0.1, 1);
    EXPECT_NEAR(lin[0], 0.3, 1e-15);
    EXPECT_NEAR(lin[3], 0.4, 1e-15);
}

TEST(Predictor, ExtrapolationWithoutHistoryThrows) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    try {
        (void)predict_half(Predictor{PredictorKind::Extrapolation, std::nullopt}, sys, z, 0.1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MissingHistory);
    }
}

TEST(Predictor, HalfStepExplicitEulerKepler) {
    // w0 + 0.05 * (0, 0.3, -25, 0)
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    const StateVector out = predict_half(Predictor{PredictorKind::HalfStepExplicitEuler, std::nullopt}, sys, z, 0.1, 3);
    EXPECT_NEAR(out[0], 0.2, 1e-15);
    EXPECT_NEAR(out[1], 0.015, 1e-15);
    EXPECT_NEAR(out[2], -1.25, 1e-13);
    EXPECT_NEAR(out[3], 0.3, 1e-15);
}

TEST(Predictor, ExponentialEulerNeedsSplitting) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    try {
        (void)predict_half(Predictor{PredictorKind::HalfStepExponentialEuler, std::nullopt}, sys, z, 0.1, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SplittingUnavailable);
    }
    EXPECT_THROW((void)cn_run(sys, z, 0.1, 2, PredictorKind::HalfStepExponentialEuler), Error);
}

TEST(Predictor, ExponentialEulerHalfStepIsFirstOrderAccurate) {
    const CnoidalParams params;
    const KdvGrid grid = cnoidal_grid(params);
    const GradientSystem sys = kdv_system(grid);
    const AugmentedState z = init_augmented(sys, cnoidal(params, grid, 0.0));
    std::vector<double> dts, errs;
    for (int i = 4; i <= 8; ++i) {
        const double dt = 0.25 / std::pow(2.0, i);
        const StateVector out = predict_half(Predictor{PredictorKind::HalfStepExponentialEuler, std::nullopt}, sys, z, dt, 0);
        const StateVector ref = testkit::rk4_reference([&](const StateVector& u) { return kdv_rhs(grid, u); }, z.u,
                                                       0.5 * dt, 200);
        dts.push_back(dt);
        errs.push_back(max_abs(subtract(out, ref)));
    }
    EXPECT_GE(testkit::loglog_slope(dts, errs), 1.8);
}

TEST(CnStep, VanishingGradientsGivePureCrankNicolson) {
    Rng rng(4);
    GradientSystem sys = testkit::random_small_system(rng, 5);
    sys.energy_L = [](const StateVector&) { return 1.0; };
    sys.energy_U = [](const StateVector&) { return 0.0; };
    sys.grad_energy_L = [](const StateVector& u) { return StateVector(u.size(), 0.0); };
    sys.grad_energy_U = [](const StateVector& u) { return StateVector(u.size(), 0.0); };
    const AugmentedState z{random_vector(rng, 5), 1.3, 0.4};
    const double dt = 0.2;
    CnWorkspace ws(sys, dt);
    const AugmentedState next = cn_step(sys, z, random_vector(rng, 5), dt, ws);
    EXPECT_DOUBLE_EQ(next.r_L, 1.3);
    EXPECT_DOUBLE_EQ(next.r_U, 0.4);
    // (I - dt/2 DL) u⁺ = (I + dt/2 DL) u
    const StateVector lhs = apply_J(sys.D, sys.L, 0.5 * dt, next.u);
    const StateVector rhs = apply_J(sys.D, sys.L, -0.5 * dt, z.u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-13);
}

TEST(CnStep, KeplerSingleStepConservesModifiedEnergy) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z0 = init_augmented(sys, kepler_initial_state().pack());
    const double dt = kKeplerPeriod / 1024.0;
    CnWorkspace ws(sys, dt);
    const StateVector ubar = predict_half(Predictor{PredictorKind::HalfStepExplicitEuler, std::nullopt}, sys, z0, dt, 0);
    const AugmentedState z1 = cn_step(sys, z0, ubar, dt, ws);
    EXPECT_LE(relative_difference(modified_energy(sys, z1), modified_energy(sys, z0)), 1e-12);
}

TEST(CnStep, MatchesMonolithicSolveOnRandomSystems) {
    Rng rng(2718);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        const OperatorKind kind = trial % 5 == 4 ? OperatorKind::NegativeSemidefinite : OperatorKind::SkewAdjoint;
        const GradientSystem sys = testkit::random_small_system(rng, n, kind);
        const AugmentedState z = init_augmented(sys, random_vector(rng, n));
        const StateVector ubar = random_vector(rng, n);
        const double dt = testkit::random_scalar(rng, 0.01, 0.3);
        CnWorkspace ws(sys, dt);
        const AugmentedState got = cn_step(sys, z, ubar, dt, ws);
        const AugmentedState ref = testkit::monolithic_cn_step(sys, z, ubar, dt);
        EXPECT_LE(rel_max_diff(got, ref), 1e-11) << "trial " << trial;
    }
}

TEST(CnStep, MatchesMonolithicSolveOnKdv) {
    const CnoidalParams params;
    const KdvGrid grid = cnoidal_grid(params);
    const GradientSystem sys = kdv_system(grid);
    const AugmentedState z = init_augmented(sys, cnoidal(params, grid, 0.0));
    const double dt = params.temporal_period() / 1024.0;
    const StateVector ubar = predict_half(Predictor{PredictorKind::HalfStepExponentialEuler, std::nullopt}, sys, z, dt, 0);
    CnWorkspace ws(sys, dt);
    EXPECT_LE(rel_max_diff(cn_step(sys, z, ubar, dt, ws), testkit::monolithic_cn_step(sys, z, ubar, dt)), 1e-11);
}

TEST(CnStep, WorkspaceReplansOnNewStepSize) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    CnWorkspace ws(sys, 0.1);
    EXPECT_DOUBLE_EQ(ws.plan().alpha(), 0.05);
    const AugmentedState a = cn_step(sys, z, kW0, 0.02, ws);
    EXPECT_DOUBLE_EQ(ws.dt(), 0.02);
    EXPECT_DOUBLE_EQ(ws.plan().alpha(), 0.01);
    CnWorkspace fresh(sys, 0.02);
    const AugmentedState b = cn_step(sys, z, kW0, 0.02, fresh);
    EXPECT_LE(max_abs(a - b), 0.0);
}

TEST(CnStep, SingularAuxiliarySystemThrows) {
    GradientSystem sys = singular_scalar_system();
    const AugmentedState z = init_augmented(sys, StateVector{0.0});
    CnWorkspace ws(sys, 1.0);
    try {
        (void)cn_step(sys, z, StateVector{0.0}, 1.0, ws);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
        EXPECT_NE(std::string(e.what()).find("det="), std::string::npos);
    }
    try {
        (void)cn_run(sys, z, 1.0, 3, PredictorKind::Extrapolation);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
        EXPECT_EQ(e.step(), 0);
    }
}

TEST(CnStep, WrongDimensionsThrow) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    CnWorkspace ws(sys, 0.1);
    EXPECT_THROW((void)cn_step(sys, z, StateVector{1.0, 2.0}, 0.1, ws), Error);
}

TEST(CnRun, StepCountValidation) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z = init_augmented(sys, kW0);
    try {
        (void)cn_run(sys, z, 0.1, 0, PredictorKind::Extrapolation);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
    const RunRecord rec = cn_run(sys, z, 0.01, 1, PredictorKind::Extrapolation);
    EXPECT_EQ(rec.rows.size(), 2u);
    EXPECT_EQ(rec.steps, 1);
}

TEST(CnRun, KeplerTenPeriodsConservation) {
    const GradientSystem sys = kepler_system();
    const AugmentedState z0 = init_augmented(sys, kepler_initial_state().pack());
    const double dt = kKeplerPeriod / 1024.0;
    for (PredictorKind kind : {PredictorKind::Extrapolation, PredictorKind::HalfStepExplicitEuler}) {
        const RunRecord rec = cn_run(sys, z0, dt, 10 * 1024, kind, RunOptions{1024, false});
        EXPECT_LE(rec.max_rel_modified_error, 1e-10) << to_string(kind);
        EXPECT_EQ(rec.rows.size(), 11u);
    }
}

TEST(CnRun, KdvOnePeriodConservation) {
    const CnoidalParams params;
    const KdvGrid grid = cnoidal_grid(params);
    const GradientSystem sys = kdv_system(grid);
    const AugmentedState z0 = init_augmented(sys, cnoidal(params, grid, 0.0));
    const double dt = params.temporal_period() / 1024.0;
    for (PredictorKind kind : {PredictorKind::Extrapolation, PredictorKind::HalfStepExponentialEuler}) {
        const RunRecord rec = cn_run(sys, z0, dt, 1024, kind, RunOptions{64, false});
        EXPECT_LE(rec.max_rel_modified_error, 1e-10) << to_string(kind);
    }
}

TEST(CnRun, RandomPredictorStillConserves) {
    // The invariance holds for any frozen state, including an O(1) wrong one.
    Rng rng(55);
    const GradientSystem sys = kepler_system();
    AugmentedState z = init_augmented(sys, kepler_initial_state().pack());
    const double e0 = modified_energy(sys, z);
    CnWorkspace ws(sys, 0.01);
    for (int i = 0; i < 200; ++i) {
        StateVector ubar = random_vector(rng, 4, -2.0, 2.0);
        ubar[0] += 3.0;
        z = cn_step(sys, z, ubar, 0.01, ws);
    }
    EXPECT_LE(relative_difference(modified_energy(sys, z), e0), 1e-10);
}

TEST(CnRun, DissipativeVariantDecreasesModifiedEnergy) {
    const GradientSystem sys = kepler_dissipative_system();
    const AugmentedState z0 = init_augmented(sys, StateVector{1.0, 0.5, 0.2, -0.3});
    const RunRecord rec = cn_run(sys, z0, 0.05, 100, PredictorKind::HalfStepExplicitEuler);
    for (std::size_t i = 1; i < rec.rows.size(); ++i)
        EXPECT_LE(rec.rows[i].modified_energy, rec.rows[i - 1].modified_energy + 1e-13);
}

TEST(PredictorNames, ToString) {
    EXPECT_EQ(to_string(PredictorKind::Extrapolation), "extrapolation");
    EXPECT_EQ(to_string(PredictorKind::HalfStepExplicitEuler), "explicit-euler");
}
