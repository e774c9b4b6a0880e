#include <gtest/gtest.h>

#include <cmath>

#include "savflow/errors.hpp"
#include "savflow/kepler.hpp"
#include "test_support.hpp"

using namespace savflow;

namespace {

const StateVector kW0{0.2, 0.0, 0.0, 0.3};

double kepler_energy(const StateVector& w) {
    return 0.5 * (w[2] * w[2] + w[3] * w[3]) - 1.0 / std::hypot(w[0], w[1]);
}

}  // namespace

TEST(KeplerSystem, SymplecticStructure) {
    const GradientSystem sys = kepler_system();
    EXPECT_EQ(sys.dim, 4u);
    EXPECT_EQ(sys.D_kind, OperatorKind::SkewAdjoint);
    const DenseMatrix d = to_dense(sys.D);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(d(i, j), -d(j, i));
    EXPECT_EQ(d(0, 2), 1.0);
    EXPECT_EQ(d(2, 0), -1.0);
    const DenseMatrix l = to_dense(sys.L);
    EXPECT_EQ(l(0, 0), 0.0);
    EXPECT_EQ(l(1, 1), 0.0);
    EXPECT_EQ(l(2, 2), 1.0);
    EXPECT_EQ(l(3, 3), 1.0);
    EXPECT_EQ(sys.inner_weight, 1.0);
}

TEST(KeplerSystem, VectorFieldAtSamplePoint) {
    const GradientSystem sys = kepler_system();
    const StateVector f = sys.vector_field(kW0);
    EXPECT_NEAR(f[0], 0.0, 1e-15);
    EXPECT_NEAR(f[1], 0.3, 1e-15);
    EXPECT_NEAR(f[2], -25.0, 1e-12);
    EXPECT_NEAR(f[3], 0.0, 1e-15);
    EXPECT_NEAR(original_energy(sys, kW0), -4.955, 1e-13);
}

TEST(KeplerSystem, VectorFieldMatchesLiteralRhs) {
    testkit::Rng rng(1);
    const GradientSystem sys = kepler_system();
    for (int i = 0; i < 20; ++i) {
        StateVector w = testkit::random_vector(rng, 4);
        w[0] += 1.5;
        const StateVector a = sys.vector_field(w), b = kepler_rhs(w);
        for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a[k], b[k], 1e-13);
        EXPECT_NEAR(original_energy(sys, w), kepler_energy(w), 1e-14);
    }
}

TEST(KeplerSystem, InvalidShiftsRejected) {
    try {
        (void)kepler_system(0.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DomainError);
    }
    EXPECT_THROW((void)kepler_system(1.0, -1.0), Error);
}

TEST(KeplerSystem, DissipativeVariant) {
    const GradientSystem sys = kepler_dissipative_system();
    EXPECT_EQ(sys.D_kind, OperatorKind::NegativeSemidefinite);
    const StateVector g = sys.grad_energy(kW0);
    const StateVector f = sys.vector_field(kW0);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(f[k], -g[k], 1e-15);
}

TEST(KeplerState, PackUnpack) {
    const KeplerState s{1.0, 2.0, 3.0, 4.0};
    const KeplerState t = KeplerState::unpack(s.pack());
    EXPECT_EQ(t.x, 1.0);
    EXPECT_EQ(t.v, 4.0);
    EXPECT_THROW((void)KeplerState::unpack(StateVector{1.0}), Error);
}

TEST(KeplerInitial, EllipseWithPeriodTwoPi) {
    const StateVector w = kepler_initial_state().pack();
    EXPECT_EQ(w, (StateVector{0.2, 0.0, 0.0, 3.0}));
    const double e = kepler_energy(w);
    EXPECT_NEAR(e, -0.5, 1e-15);
    // Semi-major axis a = -1/(2E) = 1, so T = 2π a^{3/2} = 2π.
    EXPECT_NEAR(2.0 * std::numbers::pi * std::pow(-1.0 / (2.0 * e), 1.5), kKeplerPeriod, 1e-14);
}

TEST(KeplerReference, StartAndPeriodicity) {
    const KeplerState s0 = kepler_reference(0.0);
    EXPECT_EQ(s0.pack(), kepler_initial_state().pack());
    const StateVector w1 = kepler_reference(kKeplerPeriod).pack();
    EXPECT_LE(max_abs(subtract(w1, kepler_initial_state().pack())), 1e-9);
}

TEST(KeplerReference, EnergyConstant) {
    const double e0 = kepler_energy(kepler_initial_state().pack());
    for (double t : {0.5, 1.7, 3.1, 5.0}) EXPECT_NEAR(kepler_energy(kepler_reference(t).pack()), e0, 1e-10);
}

TEST(KeplerReference, AgreesWithIndependentIntegration) {
    const double t = 1.3;
    const StateVector ref = testkit::rk4_reference(kepler_rhs, kepler_initial_state().pack(), t, 200000);
    EXPECT_LE(max_abs(subtract(kepler_reference(t).pack(), ref)), 1e-9);
    EXPECT_THROW((void)kepler_reference(std::nan("")), Error);
}
