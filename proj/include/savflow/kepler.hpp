#pragma once

#include <numbers>

#include "savflow/gradient_system.hpp"

namespace savflow {

/// Position (x, y) and velocity (u, v), packed as w = (x, y, u, v).
struct KeplerState {
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
    double v = 0.0;

    [[nodiscard]] StateVector pack() const { return {x, y, u, v}; }
    static KeplerState unpack(const StateVector& w);
};

inline constexpr double kKeplerPeriod = 2.0 * std::numbers::pi;

/// (0.2, 0, 0, 3): eccentricity 0.8, energy -1/2, period 2π.
KeplerState kepler_initial_state();

/// Kepler problem as a gradient system with D = [[0, I], [-I, 0]],
/// L = diag(0, 0, 1, 1), E_L = 0 and E_U = 1/r, so that
/// E = ½<w, L w> + E_L - E_U = (u² + v²)/2 - 1/r.
GradientSystem kepler_system(double a_L = 1.0, double a_U = 1.0);

/// Same energies with D = -I; a dissipative test problem.
GradientSystem kepler_dissipative_system(double a_L = 1.0, double a_U = 1.0);

/// Literal right-hand side (u, v, -x/r³, -y/r³).
StateVector kepler_rhs(const StateVector& w);

/// High-accuracy reference solution from kepler_initial_state() at time t,
/// integrated with classical RK4 at a step no larger than 1e-6·T. Results are
/// cached per t.
KeplerState kepler_reference(double t);

}  // namespace savflow
