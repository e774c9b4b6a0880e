#pragma once

#include "savflow/gradient_system.hpp"

namespace savflow {

/// Below this modulus φ-functions are evaluated by their Taylor series.
inline constexpr double kPhiSeriesThreshold = 1e-2;

/// φ₁(z) = (e^z - 1) / z
Complex phi1(Complex z);
/// φ₂(z) = (e^z - 1 - z) / z²
Complex phi2(Complex z);

/// One exponential Euler step of size h for u' = A u + g(u):
///   u + h φ₁(hA) (A u + g(u)) = e^{hA} u + h φ₁(hA) g(u).
StateVector exponential_euler(const Splitting& split, const StateVector& u, double h);

/// One step of size h of the explicit three-stage exponential Runge–Kutta
/// method with nodes (0, 1/3, 2/3).
StateVector exponential_rk3(const Splitting& split, const StateVector& u, double h);

/// Returns the system's splitting or throws SplittingUnavailable.
const Splitting& require_splitting(const GradientSystem& sys);

}  // namespace savflow
