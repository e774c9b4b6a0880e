#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "savflow/linalg.hpp"

namespace savflow {

enum class OperatorKind { SkewAdjoint, NegativeSemidefinite };

enum class EnergyPart { Lower, Upper };

using ScalarFunctional = std::function<double(const StateVector&)>;
using VectorFunctional = std::function<StateVector(const StateVector&)>;

/// Optional stiff/non-stiff split u' = A u + g(u) used by the exponential
/// predictors. A must be diagonal in Fourier space.
struct Splitting {
    FourierDiagonalOperator linear;
    VectorFunctional nonlinear;
};

/// A gradient system u' = D ∇E(u) with the energy decomposed as
///   E(u) = ½<u, L u> + E_L(u) - E_U(u),
/// where L is self-adjoint positive semidefinite and E_L, E_U are bounded
/// below. The inner product is <u, v> = inner_weight * Σ u_j v_j, and the
/// gradients are taken with respect to it.
struct GradientSystem {
    std::string name;
    std::size_t dim = 0;
    LinearOperator D;
    OperatorKind D_kind = OperatorKind::SkewAdjoint;
    LinearOperator L;
    ScalarFunctional energy_L;
    ScalarFunctional energy_U;
    VectorFunctional grad_energy_L;
    VectorFunctional grad_energy_U;
    double a_L = 1.0;
    double a_U = 1.0;
    double inner_weight = 1.0;
    std::optional<Splitting> splitting;

    [[nodiscard]] StateVector apply_D(std::span<const double> v) const { return apply_operator(D, v); }
    [[nodiscard]] StateVector apply_L(std::span<const double> v) const { return apply_operator(L, v); }
    [[nodiscard]] double inner(std::span<const double> a, std::span<const double> b) const {
        return inner_weight * dot(a, b);
    }
    /// ∇E(u) = L u + ∇E_L(u) - ∇E_U(u)
    [[nodiscard]] StateVector grad_energy(const StateVector& u) const;
    /// The original vector field D ∇E(u).
    [[nodiscard]] StateVector vector_field(const StateVector& u) const;
};

/// z = (u, r_L, r_U). Also used for tangent vectors of the augmented space.
struct AugmentedState {
    StateVector u;
    double r_L = 0.0;
    double r_U = 0.0;
};

/// Radicands E_X(u) + a_X at or below this value are rejected.
inline constexpr double kRadicandFloor = 1e-14;

/// √(E_X(u) + a_X); throws DomainError when the radicand is not positive.
double auxiliary_variable(const GradientSystem& sys, const StateVector& u, EnergyPart which);

AugmentedState init_augmented(const GradientSystem& sys, const StateVector& u0);

/// φ_X(u) = ∇E_X(u) / (2 √(E_X(u) + a_X))
StateVector phi(const GradientSystem& sys, const StateVector& u, EnergyPart which);

/// Ẽ(z) = ½<u, L u> + r_L² - r_U²
double modified_energy(const GradientSystem& sys, const AugmentedState& z);

/// E(u) = ½<u, L u> + E_L(u) - E_U(u)
double original_energy(const GradientSystem& sys, const StateVector& u);

/// ∇Ẽ(z) = (L u, 2 r_L, -2 r_U)
AugmentedState modified_energy_gradient(const GradientSystem& sys, const AugmentedState& z);

/// Inner product on Z = V x R x R induced by the weighted inner product on V.
double augmented_inner(const GradientSystem& sys, const AugmentedState& a, const AugmentedState& b);

/// The operator 𝓛(ū) frozen at a state ū, applied matrix-free:
///   g  = w_u + w_L φ_L + w_U φ_U
///   𝓛w = (D g, <φ_L, D g>, <φ_U, D g>)
class AugmentedOperator {
public:
    AugmentedOperator(const GradientSystem& sys, const StateVector& u_bar);
    /// Frozen operator built from precomputed φ vectors.
    AugmentedOperator(const GradientSystem& sys, StateVector phi_L, StateVector phi_U);

    [[nodiscard]] AugmentedState apply(const AugmentedState& w) const;

    [[nodiscard]] const StateVector& phi_L() const noexcept { return phi_L_; }
    [[nodiscard]] const StateVector& phi_U() const noexcept { return phi_U_; }

private:
    const GradientSystem* sys_;
    StateVector phi_L_;
    StateVector phi_U_;
};

/// 𝓛(ū) ∇Ẽ(z), the right-hand side of the augmented gradient system.
AugmentedState augmented_rhs(const GradientSystem& sys, const AugmentedState& z, const StateVector& u_bar);

// Elementwise helpers on augmented vectors.
AugmentedState operator+(const AugmentedState& a, const AugmentedState& b);
AugmentedState operator-(const AugmentedState& a, const AugmentedState& b);
AugmentedState operator*(double s, const AugmentedState& a);
/// Flattens to (u_0, ..., u_{n-1}, r_L, r_U).
StateVector flatten(const AugmentedState& z);
AugmentedState unflatten(std::span<const double> v, std::size_t n);
double max_abs(const AugmentedState& z);

}  // namespace savflow
