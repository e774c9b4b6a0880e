#pragma once

#include <optional>
#include <string_view>

#include "savflow/gradient_system.hpp"
#include "savflow/linalg.hpp"
#include "savflow/run_record.hpp"

namespace savflow {

/// How ū^{n+1/2}, the state at which 𝓛 is frozen, is obtained.
enum class PredictorKind {
    Extrapolation,             // u⁰ at n = 0, (3uⁿ - uⁿ⁻¹)/2 afterwards
    HalfStepExplicitEuler,     // uⁿ + (Δt/2) D∇E(uⁿ)
    HalfStepExponentialEuler,  // exponential Euler over Δt/2 with the (A, g) split
};

std::string_view to_string(PredictorKind kind) noexcept;

struct Predictor {
    PredictorKind kind = PredictorKind::HalfStepExplicitEuler;
    std::optional<StateVector> previous;  // uⁿ⁻¹, used by Extrapolation
};

/// ū^{n+1/2} for step index n. Extrapolation at n ≥ 1 without uⁿ⁻¹ throws
/// MissingHistory.
StateVector predict_half(const Predictor& pred, const GradientSystem& sys, const AugmentedState& zn, double dt,
                         long n);

/// Reusable state for the Crank–Nicolson SAV step: the solve plan for
/// J = I - (Δt/2) D L and the three J-solves of the latest step.
class CnWorkspace {
public:
    CnWorkspace(const GradientSystem& sys, double dt);

    /// Re-plans when the step size changes.
    void ensure(const GradientSystem& sys, double dt);

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const LinearSolvePlan& plan() const noexcept { return plan_; }

    StateVector jinv_u;
    StateVector jinv_dphi_L;
    StateVector jinv_dphi_U;

private:
    double dt_;
    LinearSolvePlan plan_;
};

/// One step of the linearly implicit Crank–Nicolson SAV scheme
///   (zⁿ⁺¹ - zⁿ)/Δt = 𝓛(ū) ∇Ẽ((zⁿ⁺¹ + zⁿ)/2),
/// solved by block Gauss elimination: three J-solves, a 2x2 system for the
/// auxiliary variables, then back substitution for u.
AugmentedState cn_step(const GradientSystem& sys, const AugmentedState& zn, const StateVector& u_bar, double dt,
                       CnWorkspace& ws);

/// Iterates cn_step, refreshing the predictor every step. Errors are
/// rethrown with the failing step index attached.
RunRecord cn_run(const GradientSystem& sys, const AugmentedState& z0, double dt, long steps, PredictorKind predictor,
                 RunOptions options = {});

}  // namespace savflow
