#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "savflow/gradient_system.hpp"
#include "savflow/run_record.hpp"

namespace savflow {

struct ButcherTableau {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c;

    [[nodiscard]] std::size_t stages() const noexcept { return b.size(); }
    /// max_{i,j} |b_i b_j - b_i a_ij - b_j a_ji|; zero for canonical methods.
    [[nodiscard]] double canonical_residual() const;
};

/// Two-stage Gauss–Legendre tableau (order 4, canonical).
ButcherTableau gauss2_tableau();

/// Strictly lower triangular five-stage explicit method whose stages 4 and 5
/// approximate the Gauss nodes c_1, c_2 to local order three.
struct ExplicitPredictorTableau {
    std::array<std::array<double, 5>, 5> a{};
};

ExplicitPredictorTableau explicit_predictor_tableau();

enum class StagePredictorKind { Explicit, Exponential };

std::string_view to_string(StagePredictorKind kind) noexcept;

/// Ū₁, Ū₂: the states at which 𝓛 is frozen in the two stages.
struct StagePair {
    StateVector first;
    StateVector second;
};

StagePair predict_stages_explicit(const GradientSystem& sys, const StateVector& u, double dt);
/// ERK(c_j Δt) uⁿ with the three-stage exponential method. Throws
/// SplittingUnavailable for problems without an (A, g) split.
StagePair predict_stages_exponential(const GradientSystem& sys, const StateVector& u, double dt);
StagePair predict_stages(StagePredictorKind kind, const GradientSystem& sys, const StateVector& u, double dt);

/// Dense columns of L, reused across steps.
class RkWorkspace {
public:
    explicit RkWorkspace(const GradientSystem& sys);
    [[nodiscard]] const DenseMatrix& l_matrix() const noexcept { return l_; }

private:
    DenseMatrix l_;
};

struct RkStep {
    std::vector<AugmentedState> stages;  // Z_1, Z_2
    AugmentedState next;                 // zⁿ⁺¹
};

/// Solves the coupled linear stage system
///   Z_i = zⁿ + Δt Σ_j a_ij 𝓛(Ū_j) ∇Ẽ(Z_j)
/// as one dense system of size s(n+2), then forms
///   zⁿ⁺¹ = zⁿ + Δt Σ_j b_j 𝓛(Ū_j) ∇Ẽ(Z_j).
RkStep rk_step_stages(const GradientSystem& sys, const ButcherTableau& tableau, const AugmentedState& zn, double dt,
                      const std::vector<StateVector>& frozen, const RkWorkspace& ws);

AugmentedState rk4_step(const GradientSystem& sys, const AugmentedState& zn, double dt, const StagePair& frozen);
AugmentedState rk4_step(const GradientSystem& sys, const AugmentedState& zn, double dt, StagePredictorKind kind);

RunRecord rk4_run(const GradientSystem& sys, const AugmentedState& z0, double dt, long steps,
                  StagePredictorKind kind, RunOptions options = {});

}  // namespace savflow
