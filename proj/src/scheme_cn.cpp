#include "savflow/scheme_cn.hpp"

#include <cmath>
#include <sstream>

#include "savflow/errors.hpp"
#include "savflow/exponential.hpp"

namespace savflow {

namespace {

constexpr double kDeterminantGuard = 1e-14;

}  // namespace

std::string_view to_string(PredictorKind kind) noexcept {
    switch (kind) {
        case PredictorKind::Extrapolation: return "extrapolation";
        case PredictorKind::HalfStepExplicitEuler: return "explicit-euler";
        case PredictorKind::HalfStepExponentialEuler: return "exponential-euler";
    }
    return "unknown";
}

StateVector predict_half(const Predictor& pred, const GradientSystem& sys, const AugmentedState& zn, double dt,
                         long n) {
    switch (pred.kind) {
        case PredictorKind::Extrapolation: {
            if (n == 0) return zn.u;
            if (!pred.previous) {
                throw Error(ErrorKind::MissingHistory,
                            "extrapolation predictor needs the previous state at step " + std::to_string(n));
            }
            StateVector out = scaled(1.5, zn.u);
            axpy(-0.5, *pred.previous, out);
            return out;
        }
        case PredictorKind::HalfStepExplicitEuler: {
            StateVector out = zn.u;
            axpy(0.5 * dt, sys.vector_field(zn.u), out);
            return out;
        }
        case PredictorKind::HalfStepExponentialEuler:
            return exponential_euler(require_splitting(sys), zn.u, 0.5 * dt);
    }
    throw Error(ErrorKind::ConfigError, "unknown predictor");
}

CnWorkspace::CnWorkspace(const GradientSystem& sys, double dt) : dt_(dt), plan_(plan_J(sys, 0.5 * dt)) {}

void CnWorkspace::ensure(const GradientSystem& sys, double dt) {
    if (dt == dt_) return;
    plan_ = plan_J(sys, 0.5 * dt);
    dt_ = dt;
}

AugmentedState cn_step(const GradientSystem& sys, const AugmentedState& zn, const StateVector& u_bar, double dt,
                       CnWorkspace& ws) {
    ws.ensure(sys, dt);
    const StateVector phi_L = phi(sys, u_bar, EnergyPart::Lower);
    const StateVector phi_U = phi(sys, u_bar, EnergyPart::Upper);

    ws.jinv_u = ws.plan().solve(zn.u);
    ws.jinv_dphi_L = ws.plan().solve(sys.apply_D(phi_L));
    ws.jinv_dphi_U = ws.plan().solve(sys.apply_D(phi_U));

    const double p_LL = sys.inner(phi_L, ws.jinv_dphi_L);
    const double p_LU = sys.inner(phi_L, ws.jinv_dphi_U);
    const double p_UL = sys.inner(phi_U, ws.jinv_dphi_L);
    const double p_UU = sys.inner(phi_U, ws.jinv_dphi_U);
    const StateVector jinv_minus_i_u = subtract(ws.jinv_u, zn.u);
    const double q_L = sys.inner(phi_L, jinv_minus_i_u);
    const double q_U = sys.inner(phi_U, jinv_minus_i_u);

    const double m11 = 1.0 - dt * p_LL;
    const double m12 = dt * p_LU;
    const double m21 = -dt * p_UL;
    const double m22 = 1.0 + dt * p_UU;
    const double rhs1 = 2.0 * q_L + (1.0 + dt * p_LL) * zn.r_L - dt * p_LU * zn.r_U;
    const double rhs2 = 2.0 * q_U + dt * p_UL * zn.r_L - (dt * p_UU - 1.0) * zn.r_U;

    const double det = m11 * m22 - m12 * m21;
    if (std::abs(det) < kDeterminantGuard) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "auxiliary 2x2 system is singular: det=" << det << " entries=[" << m11 << ", " << m12 << "; " << m21
            << ", " << m22 << "]";
        throw Error(ErrorKind::SingularMatrix, msg.str());
    }
    const double r_L = (rhs1 * m22 - m12 * rhs2) / det;
    const double r_U = (m11 * rhs2 - m21 * rhs1) / det;

    // uⁿ⁺¹ = (2J⁻¹ - I)uⁿ + Δt(r_L' + r_L) J⁻¹Dφ_L - Δt(r_U' + r_U) J⁻¹Dφ_U
    StateVector u = scaled(2.0, ws.jinv_u);
    axpy(-1.0, zn.u, u);
    axpy(dt * (r_L + zn.r_L), ws.jinv_dphi_L, u);
    axpy(-dt * (r_U + zn.r_U), ws.jinv_dphi_U, u);
    return {std::move(u), r_L, r_U};
}

RunRecord cn_run(const GradientSystem& sys, const AugmentedState& z0, double dt, long steps, PredictorKind predictor,
                 RunOptions options) {
    if (predictor == PredictorKind::HalfStepExponentialEuler) require_splitting(sys);
    RunRecorder recorder(sys, z0, dt, steps, options);
    CnWorkspace ws(sys, dt);
    Predictor pred{predictor, std::nullopt};
    AugmentedState z = z0;
    for (long n = 0; n < steps; ++n) {
        try {
            const StateVector u_bar = predict_half(pred, sys, z, dt, n);
            AugmentedState next = cn_step(sys, z, u_bar, dt, ws);
            if (predictor == PredictorKind::Extrapolation) pred.previous = std::move(z.u);
            z = std::move(next);
        } catch (const Error& e) {
            throw e.at_step(n);
        }
        recorder.record(n + 1, z);
    }
    return std::move(recorder).finish(z);
}

}  // namespace savflow
