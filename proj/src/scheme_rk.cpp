#include "savflow/scheme_rk.hpp"

#include <algorithm>
#include <cmath>

#include "savflow/errors.hpp"
#include "savflow/exponential.hpp"

namespace savflow {

double ButcherTableau::canonical_residual() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < stages(); ++i)
        for (std::size_t j = 0; j < stages(); ++j)
            worst = std::max(worst, std::abs(b[i] * b[j] - b[i] * a[i][j] - b[j] * a[j][i]));
    return worst;
}

ButcherTableau gauss2_tableau() {
    const double s = std::sqrt(3.0) / 6.0;
    return {{{0.25, 0.25 - s}, {0.25 + s, 0.25}}, {0.5, 0.5}, {0.5 - s, 0.5 + s}};
}

ExplicitPredictorTableau explicit_predictor_tableau() {
    const double s = std::sqrt(3.0) / 6.0;
    ExplicitPredictorTableau t;
    t.a[1][0] = 0.25;
    t.a[2][1] = 0.5;
    t.a[3][0] = 1.0 / 6.0;
    t.a[3][2] = 1.0 / 3.0 - s;
    t.a[4][0] = 1.0 / 6.0;
    t.a[4][2] = 1.0 / 3.0 + s;
    return t;
}

std::string_view to_string(StagePredictorKind kind) noexcept {
    return kind == StagePredictorKind::Explicit ? "explicit" : "exponential";
}

StagePair predict_stages_explicit(const GradientSystem& sys, const StateVector& u, double dt) {
    const ExplicitPredictorTableau tab = explicit_predictor_tableau();
    std::array<StateVector, 5> slopes;
    std::array<StateVector, 5> stages;
    for (std::size_t i = 0; i < 5; ++i) {
        stages[i] = u;
        for (std::size_t j = 0; j < i; ++j)
            if (tab.a[i][j] != 0.0) axpy(dt * tab.a[i][j], slopes[j], stages[i]);
        // Stages 4 and 5 are outputs only; their slopes are never needed.
        if (i < 3) slopes[i] = sys.vector_field(stages[i]);
    }
    return {std::move(stages[3]), std::move(stages[4])};
}

StagePair predict_stages_exponential(const GradientSystem& sys, const StateVector& u, double dt) {
    const Splitting& split = require_splitting(sys);
    const ButcherTableau gauss = gauss2_tableau();
    return {exponential_rk3(split, u, gauss.c[0] * dt), exponential_rk3(split, u, gauss.c[1] * dt)};
}

StagePair predict_stages(StagePredictorKind kind, const GradientSystem& sys, const StateVector& u, double dt) {
    return kind == StagePredictorKind::Explicit ? predict_stages_explicit(sys, u, dt)
                                                : predict_stages_exponential(sys, u, dt);
}

RkWorkspace::RkWorkspace(const GradientSystem& sys) : l_(to_dense(sys.L)) {}

namespace {

// K = 𝓛(Ū) ∘ ∇Ẽ as an (n+2)x(n+2) matrix; ∇Ẽ(Z) = (L U, 2 R_L, -2 R_U).
DenseMatrix frozen_rhs_matrix(const GradientSystem& sys, const AugmentedOperator& op, const DenseMatrix& l) {
    const std::size_t n = sys.dim;
    const std::size_t m = n + 2;
    DenseMatrix k(m, m);
    AugmentedState column{StateVector(n, 0.0), 0.0, 0.0};
    auto store = [&](std::size_t col, const AugmentedState& image) {
        for (std::size_t i = 0; i < n; ++i) k(i, col) = image.u[i];
        k(n, col) = image.r_L;
        k(n + 1, col) = image.r_U;
    };
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) column.u[i] = l(i, j);
        store(j, op.apply(column));
    }
    std::fill(column.u.begin(), column.u.end(), 0.0);
    column.r_L = 2.0;
    store(n, op.apply(column));
    column.r_L = 0.0;
    column.r_U = -2.0;
    store(n + 1, op.apply(column));
    return k;
}

}  // namespace

RkStep rk_step_stages(const GradientSystem& sys, const ButcherTableau& tableau, const AugmentedState& zn, double dt,
                      const std::vector<StateVector>& frozen, const RkWorkspace& ws) {
    const std::size_t s = tableau.stages();
    if (frozen.size() != s) {
        throw Error(ErrorKind::DimensionMismatch, "need one frozen state per stage");
    }
    const std::size_t n = sys.dim;
    const std::size_t m = n + 2;

    std::vector<DenseMatrix> k;
    k.reserve(s);
    for (const StateVector& u_bar : frozen) {
        k.push_back(frozen_rhs_matrix(sys, AugmentedOperator(sys, u_bar), ws.l_matrix()));
    }

    DenseMatrix big(s * m, s * m);
    StateVector rhs(s * m);
    const StateVector z = flatten(zn);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t r = 0; r < m; ++r) {
            rhs[i * m + r] = z[r];
            big(i * m + r, i * m + r) = 1.0;
        }
        for (std::size_t j = 0; j < s; ++j) {
            const double coeff = dt * tableau.a[i][j];
            if (coeff == 0.0) continue;
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) big(i * m + r, j * m + c) -= coeff * k[j](r, c);
        }
    }
    const StateVector solution = solve_dense(big, rhs);

    RkStep out;
    StateVector next = z;
    for (std::size_t j = 0; j < s; ++j) {
        const std::span<const double> zj(solution.data() + j * m, m);
        out.stages.push_back(unflatten(zj, n));
        axpy(dt * tableau.b[j], k[j].multiply(zj), next);
    }
    out.next = unflatten(next, n);
    return out;
}

AugmentedState rk4_step(const GradientSystem& sys, const AugmentedState& zn, double dt, const StagePair& frozen) {
    return rk_step_stages(sys, gauss2_tableau(), zn, dt, {frozen.first, frozen.second}, RkWorkspace(sys)).next;
}

AugmentedState rk4_step(const GradientSystem& sys, const AugmentedState& zn, double dt, StagePredictorKind kind) {
    return rk4_step(sys, zn, dt, predict_stages(kind, sys, zn.u, dt));
}

RunRecord rk4_run(const GradientSystem& sys, const AugmentedState& z0, double dt, long steps,
                  StagePredictorKind kind, RunOptions options) {
    if (kind == StagePredictorKind::Exponential) require_splitting(sys);
    RunRecorder recorder(sys, z0, dt, steps, options);
    const ButcherTableau tableau = gauss2_tableau();
    const RkWorkspace ws(sys);
    AugmentedState z = z0;
    for (long n = 0; n < steps; ++n) {
        try {
            StagePair frozen = predict_stages(kind, sys, z.u, dt);
            z = rk_step_stages(sys, tableau, z, dt, {std::move(frozen.first), std::move(frozen.second)}, ws).next;
        } catch (const Error& e) {
            throw e.at_step(n);
        }
        recorder.record(n + 1, z);
    }
    return std::move(recorder).finish(z);
}

}  // namespace savflow
