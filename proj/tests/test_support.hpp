#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls the scheme implementations it is used to check.

#include <cmath>
#include <random>
#include <vector>

#include "savflow/gradient_system.hpp"
#include "savflow/linalg.hpp"

namespace savflow::testkit {

using Rng = std::mt19937_64;

inline StateVector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    StateVector v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

inline double random_scalar(Rng& rng, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline AugmentedState random_augmented(Rng& rng, std::size_t n) {
    return {random_vector(rng, n), random_scalar(rng), random_scalar(rng)};
}

/// Random dense gradient system of size n:
///   D = B - Bᵀ (skew) or -CᵀC (negative semidefinite), L = MᵀM,
///   E_L = w Σ u⁴/4, E_U = w Σ √(1 + u²), with inner weight w.
inline GradientSystem random_small_system(Rng& rng, std::size_t n, OperatorKind kind = OperatorKind::SkewAdjoint) {
    DenseMatrix b(n, n), m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            b(i, j) = random_scalar(rng);
            m(i, j) = random_scalar(rng);
        }
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d(i, j) = b(i, j) - b(j, i);
    if (kind == OperatorKind::NegativeSemidefinite) {
        const DenseMatrix btb = b.transpose().multiply(b);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d(i, j) = -btb(i, j);
    }
    const DenseMatrix l = m.transpose().multiply(m);
    const double w = random_scalar(rng, 0.2, 2.0);

    GradientSystem sys;
    sys.name = "random";
    sys.dim = n;
    sys.D = DenseOperator(d);
    sys.D_kind = kind;
    sys.L = DenseOperator(l);
    sys.energy_L = [w](const StateVector& u) {
        double s = 0.0;
        for (double x : u) s += 0.25 * x * x * x * x;
        return w * s;
    };
    sys.energy_U = [w](const StateVector& u) {
        double s = 0.0;
        for (double x : u) s += std::sqrt(1.0 + x * x);
        return w * s;
    };
    sys.grad_energy_L = [](const StateVector& u) {
        StateVector g(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) g[i] = u[i] * u[i] * u[i];
        return g;
    };
    sys.grad_energy_U = [](const StateVector& u) {
        StateVector g(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) g[i] = u[i] / std::sqrt(1.0 + u[i] * u[i]);
        return g;
    };
    sys.a_L = 1.0;
    sys.a_U = 1.0;
    sys.inner_weight = w;
    return sys;
}

/// Plain Gaussian elimination with partial pivoting, kept separate from the
/// library's LU so that the oracles do not share its code path.
inline StateVector oracle_solve(std::vector<std::vector<double>> a, StateVector b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    StateVector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

using Matrix = std::vector<std::vector<double>>;

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.size(), k = b.size(), m = b[0].size();
    Matrix c(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][p] * b[p][j];
    return c;
}

inline Matrix dense_of(const LinearOperator& op) {
    const std::size_t n = dim(op);
    Matrix m(n, std::vector<double>(n, 0.0));
    StateVector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const StateVector col = apply_operator(op, e);
        for (std::size_t i = 0; i < n; ++i) m[i][j] = col[i];
        e[j] = 0.0;
    }
    return m;
}

/// 𝓛(ū) assembled literally from the three-factor block product
///   [[I,0,0],[Φ_L,1,0],[Φ_U,0,1]] · diag(D,0,0) · [[I,Φ*_L,Φ*_U],[0,1,0],[0,0,1]]
/// where Φ_X v = <φ_X, v> and Φ*_X r = r φ_X.
inline Matrix assembled_augmented_operator(const GradientSystem& sys, const StateVector& u_bar) {
    const std::size_t n = sys.dim, m = n + 2;
    const double sl = 2.0 * std::sqrt(sys.energy_L(u_bar) + sys.a_L);
    const double su = 2.0 * std::sqrt(sys.energy_U(u_bar) + sys.a_U);
    StateVector phi_l = sys.grad_energy_L(u_bar), phi_u = sys.grad_energy_U(u_bar);
    for (auto& x : phi_l) x /= sl;
    for (auto& x : phi_u) x /= su;

    Matrix left(m, std::vector<double>(m, 0.0)), mid(m, std::vector<double>(m, 0.0)),
        right(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) left[i][i] = right[i][i] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        left[n][j] = sys.inner_weight * phi_l[j];
        left[n + 1][j] = sys.inner_weight * phi_u[j];
        right[j][n] = phi_l[j];
        right[j][n + 1] = phi_u[j];
    }
    const Matrix d = dense_of(sys.D);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) mid[i][j] = d[i][j];
    return matmul(matmul(left, mid), right);
}

/// ∇Ẽ as a matrix: diag(L, 2, -2).
inline Matrix energy_gradient_matrix(const GradientSystem& sys) {
    const std::size_t n = sys.dim, m = n + 2;
    Matrix g(m, std::vector<double>(m, 0.0));
    const Matrix l = dense_of(sys.L);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i][j] = l[i][j];
    g[n][n] = 2.0;
    g[n + 1][n + 1] = -2.0;
    return g;
}

inline StateVector flat(const AugmentedState& z) {
    StateVector v = z.u;
    v.push_back(z.r_L);
    v.push_back(z.r_U);
    return v;
}

inline AugmentedState unflat(const StateVector& v, std::size_t n) {
    return {StateVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)), v[n], v[n + 1]};
}

/// Monolithic solve of (z⁺ - z)/Δt = 𝓛(ū) ∇Ẽ((z⁺ + z)/2) as one dense
/// (n+2)-dimensional system.
inline AugmentedState monolithic_cn_step(const GradientSystem& sys, const AugmentedState& z, const StateVector& u_bar,
                                         double dt) {
    const std::size_t n = sys.dim, m = n + 2;
    const Matrix k = matmul(assembled_augmented_operator(sys, u_bar), energy_gradient_matrix(sys));
    Matrix lhs(m, std::vector<double>(m, 0.0));
    const StateVector zf = flat(z);
    StateVector rhs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        rhs[i] = zf[i];
        for (std::size_t j = 0; j < m; ++j) {
            lhs[i][j] = (i == j ? 1.0 : 0.0) - 0.5 * dt * k[i][j];
            rhs[i] += 0.5 * dt * k[i][j] * zf[j];
        }
    }
    return unflat(oracle_solve(lhs, rhs), n);
}

struct GaussStep {
    std::vector<AugmentedState> stages;
    AugmentedState next;
};

/// Fully implicit two-stage Gauss method on the augmented system
///   Z_i = z + Δt Σ_j a_ij 𝓛(U_j) ∇Ẽ(Z_j),
/// solved by fixed-point iteration to `tol` in max norm.
inline GaussStep nonlinear_gauss2_step(const GradientSystem& sys, const AugmentedState& z, double dt,
                                       double tol = 1e-15, int max_iter = 500) {
    const double s3 = std::sqrt(3.0) / 6.0;
    const double a[2][2] = {{0.25, 0.25 - s3}, {0.25 + s3, 0.25}};
    const std::size_t n = sys.dim;
    const Matrix g = energy_gradient_matrix(sys);
    auto rhs = [&](const AugmentedState& stage) {
        const Matrix k = matmul(assembled_augmented_operator(sys, stage.u), g);
        const StateVector sf = flat(stage);
        StateVector out(n + 2, 0.0);
        for (std::size_t i = 0; i < n + 2; ++i)
            for (std::size_t j = 0; j < n + 2; ++j) out[i] += k[i][j] * sf[j];
        return out;
    };
    std::vector<AugmentedState> stages{z, z};
    std::vector<StateVector> f{rhs(z), rhs(z)};
    for (int it = 0; it < max_iter; ++it) {
        double change = 0.0;
        std::vector<AugmentedState> next_stages;
        for (int i = 0; i < 2; ++i) {
            StateVector v = flat(z);
            for (int j = 0; j < 2; ++j)
                for (std::size_t r = 0; r < n + 2; ++r) v[r] += dt * a[i][j] * f[j][r];
            const StateVector old = flat(stages[i]);
            for (std::size_t r = 0; r < n + 2; ++r) change = std::max(change, std::abs(v[r] - old[r]));
            next_stages.push_back(unflat(v, n));
        }
        stages = next_stages;
        f = {rhs(stages[0]), rhs(stages[1])};
        if (change <= tol) break;
    }
    StateVector out = flat(z);
    for (int j = 0; j < 2; ++j)
        for (std::size_t r = 0; r < n + 2; ++r) out[r] += dt * 0.5 * f[j][r];
    return {stages, unflat(out, n)};
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Classical RK4 on u' = f(u) with `steps` equal steps over [0, t].
template <typename F>
StateVector rk4_reference(F&& f, StateVector u, double t, long steps) {
    const double h = t / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
        const StateVector k1 = f(u);
        StateVector tmp = u;
        for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * h * k1[i];
        const StateVector k2 = f(tmp);
        for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * h * k2[i];
        const StateVector k3 = f(tmp);
        for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + h * k3[i];
        const StateVector k4 = f(tmp);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return u;
}

}  // namespace savflow::testkit
