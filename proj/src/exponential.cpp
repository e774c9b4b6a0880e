#include "savflow/exponential.hpp"

#include <cmath>

#include "savflow/errors.hpp"

namespace savflow {

namespace {

constexpr int kSeriesTerms = 10;

// Σ_{m=0}^{terms-1} z^m / (m + k)!
Complex phi_series(Complex z, int k) {
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    Complex term = 1.0 / factorial;
    Complex sum = term;
    for (int m = 1; m < kSeriesTerms; ++m) {
        term *= z / static_cast<double>(m + k);
        sum += term;
    }
    return sum;
}

// e^z - 1 without cancellation for small Re z.
Complex expm1(Complex z) {
    const double x = z.real();
    const double y = z.imag();
    const double half_sin = std::sin(0.5 * y);
    const double re = std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin;
    const double im = std::exp(x) * std::sin(y);
    return {re, im};
}

StateVector apply_function(const FourierDiagonalOperator& a, double h, Complex (*fn)(Complex), double scale,
                           const StateVector& v) {
    return a.transformed([&](Complex s) { return fn(scale * h * s); }).apply(v);
}

}  // namespace

Complex phi1(Complex z) {
    if (std::abs(z) < kPhiSeriesThreshold) return phi_series(z, 1);
    return expm1(z) / z;
}

Complex phi2(Complex z) {
    if (std::abs(z) < kPhiSeriesThreshold) return phi_series(z, 2);
    return (expm1(z) - z) / (z * z);
}

const Splitting& require_splitting(const GradientSystem& sys) {
    if (!sys.splitting) {
        throw Error(ErrorKind::SplittingUnavailable,
                    "problem '" + sys.name + "' does not provide a linear/nonlinear splitting");
    }
    return *sys.splitting;
}

StateVector exponential_euler(const Splitting& split, const StateVector& u, double h) {
    if (h == 0.0) return u;
    StateVector n = split.linear.apply(u);
    axpy(1.0, split.nonlinear(u), n);
    StateVector out = u;
    axpy(h, apply_function(split.linear, h, phi1, 1.0, n), out);
    return out;
}

StateVector exponential_rk3(const Splitting& split, const StateVector& u, double h) {
    if (h == 0.0) return u;
    const FourierDiagonalOperator& a = split.linear;
    const StateVector au = a.apply(u);
    // Stage forcing g(U_j) + A u^n.
    auto forcing = [&](const StateVector& stage) {
        StateVector f = split.nonlinear(stage);
        axpy(1.0, au, f);
        return f;
    };

    const StateVector n1 = forcing(u);

    // U_2 = u + h (1/3) φ₁(hA/3) N_1
    StateVector u2 = u;
    axpy(h / 3.0, apply_function(a, h, phi1, 1.0 / 3.0, n1), u2);
    const StateVector n2 = forcing(u2);

    // U_3 = u + h [ (2/3 φ₁ - 4/3 φ₂)(2hA/3) N_1 + 4/3 φ₂(2hA/3) N_2 ]
    const auto a31 = a.transformed([&](Complex s) {
        const Complex z = (2.0 / 3.0) * h * s;
        return (2.0 / 3.0) * phi1(z) - (4.0 / 3.0) * phi2(z);
    });
    const auto a32 = a.transformed([&](Complex s) { return (4.0 / 3.0) * phi2((2.0 / 3.0) * h * s); });
    StateVector u3 = u;
    axpy(h, a31.apply(n1), u3);
    axpy(h, a32.apply(n2), u3);
    const StateVector n3 = forcing(u3);

    // u^{n+1} = u + h [ (φ₁ - 3/2 φ₂)(hA) N_1 + 3/2 φ₂(hA) N_3 ]
    const auto b1 = a.transformed([&](Complex s) { return phi1(h * s) - 1.5 * phi2(h * s); });
    const auto b3 = a.transformed([&](Complex s) { return 1.5 * phi2(h * s); });
    StateVector out = u;
    axpy(h, b1.apply(n1), out);
    axpy(h, b3.apply(n3), out);
    return out;
}

}  // namespace savflow
