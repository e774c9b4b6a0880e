#include "savflow/elliptic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "savflow/errors.hpp"

namespace savflow {

namespace {

constexpr int kMaxAgmIterations = 64;
constexpr double kAgmTolerance = 1e-15;

void check_modulus(double k) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw Error(ErrorKind::DomainError, "elliptic modulus must satisfy 0 <= k < 1, got " + std::to_string(k));
    }
}

}  // namespace

double elliptic_K(double k) {
    check_modulus(k);
    double a = 1.0;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    for (int i = 0; i < kMaxAgmIterations; ++i) {
        if (std::abs(a - b) <= kAgmTolerance * a) return std::numbers::pi / (2.0 * a);
        const double next = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = next;
    }
    throw Error(ErrorKind::ConvergenceFailure, "AGM for K(k) did not converge");
}

JacobiValues jacobi_elliptic(double x, double k) {
    check_modulus(k);
    const double m = k * k;
    std::array<double, kMaxAgmIterations + 1> a{};
    std::array<double, kMaxAgmIterations + 1> c{};
    a[0] = 1.0;
    c[0] = k;
    double b = std::sqrt((1.0 - k) * (1.0 + k));
    int n = 0;
    while (std::abs(c[n]) > kAgmTolerance) {
        if (n == kMaxAgmIterations) {
            throw Error(ErrorKind::ConvergenceFailure, "AGM for Jacobi functions did not converge");
        }
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }
    double amplitude = std::ldexp(a[n] * x, n);
    for (int i = n; i > 0; --i) amplitude = 0.5 * (amplitude + std::asin(c[i] / a[i] * std::sin(amplitude)));
    const double sn = std::sin(amplitude);
    const double cn = std::cos(amplitude);
    return {sn, cn, std::sqrt(1.0 - m * sn * sn)};
}

double jacobi_cn(double x, double k) { return jacobi_elliptic(x, k).cn; }

}  // namespace savflow
