#include "savflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "savflow/errors.hpp"
#include "savflow/gradient_system.hpp"

namespace savflow {

namespace {

constexpr double kPivotTolerance = 1e-14;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": size " + std::to_string(a) +
                                                      " does not match " + std::to_string(b));
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

StateVector scaled(double alpha, std::span<const double> x) {
    StateVector out(x.begin(), x.end());
    for (double& v : out) v *= alpha;
    return out;
}

StateVector add(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "add");
    StateVector out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

StateVector subtract(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "subtract");
    StateVector out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

// ---------------------------------------------------------------------------

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

StateVector DenseMatrix::multiply(std::span<const double> v) const {
    require_same_size(cols_, v.size(), "DenseMatrix::multiply");
    StateVector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& other) const {
    require_same_size(cols_, other.rows_, "DenseMatrix::multiply");
    DenseMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += aik * other(k, j);
        }
    return out;
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

double DenseMatrix::max_abs_entry() const { return max_abs(data_); }

// ---------------------------------------------------------------------------

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
    const std::size_t n = lu_.rows();
    require_same_size(n, lu_.cols(), "LuFactorization (square)");
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

    const double scale = lu_.max_abs_entry();
    const double tol = kPivotTolerance * (scale > 0.0 ? scale : 1.0);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(lu_(i, k)) > best) {
                best = std::abs(lu_(i, k));
                pivot = i;
            }
        }
        if (best < tol || scale == 0.0) {
            throw Error(ErrorKind::SingularMatrix,
                        "LU pivot " + std::to_string(best) + " below tolerance at column " + std::to_string(k));
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(pivot, j));
            std::swap(perm_[k], perm_[pivot]);
        }
        const double inv = 1.0 / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double factor = lu_(i, k) * inv;
            lu_(i, k) = factor;
            if (factor == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= factor * lu_(k, j);
        }
    }
}

StateVector LuFactorization::solve(std::span<const double> b) const {
    const std::size_t n = lu_.rows();
    require_same_size(n, b.size(), "LuFactorization::solve");
    StateVector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= lu_(ii, j) * x[j];
        x[ii] /= lu_(ii, ii);
    }
    return x;
}

StateVector solve_dense(const DenseMatrix& a, std::span<const double> b) {
    require_same_size(a.rows(), b.size(), "solve_dense");
    return LuFactorization(a).solve(b);
}

// ---------------------------------------------------------------------------

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(ComplexVector& data, bool inverse) {
    const std::size_t n = data.size();
    if (!is_power_of_two(n)) {
        throw Error(ErrorKind::DimensionMismatch, "FFT length " + std::to_string(n) + " is not a power of two");
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::size_t half = len / 2;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                // Twiddles evaluated directly rather than by recurrence so the
                // transform stays accurate to round-off for every length.
                const Complex w(std::cos(angle * static_cast<double>(k)), std::sin(angle * static_cast<double>(k)));
                const Complex even = data[start + k];
                const Complex odd = data[start + k + half] * w;
                data[start + k] = even + odd;
                data[start + k + half] = even - odd;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (Complex& c : data) c *= inv_n;
    }
}

// ---------------------------------------------------------------------------

DenseOperator::DenseOperator(DenseMatrix matrix) : matrix_(std::move(matrix)) {
    require_same_size(matrix_.rows(), matrix_.cols(), "DenseOperator (square)");
}

StateVector DenseOperator::apply(std::span<const double> v) const { return matrix_.multiply(v); }

FourierDiagonalOperator::FourierDiagonalOperator(ComplexVector symbol) : symbol_(std::move(symbol)) {
    if (!is_power_of_two(symbol_.size())) {
        throw Error(ErrorKind::DimensionMismatch,
                    "Fourier operator length " + std::to_string(symbol_.size()) + " is not a power of two");
    }
}

StateVector FourierDiagonalOperator::apply(std::span<const double> v) const {
    double residue = 0.0;
    return apply(v, residue);
}

StateVector FourierDiagonalOperator::apply(std::span<const double> v, double& imag_residue) const {
    require_same_size(symbol_.size(), v.size(), "FourierDiagonalOperator::apply");
    ComplexVector work(v.begin(), v.end());
    fft_inplace(work, false);
    for (std::size_t k = 0; k < work.size(); ++k) work[k] *= symbol_[k];
    fft_inplace(work, true);
    StateVector out(work.size());
    imag_residue = 0.0;
    for (std::size_t j = 0; j < work.size(); ++j) {
        out[j] = work[j].real();
        imag_residue = std::max(imag_residue, std::abs(work[j].imag()));
    }
    return out;
}

FourierDiagonalOperator FourierDiagonalOperator::compose(const FourierDiagonalOperator& other) const {
    require_same_size(symbol_.size(), other.symbol_.size(), "FourierDiagonalOperator::compose");
    ComplexVector out(symbol_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = symbol_[k] * other.symbol_[k];
    return FourierDiagonalOperator(std::move(out));
}

bool FourierDiagonalOperator::is_conjugate_symmetric(double tol) const {
    const std::size_t n = symbol_.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(symbol_[k] - std::conj(symbol_[(n - k) % n])) > tol) return false;
    }
    return true;
}

StateVector apply_operator(const LinearOperator& op, std::span<const double> v) {
    return std::visit([&](const auto& o) { return o.apply(v); }, op);
}

std::size_t dim(const LinearOperator& op) {
    return std::visit([](const auto& o) { return o.dim(); }, op);
}

DenseMatrix to_dense(const LinearOperator& op) {
    if (const auto* dense = std::get_if<DenseOperator>(&op)) return dense->matrix();
    const std::size_t n = dim(op);
    DenseMatrix m(n, n);
    StateVector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const StateVector col = apply_operator(op, e);
        for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
        e[j] = 0.0;
    }
    return m;
}

// ---------------------------------------------------------------------------

LinearSolvePlan::Backend LinearSolvePlan::backend() const noexcept {
    return std::holds_alternative<LuFactorization>(impl_) ? Backend::DenseLU : Backend::FourierDiagonal;
}

StateVector LinearSolvePlan::solve(std::span<const double> f) const {
    require_same_size(dim_, f.size(), "LinearSolvePlan::solve");
    if (const auto* lu = std::get_if<LuFactorization>(&impl_)) return lu->solve(f);
    return std::get<FourierDiagonalOperator>(impl_).apply(f);
}

LinearSolvePlan plan_J(const LinearOperator& d, const LinearOperator& l, double alpha) {
    const std::size_t n = dim(d);
    require_same_size(n, dim(l), "plan_J");

    const auto* fd = std::get_if<FourierDiagonalOperator>(&d);
    const auto* fl = std::get_if<FourierDiagonalOperator>(&l);
    if (fd != nullptr && fl != nullptr) {
        ComplexVector reciprocal(n);
        for (std::size_t k = 0; k < n; ++k) {
            const Complex denom = 1.0 - alpha * fd->symbol()[k] * fl->symbol()[k];
            if (std::abs(denom) < kPivotTolerance) {
                throw Error(ErrorKind::SingularOperator, "J = I - alpha*D*L is singular at mode " + std::to_string(k) +
                                                             " for alpha = " + std::to_string(alpha));
            }
            reciprocal[k] = 1.0 / denom;
        }
        return LinearSolvePlan(alpha, n, FourierDiagonalOperator(std::move(reciprocal)));
    }

    DenseMatrix j = to_dense(d).multiply(to_dense(l));
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) j(r, c) = (r == c ? 1.0 : 0.0) - alpha * j(r, c);
    try {
        return LinearSolvePlan(alpha, n, LuFactorization(std::move(j)));
    } catch (const Error& e) {
        throw Error(ErrorKind::SingularOperator,
                    "J = I - alpha*D*L is singular for alpha = " + std::to_string(alpha) + " (" + e.what() + ")");
    }
}

LinearSolvePlan plan_J(const GradientSystem& sys, double alpha) { return plan_J(sys.D, sys.L, alpha); }

StateVector solve_J(const LinearSolvePlan& plan, std::span<const double> f) { return plan.solve(f); }

StateVector apply_J(const LinearOperator& d, const LinearOperator& l, double alpha, std::span<const double> v) {
    const StateVector dl = apply_operator(d, apply_operator(l, v));
    StateVector out(v.begin(), v.end());
    axpy(-alpha, dl, out);
    return out;
}

}  // namespace savflow
