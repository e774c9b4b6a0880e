#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace savflow {

using StateVector = std::vector<double>;
using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

struct GradientSystem;

// ---------------------------------------------------------------------------
// Small vector helpers
// ---------------------------------------------------------------------------

/// Unweighted Euclidean dot product.
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> v);
double norm2(std::span<const double> v);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
StateVector scaled(double alpha, std::span<const double> x);
StateVector add(std::span<const double> a, std::span<const double> b);
StateVector subtract(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

/// Row-major square or rectangular real matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    [[nodiscard]] StateVector multiply(std::span<const double> v) const;
    [[nodiscard]] DenseMatrix multiply(const DenseMatrix& other) const;
    [[nodiscard]] DenseMatrix transpose() const;
    [[nodiscard]] double max_abs_entry() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// LU factorization with partial pivoting. Throws SingularMatrix when a pivot
/// falls below 1e-14 times the largest entry of the input.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a);

    [[nodiscard]] std::size_t size() const noexcept { return lu_.rows(); }
    [[nodiscard]] StateVector solve(std::span<const double> b) const;

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

StateVector solve_dense(const DenseMatrix& a, std::span<const double> b);

// ---------------------------------------------------------------------------
// FFT
// ---------------------------------------------------------------------------

/// In-place iterative radix-2 FFT. Forward uses e^{-2πi jk/N}; the inverse
/// includes the 1/N normalisation. The length must be a power of two.
void fft_inplace(ComplexVector& data, bool inverse);

bool is_power_of_two(std::size_t n) noexcept;

// ---------------------------------------------------------------------------
// Linear operators
// ---------------------------------------------------------------------------

class DenseOperator {
public:
    DenseOperator() = default;
    explicit DenseOperator(DenseMatrix matrix);

    [[nodiscard]] std::size_t dim() const noexcept { return matrix_.rows(); }
    [[nodiscard]] const DenseMatrix& matrix() const noexcept { return matrix_; }
    [[nodiscard]] StateVector apply(std::span<const double> v) const;

private:
    DenseMatrix matrix_;
};

/// Operator diagonalised by the DFT: v -> Re(F^{-1} diag(symbol) F v).
/// The symbol must be conjugate symmetric so that real input maps to real
/// output.
class FourierDiagonalOperator {
public:
    explicit FourierDiagonalOperator(ComplexVector symbol);

    [[nodiscard]] std::size_t dim() const noexcept { return symbol_.size(); }
    [[nodiscard]] const ComplexVector& symbol() const noexcept { return symbol_; }

    [[nodiscard]] StateVector apply(std::span<const double> v) const;
    /// Same as apply but also reports the largest imaginary component left
    /// after the inverse transform.
    [[nodiscard]] StateVector apply(std::span<const double> v, double& imag_residue) const;

    /// Operator whose symbol is fn(symbol[k]) for each mode.
    template <typename Fn>
    [[nodiscard]] FourierDiagonalOperator transformed(Fn&& fn) const {
        ComplexVector out(symbol_.size());
        for (std::size_t k = 0; k < symbol_.size(); ++k) out[k] = fn(symbol_[k]);
        return FourierDiagonalOperator(std::move(out));
    }

    /// Elementwise product of symbols (composition of the two operators).
    [[nodiscard]] FourierDiagonalOperator compose(const FourierDiagonalOperator& other) const;

    [[nodiscard]] bool is_conjugate_symmetric(double tol = 1e-12) const;

private:
    ComplexVector symbol_;
};

using LinearOperator = std::variant<DenseOperator, FourierDiagonalOperator>;

StateVector apply_operator(const LinearOperator& op, std::span<const double> v);
std::size_t dim(const LinearOperator& op);
/// Materialises any operator as a dense matrix by applying it to unit vectors.
DenseMatrix to_dense(const LinearOperator& op);

// ---------------------------------------------------------------------------
// Solve plans for J = I - alpha * D * L
// ---------------------------------------------------------------------------

class LinearSolvePlan {
public:
    enum class Backend { DenseLU, FourierDiagonal };

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] Backend backend() const noexcept;
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    /// Returns w with (I - alpha D L) w = f.
    [[nodiscard]] StateVector solve(std::span<const double> f) const;

private:
    friend LinearSolvePlan plan_J(const LinearOperator& d, const LinearOperator& l, double alpha);

    LinearSolvePlan(double alpha, std::size_t dim, std::variant<LuFactorization, FourierDiagonalOperator> impl)
        : alpha_(alpha), dim_(dim), impl_(std::move(impl)) {}

    double alpha_;
    std::size_t dim_;
    // Fourier backend stores the elementwise reciprocal of 1 - alpha*s_D*s_L.
    std::variant<LuFactorization, FourierDiagonalOperator> impl_;
};

/// Builds a plan for J = I - alpha*D*L. When both operators are Fourier
/// diagonal the plan is diagonal; otherwise D*L is materialised and LU
/// factored. Throws SingularOperator if J is not invertible.
LinearSolvePlan plan_J(const LinearOperator& d, const LinearOperator& l, double alpha);
LinearSolvePlan plan_J(const GradientSystem& sys, double alpha);

StateVector solve_J(const LinearSolvePlan& plan, std::span<const double> f);

/// Forward application of J = I - alpha*D*L.
StateVector apply_J(const LinearOperator& d, const LinearOperator& l, double alpha,
                    std::span<const double> v);

}  // namespace savflow
