#pragma once

#include <cstddef>

#include "savflow/gradient_system.hpp"

namespace savflow {

/// Uniform periodic grid x_j = j Δx on [0, domain_length), Δx = domain_length / N.
class KdvGrid {
public:
    /// N must be an even power of two.
    KdvGrid(std::size_t n, double domain_length);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double domain_length() const noexcept { return length_; }
    [[nodiscard]] double dx() const noexcept { return length_ / static_cast<double>(n_); }
    [[nodiscard]] double x(std::size_t j) const noexcept { return static_cast<double>(j) * dx(); }

private:
    std::size_t n_;
    double length_;
};

/// Cnoidal wave u(x, t) = u0 + 2κ²k² cn²(κ(x - c t) | k).
struct CnoidalParams {
    double k = 0.31622776601683794;  // √0.1
    double kappa = 1.0;
    double u0 = 0.0;

    /// c = 6 u0 + 4(2k² - 1) κ²
    [[nodiscard]] double speed() const;
    /// p = 2K(k)/κ
    [[nodiscard]] double spatial_period() const;
    /// T = p / |c|
    [[nodiscard]] double temporal_period() const;
};

/// Grid spanning exactly one spatial period of the cnoidal wave.
KdvGrid cnoidal_grid(const CnoidalParams& params, std::size_t n = 16);

/// Spectral difference operator δ = F⁻¹ Ξ F with the Nyquist mode zeroed.
FourierDiagonalOperator spectral_delta(const KdvGrid& grid);

/// Semi-discrete KdV u' = δ(-δ²u - 3 u⊙u) with D = δ, L = -δ², and
/// E_X(u) = Σ g_X(u_j) Δx for g_L = u⁴ - u³, g_U = u⁴. Gradients are taken
/// with respect to the Δx-weighted inner product.
GradientSystem kdv_system(const KdvGrid& grid, double a_L = 1.0, double a_U = 1.0);

/// A = -δ³ and g(u) = -3 δ(u⊙u).
Splitting kdv_splitting(const KdvGrid& grid);

/// Literal right-hand side δ(-δ²u - 3 u⊙u).
StateVector kdv_rhs(const KdvGrid& grid, const StateVector& u);

/// Lower bound of E_L on the grid: min g_L = -27/256 at u = 3/4.
double kdv_energy_L_lower_bound(const KdvGrid& grid);

StateVector cnoidal(const CnoidalParams& params, const KdvGrid& grid, double t);

}  // namespace savflow
