#include "savflow/kdv.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "savflow/elliptic.hpp"
#include "savflow/errors.hpp"

namespace savflow {

KdvGrid::KdvGrid(std::size_t n, double domain_length) : n_(n), length_(domain_length) {
    if (n < 2 || !is_power_of_two(n)) {
        throw Error(ErrorKind::ConfigError, "KdV grid size must be an even power of two, got " + std::to_string(n));
    }
    if (!(domain_length > 0.0)) throw Error(ErrorKind::ConfigError, "KdV domain length must be positive");
}

double CnoidalParams::speed() const { return 6.0 * u0 + 4.0 * (2.0 * k * k - 1.0) * kappa * kappa; }

double CnoidalParams::spatial_period() const { return 2.0 * elliptic_K(k) / kappa; }

double CnoidalParams::temporal_period() const { return spatial_period() / std::abs(speed()); }

KdvGrid cnoidal_grid(const CnoidalParams& params, std::size_t n) { return KdvGrid(n, params.spatial_period()); }

FourierDiagonalOperator spectral_delta(const KdvGrid& grid) {
    const std::size_t n = grid.size();
    const double scale = 2.0 * std::numbers::pi / grid.domain_length();
    ComplexVector symbol(n);
    for (std::size_t k = 0; k < n; ++k) {
        double wavenumber = 0.0;
        if (k < n / 2) {
            wavenumber = static_cast<double>(k);
        } else if (k > n / 2) {
            wavenumber = static_cast<double>(k) - static_cast<double>(n);
        }
        symbol[k] = Complex(0.0, scale * wavenumber);
    }
    return FourierDiagonalOperator(std::move(symbol));
}

double kdv_energy_L_lower_bound(const KdvGrid& grid) { return -27.0 / 256.0 * grid.domain_length(); }

GradientSystem kdv_system(const KdvGrid& grid, double a_L, double a_U) {
    const double bound = kdv_energy_L_lower_bound(grid);
    if (!(a_L + bound > 0.0)) {
        std::ostringstream msg;
        msg << "a_L = " << a_L << " does not exceed -inf E_L = " << -bound;
        throw Error(ErrorKind::DomainError, msg.str());
    }
    if (!(a_U > 0.0)) throw Error(ErrorKind::DomainError, "a_U must be positive for KdV (E_U >= 0)");

    const FourierDiagonalOperator delta = spectral_delta(grid);
    const double dx = grid.dx();

    GradientSystem sys;
    sys.name = "kdv";
    sys.dim = grid.size();
    sys.D = delta;
    sys.D_kind = OperatorKind::SkewAdjoint;
    sys.L = delta.transformed([](Complex s) { return -(s * s); });
    sys.energy_L = [dx](const StateVector& u) {
        double sum = 0.0;
        for (double v : u) sum += v * v * v * v - v * v * v;
        return sum * dx;
    };
    sys.energy_U = [dx](const StateVector& u) {
        double sum = 0.0;
        for (double v : u) sum += v * v * v * v;
        return sum * dx;
    };
    sys.grad_energy_L = [](const StateVector& u) {
        StateVector g(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) g[j] = 4.0 * u[j] * u[j] * u[j] - 3.0 * u[j] * u[j];
        return g;
    };
    sys.grad_energy_U = [](const StateVector& u) {
        StateVector g(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) g[j] = 4.0 * u[j] * u[j] * u[j];
        return g;
    };
    sys.a_L = a_L;
    sys.a_U = a_U;
    sys.inner_weight = dx;
    sys.splitting = kdv_splitting(grid);
    return sys;
}

Splitting kdv_splitting(const KdvGrid& grid) {
    const FourierDiagonalOperator delta = spectral_delta(grid);
    Splitting split{delta.transformed([](Complex s) { return -(s * s * s); }), {}};
    split.nonlinear = [delta](const StateVector& u) {
        StateVector sq(u.size());
        for (std::size_t j = 0; j < u.size(); ++j) sq[j] = -3.0 * u[j] * u[j];
        return delta.apply(sq);
    };
    return split;
}

StateVector kdv_rhs(const KdvGrid& grid, const StateVector& u) {
    const FourierDiagonalOperator delta = spectral_delta(grid);
    StateVector inner = delta.apply(delta.apply(u));
    for (std::size_t j = 0; j < u.size(); ++j) inner[j] = -inner[j] - 3.0 * u[j] * u[j];
    return delta.apply(inner);
}

StateVector cnoidal(const CnoidalParams& params, const KdvGrid& grid, double t) {
    const double c = params.speed();
    const double amplitude = 2.0 * params.kappa * params.kappa * params.k * params.k;
    StateVector u(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double cn = jacobi_cn(params.kappa * (grid.x(j) - c * t), params.k);
        u[j] = params.u0 + amplitude * cn * cn;
    }
    return u;
}

}  // namespace savflow
