#include "savflow/gradient_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "savflow/errors.hpp"

namespace savflow {

namespace {

const char* part_name(EnergyPart which) { return which == EnergyPart::Lower ? "E_L" : "E_U"; }

void require_dim(const GradientSystem& sys, std::size_t n, const char* what) {
    if (n != sys.dim) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": state has dimension " + std::to_string(n) +
                                                      ", system expects " + std::to_string(sys.dim));
    }
}

double radicand(const GradientSystem& sys, const StateVector& u, EnergyPart which) {
    require_dim(sys, u.size(), "radicand");
    const double value = which == EnergyPart::Lower ? sys.energy_L(u) + sys.a_L : sys.energy_U(u) + sys.a_U;
    if (!(value > kRadicandFloor)) {
        std::ostringstream msg;
        msg << part_name(which) << "(u) + a = " << value << " is not positive; increase "
            << (which == EnergyPart::Lower ? "a_L" : "a_U");
        throw Error(ErrorKind::DomainError, msg.str());
    }
    return value;
}

}  // namespace

StateVector GradientSystem::grad_energy(const StateVector& u) const {
    StateVector g = apply_L(u);
    axpy(1.0, grad_energy_L(u), g);
    axpy(-1.0, grad_energy_U(u), g);
    return g;
}

StateVector GradientSystem::vector_field(const StateVector& u) const { return apply_D(grad_energy(u)); }

double auxiliary_variable(const GradientSystem& sys, const StateVector& u, EnergyPart which) {
    return std::sqrt(radicand(sys, u, which));
}

AugmentedState init_augmented(const GradientSystem& sys, const StateVector& u0) {
    return {u0, auxiliary_variable(sys, u0, EnergyPart::Lower), auxiliary_variable(sys, u0, EnergyPart::Upper)};
}

StateVector phi(const GradientSystem& sys, const StateVector& u, EnergyPart which) {
    const double r = std::sqrt(radicand(sys, u, which));
    StateVector g = which == EnergyPart::Lower ? sys.grad_energy_L(u) : sys.grad_energy_U(u);
    const double s = 0.5 / r;
    for (double& v : g) v *= s;
    return g;
}

double modified_energy(const GradientSystem& sys, const AugmentedState& z) {
    require_dim(sys, z.u.size(), "modified_energy");
    return 0.5 * sys.inner(z.u, sys.apply_L(z.u)) + z.r_L * z.r_L - z.r_U * z.r_U;
}

double original_energy(const GradientSystem& sys, const StateVector& u) {
    require_dim(sys, u.size(), "original_energy");
    return 0.5 * sys.inner(u, sys.apply_L(u)) + sys.energy_L(u) - sys.energy_U(u);
}

AugmentedState modified_energy_gradient(const GradientSystem& sys, const AugmentedState& z) {
    return {sys.apply_L(z.u), 2.0 * z.r_L, -2.0 * z.r_U};
}

double augmented_inner(const GradientSystem& sys, const AugmentedState& a, const AugmentedState& b) {
    return sys.inner(a.u, b.u) + a.r_L * b.r_L + a.r_U * b.r_U;
}

AugmentedOperator::AugmentedOperator(const GradientSystem& sys, const StateVector& u_bar)
    : AugmentedOperator(sys, phi(sys, u_bar, EnergyPart::Lower), phi(sys, u_bar, EnergyPart::Upper)) {}

AugmentedOperator::AugmentedOperator(const GradientSystem& sys, StateVector phi_L, StateVector phi_U)
    : sys_(&sys), phi_L_(std::move(phi_L)), phi_U_(std::move(phi_U)) {}

AugmentedState AugmentedOperator::apply(const AugmentedState& w) const {
    StateVector g = w.u;
    axpy(w.r_L, phi_L_, g);
    axpy(w.r_U, phi_U_, g);
    StateVector du = sys_->apply_D(g);
    const double dr_L = sys_->inner(phi_L_, du);
    const double dr_U = sys_->inner(phi_U_, du);
    return {std::move(du), dr_L, dr_U};
}

AugmentedState augmented_rhs(const GradientSystem& sys, const AugmentedState& z, const StateVector& u_bar) {
    return AugmentedOperator(sys, u_bar).apply(modified_energy_gradient(sys, z));
}

AugmentedState operator+(const AugmentedState& a, const AugmentedState& b) {
    return {add(a.u, b.u), a.r_L + b.r_L, a.r_U + b.r_U};
}

AugmentedState operator-(const AugmentedState& a, const AugmentedState& b) {
    return {subtract(a.u, b.u), a.r_L - b.r_L, a.r_U - b.r_U};
}

AugmentedState operator*(double s, const AugmentedState& a) { return {scaled(s, a.u), s * a.r_L, s * a.r_U}; }

StateVector flatten(const AugmentedState& z) {
    StateVector v(z.u);
    v.push_back(z.r_L);
    v.push_back(z.r_U);
    return v;
}

AugmentedState unflatten(std::span<const double> v, std::size_t n) {
    if (v.size() != n + 2) {
        throw Error(ErrorKind::DimensionMismatch, "unflatten: expected " + std::to_string(n + 2) + " entries");
    }
    return {StateVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)), v[n], v[n + 1]};
}

double max_abs(const AugmentedState& z) {
    return std::max({max_abs(std::span<const double>(z.u)), std::abs(z.r_L), std::abs(z.r_U)});
}

}  // namespace savflow
