#include "savflow/kepler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "savflow/errors.hpp"

namespace savflow {

namespace {

double radius(const StateVector& w) {
    const double r = std::hypot(w[0], w[1]);
    if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "Kepler state at the origin (r = 0)");
    return r;
}

GradientSystem kepler_with_structure(DenseMatrix d, OperatorKind kind, double a_L, double a_U, std::string name) {
    if (!(a_L > 0.0) || !(a_U > 0.0)) {
        throw Error(ErrorKind::DomainError, "Kepler shifts a_L and a_U must be positive");
    }
    DenseMatrix l(4, 4);
    l(2, 2) = 1.0;
    l(3, 3) = 1.0;

    GradientSystem sys;
    sys.name = std::move(name);
    sys.dim = 4;
    sys.D = DenseOperator(std::move(d));
    sys.D_kind = kind;
    sys.L = DenseOperator(std::move(l));
    sys.energy_L = [](const StateVector&) { return 0.0; };
    sys.energy_U = [](const StateVector& w) { return 1.0 / radius(w); };
    sys.grad_energy_L = [](const StateVector&) { return StateVector(4, 0.0); };
    sys.grad_energy_U = [](const StateVector& w) {
        const double r = radius(w);
        const double r3 = r * r * r;
        return StateVector{-w[0] / r3, -w[1] / r3, 0.0, 0.0};
    };
    sys.a_L = a_L;
    sys.a_U = a_U;
    sys.inner_weight = 1.0;
    return sys;
}

}  // namespace

KeplerState KeplerState::unpack(const StateVector& w) {
    if (w.size() != 4) throw Error(ErrorKind::DimensionMismatch, "Kepler state must have 4 entries");
    return {w[0], w[1], w[2], w[3]};
}

KeplerState kepler_initial_state() { return {0.2, 0.0, 0.0, 3.0}; }

GradientSystem kepler_system(double a_L, double a_U) {
    DenseMatrix d(4, 4);
    d(0, 2) = 1.0;
    d(1, 3) = 1.0;
    d(2, 0) = -1.0;
    d(3, 1) = -1.0;
    return kepler_with_structure(std::move(d), OperatorKind::SkewAdjoint, a_L, a_U, "kepler");
}

GradientSystem kepler_dissipative_system(double a_L, double a_U) {
    DenseMatrix d(4, 4);
    for (std::size_t i = 0; i < 4; ++i) d(i, i) = -1.0;
    return kepler_with_structure(std::move(d), OperatorKind::NegativeSemidefinite, a_L, a_U, "kepler-dissipative");
}

StateVector kepler_rhs(const StateVector& w) {
    const double r = radius(w);
    const double r3 = r * r * r;
    return {w[2], w[3], -w[0] / r3, -w[1] / r3};
}

KeplerState kepler_reference(double t) {
    if (!std::isfinite(t)) throw Error(ErrorKind::DomainError, "reference time must be finite");
    static std::mutex mutex;
    static std::map<double, KeplerState> cache;
    {
        const std::lock_guard lock(mutex);
        if (auto it = cache.find(t); it != cache.end()) return it->second;
    }

    StateVector w = kepler_initial_state().pack();
    const double max_step = 1e-6 * kKeplerPeriod;
    const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / max_step)));
    const double h = t / static_cast<double>(steps);
    for (long n = 0; n < steps && h != 0.0; ++n) {
        const StateVector k1 = kepler_rhs(w);
        StateVector tmp = w;
        axpy(0.5 * h, k1, tmp);
        const StateVector k2 = kepler_rhs(tmp);
        tmp = w;
        axpy(0.5 * h, k2, tmp);
        const StateVector k3 = kepler_rhs(tmp);
        tmp = w;
        axpy(h, k3, tmp);
        const StateVector k4 = kepler_rhs(tmp);
        for (std::size_t i = 0; i < 4; ++i) w[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    const KeplerState result = KeplerState::unpack(w);
    const std::lock_guard lock(mutex);
    cache.emplace(t, result);
    return result;
}

}  // namespace savflow
