#pragma once

#include <cmath>

#include "dynregret/errors.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/oracles.hpp"

namespace dynregret {

/// λ(z) = √(∇f(z)ᵀ [∇²f(z)]⁻¹ ∇f(z)).
template <HessianOracle O>
double newton_decrement(const O& oracle, const Vector& z) {
    const Vector g = oracle.gradient(z);
    const Vector step = cholesky_solve(oracle.hessian(z), g);
    return std::sqrt(std::max(0.0, g.dot(step)));
}

struct NewtonStep {
    Vector next;
    double decrement; // λ at the starting point
};

/// z' = z − [∇²f(z)]⁻¹∇f(z) / (1 + λ(z)).
template <HessianOracle O>
NewtonStep damped_newton_step(const O& oracle, const Vector& z) {
    const Vector g = oracle.gradient(z);
    const Vector direction = cholesky_solve(oracle.hessian(z), g);
    const double decrement = std::sqrt(std::max(0.0, g.dot(direction)));
    Vector next = z - direction / (1.0 + decrement);
    if constexpr (requires { oracle.in_domain(next); }) {
        if (!oracle.in_domain(next))
            throw Error(ErrorKind::DomainViolation, "damped Newton step left the barrier domain");
    }
    return {std::move(next), decrement};
}

} // namespace dynregret
