#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dynregret/errors.hpp"
#include "dynregret/feasible_set.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/newton.hpp"
#include "dynregret/oracles.hpp"

namespace dynregret {

enum class LearnerVariant { OGD, OMGD, OMNU };

constexpr std::string_view to_string(LearnerVariant v) {
    switch (v) {
    case LearnerVariant::OGD: return "ogd";
    case LearnerVariant::OMGD: return "omgd";
    case LearnerVariant::OMNU: return "omnu";
    }
    return "unknown";
}

struct LearnerConfig {
    LearnerVariant variant = LearnerVariant::OMGD;
    double eta = 1.0;
    int inner_iterations = 1; // K
    /// Round-1 decrement target for OMNU; derived from μ when left at 0.
    double warmstart_threshold = 0.0;
};

struct LearnerState {
    LearnerConfig config;
    Vector x;     // x_t, the point submitted in the current round
    int round = 1;
    /// OMGD: ‖z^{j+1} − z^j‖ per inner step. OMNU: λ(z^j) for j = 1..K+1.
    std::vector<double> inner_trace;

    LearnerState(LearnerConfig cfg, Vector x1) : config(cfg), x(std::move(x1)) {
        require(config.eta > 0 && std::isfinite(config.eta), ErrorKind::InvalidArgument, "eta must be > 0");
        require(config.inner_iterations >= 1, ErrorKind::InvalidArgument, "K must be >= 1");
        require(x.allFinite(), ErrorKind::InvalidArgument, "initial iterate must be finite");
    }
};

/// x_{t+1} = Π_X(x_t − η∇f_t(x_t)).
template <FunctionOracle O>
Vector ogd_round(LearnerState& state, const O& oracle, const FeasibleSet& set) {
    Vector next = set.project(state.x - state.config.eta * oracle.gradient(state.x));
    state.inner_trace = {(next - state.x).norm()};
    state.x = next;
    ++state.round;
    return next;
}

/// K projected gradient steps on f_t from z¹ = x_t; returns z^{K+1}.
template <FunctionOracle O>
Vector omgd_round(LearnerState& state, const O& oracle, const FeasibleSet& set) {
    const double eta = state.config.eta;
    Vector z = state.x;
    state.inner_trace.clear();
    for (int j = 0; j < state.config.inner_iterations; ++j) {
        Vector next = set.project(z - eta * oracle.gradient(z));
        state.inner_trace.push_back((next - z).norm());
        z = std::move(next);
    }
    state.x = z;
    ++state.round;
    return z;
}

/// K damped Newton steps on f_t from z¹ = x_t. The submitted point must
/// already lie in the domain of f_t; otherwise DomainViolation.
template <HessianOracle O>
Vector omnu_round(LearnerState& state, const O& oracle) {
    if constexpr (requires { oracle.in_domain(state.x); }) {
        if (!oracle.in_domain(state.x))
            throw Error(ErrorKind::DomainViolation,
                        "round " + std::to_string(state.round) + ": iterate outside the barrier domain");
    }
    Vector z = state.x;
    state.inner_trace.clear();
    for (int j = 0; j < state.config.inner_iterations; ++j) {
        NewtonStep step = damped_newton_step(oracle, z);
        state.inner_trace.push_back(step.decrement);
        z = std::move(step.next);
    }
    state.inner_trace.push_back(newton_decrement(oracle, z));
    state.x = z;
    ++state.round;
    return z;
}

// --- iteration counts --------------------------------------------------------

namespace detail {
/// ⌈x⌉ that absorbs a few ulps of round-off above an integer.
inline int robust_ceil(double x) {
    const double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return static_cast<int>(r);
    return static_cast<int>(std::ceil(x));
}
} // namespace detail

/// K = ⌈(1/η + λ)/(2λ) · ln 4⌉, so that (1 − 2λ/(1/η+λ))^K ≤ 1/4.
inline int k_strongly(double eta, double lambda) {
    require(eta > 0 && lambda > 0, ErrorKind::InvalidArgument, "k_strongly needs eta, lambda > 0");
    return std::max(1, detail::robust_ceil((1.0 / eta + lambda) / (2.0 * lambda) * std::numbers::ln2 * 2.0));
}

/// K = ⌈(1/η + β)/β · ln 4⌉, so that (1 − β/(1/η+β))^K ≤ 1/4.
inline int k_semistrong(double eta, double beta) {
    require(eta > 0 && beta > 0, ErrorKind::InvalidArgument, "k_semistrong needs eta, beta > 0");
    return std::max(1, detail::robust_ceil((1.0 / eta + beta) / beta * std::numbers::ln2 * 2.0));
}

/// K = ⌈log₄(16μ)⌉ (μ clamped to ≥ 1), the smallest K with 8μ/4^K ≤ 1/2.
inline int k_selfconcordant(double mu) {
    require(std::isfinite(mu) && mu > 0, ErrorKind::InvalidArgument, "mu must be positive and finite");
    const double target = 16.0 * std::max(1.0, mu);
    int k = 0;
    double power = 1.0;
    while (power < target) {
        power *= 4.0;
        ++k;
    }
    return k;
}

// --- OMNU warm start -----------------------------------------------------------

/// Largest decrement λ̄ with λ̄/(1 − λ̄) ≤ 1/(12√μ). Together with
/// ‖x − x*‖_{x*} ≤ λ(x)/(1 − λ(x)) it certifies ‖x − x*‖²_{x*} ≤ 1/(144μ).
inline double warmstart_decrement_target(double mu) {
    const double r = 1.0 / (12.0 * std::sqrt(std::max(1.0, mu)));
    return r / (1.0 + r);
}

struct WarmStart {
    Vector point;
    int iterations = 0;
    double final_decrement = 0.0;
    double threshold = 0.0;
};

/// Damped Newton on f₁ until the decrement certificate above holds; capped
/// at 10⁴ iterations. A positive `threshold` overrides the μ-derived one.
template <HessianOracle O>
WarmStart omnu_warmstart(const O& oracle, const Vector& x1, double mu, double threshold = 0.0) {
    WarmStart ws;
    ws.threshold = threshold > 0 ? threshold : warmstart_decrement_target(mu);
    Vector z = x1;
    if constexpr (requires { oracle.in_domain(z); }) {
        require(oracle.in_domain(z), ErrorKind::DomainViolation, "warm start point outside the barrier domain");
    }
    for (int it = 0; it <= 10'000; ++it) {
        const double dec = newton_decrement(oracle, z);
        if (dec <= ws.threshold) {
            ws.point = z;
            ws.iterations = it;
            ws.final_decrement = dec;
            return ws;
        }
        if (it == 10'000) break;
        z = damped_newton_step(oracle, z).next;
    }
    throw Error(ErrorKind::NoConvergence, "OMNU warm start hit the 10^4 iteration cap");
}

} // namespace dynregret
