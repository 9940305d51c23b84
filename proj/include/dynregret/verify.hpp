#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dynregret/errors.hpp"
#include "dynregret/harness.hpp"
#include "dynregret/learners.hpp"
#include "dynregret/linalg.hpp"
#include "dynregret/minimize.hpp"
#include "dynregret/newton.hpp"
#include "dynregret/numerics.hpp"
#include "dynregret/oracles.hpp"
#include "dynregret/rng.hpp"

namespace dynregret {

struct VerifyReport {
    std::string suite;
    bool passed = true;
    long checked = 0;
    long failures = 0;
    /// Largest observed lhs − rhs (negative means every check had slack).
    double worst_margin = -std::numeric_limits<double>::infinity();
    std::vector<std::string> details;
    std::vector<std::string> counterexamples;
    double seconds = 0.0;

    void record(bool ok, double margin, const std::function<std::string()>& describe) {
        ++checked;
        worst_margin = std::max(worst_margin, margin);
        if (!ok) {
            ++failures;
            passed = false;
            if (counterexamples.size() < 5) counterexamples.push_back(describe());
        }
    }
};

inline constexpr std::string_view kVerifySuites[] = {"contraction", "semi_contraction", "newton", "decrement_bound",
                                                   "gradients",   "bounds",           "lower_bound"};

namespace detail {

inline constexpr std::uint64_t kVerifySeed = 20'240'601;

inline FeasibleSet random_set(SeededRng& rng, int d, int choice) {
    switch (choice % 3) {
    case 0: return FeasibleSet::whole_space(d);
    case 1: return FeasibleSet::ball(rng.uniform(-0.5, 0.5) * Vector::Ones(d), rng.uniform(0.5, 2.0));
    default: {
        Vector lo(d), hi(d);
        for (int i = 0; i < d; ++i) {
            lo[i] = rng.uniform(-2.0, -0.2);
            hi[i] = rng.uniform(0.2, 2.0);
        }
        return FeasibleSet::box(lo, hi);
    }
    }
}

inline std::string vec_str(const Vector& v) {
    std::ostringstream os;
    os << '(';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt(v[i]);
    os << ')';
    return os.str();
}

/// A random quadratic-plus-barrier oracle: the box |x_i| < 1 plus a few
/// random half-spaces that keep the origin strictly inside.
inline SelfConcordantOracle random_selfconcordant(SeededRng& rng) {
    const int d = 1 + static_cast<int>(rng.uniform_index(4));
    const int extra = static_cast<int>(rng.uniform_index(3));
    Matrix normals = Matrix::Zero(2 * d + extra, d);
    Vector offsets = Vector::Ones(2 * d + extra);
    for (int i = 0; i < d; ++i) {
        normals(2 * i, i) = 1.0;
        normals(2 * i + 1, i) = -1.0;
    }
    for (int j = 0; j < extra; ++j) {
        normals.row(2 * d + j) = random_direction(rng, d).transpose();
        offsets[2 * d + j] = rng.uniform(0.5, 2.0);
    }
    const double q = rng.uniform() < 0.2 ? 0.0 : rng.uniform(0.01, 3.0);
    const Matrix a = q * random_spd(rng, d, 0.2, 1.0);
    const Vector b = rng.uniform(0.0, 2.0) * gaussian_sample(rng, d);
    return SelfConcordantOracle(a, b, 0.0, normals, offsets, Vector::Zero(d));
}

inline Vector random_interior(SeededRng& rng, const SelfConcordantOracle& o, double min_slack) {
    for (int attempt = 0; attempt < 10'000; ++attempt) {
        Vector x(o.dim());
        for (int i = 0; i < o.dim(); ++i) x[i] = rng.uniform(-1.0, 1.0);
        if (o.in_domain(x) && o.slacks(x).minCoeff() >= min_slack) return x;
    }
    return Vector::Zero(o.dim());
}

inline double relative_error(const Matrix& fd, const Matrix& exact) {
    return (fd - exact).norm() / std::max(exact.norm(), 1.0);
}

template <typename Fn>
VerifyReport timed(std::string name, Fn&& body) {
    VerifyReport rep;
    rep.suite = std::move(name);
    const auto start = std::chrono::steady_clock::now();
    body(rep);
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace detail

/// One projected gradient step contracts toward x* by √(1 − 2λ/(1/η+λ)).
inline VerifyReport verify_contraction(int instances = 1000) {
    return detail::timed("contraction", [&](VerifyReport& rep) {
        for (int i = 0; i < instances; ++i) {
            SeededRng rng = SeededRng(detail::kVerifySeed).fork(static_cast<std::uint64_t>(i));
            const int d = 1 + static_cast<int>(rng.uniform_index(8));
            const FeasibleSet set = detail::random_set(rng, d, i / 2);
            auto check = [&](const auto& oracle, double lambda, double smooth, const char* family) {
                const double eta = rng.uniform(0.05, 1.0) / smooth;
                const Vector x_star = minimizer(oracle, set);
                const Vector u = set.bounded() ? set.sample(rng) : Vector(x_star + 3.0 * gaussian_sample(rng, d));
                const Vector v = set.project(u - eta * oracle.gradient(u));
                const double gamma = std::sqrt(1.0 - 2.0 * lambda / (1.0 / eta + lambda));
                const double lhs = (v - x_star).norm();
                const double rhs = gamma * (u - x_star).norm() + 1e-9;
                rep.record(lhs <= rhs, lhs - rhs, [&] {
                    return std::string(family) + " instance " + std::to_string(i) + " on " + set.describe() +
                           ": |v-x*| = " + detail::fmt(lhs) + " > " + detail::fmt(rhs);
                });
            };
            if (i % 2 == 0) {
                const double lambda = rng.uniform(0.1, 10.0);
                const double smooth = rng.uniform(lambda, 10.0);
                const Matrix a = random_spd(rng, d, lambda / 2.0, smooth / 2.0);
                check(QuadraticOracle(a, gaussian_sample(rng, d), 0.0), lambda, smooth, "quadratic");
            } else {
                const int m = 1 + static_cast<int>(rng.uniform_index(20));
                const double reg = rng.uniform(0.1, 5.0);
                Matrix z(m, d);
                for (int r = 0; r < m; ++r) z.row(r) = gaussian_sample(rng, d).transpose();
                const double max_norm = z.rowwise().norm().maxCoeff();
                const double room = rng.uniform(0.0, 10.0 - reg);
                if (max_norm > 0) z *= std::sqrt(4.0 * room) / max_norm;
                Vector y(m);
                for (int r = 0; r < m; ++r) y[r] = rng.uniform() < 0.5 ? 1.0 : -1.0;
                const LogisticOracle o(z, y, reg);
                check(o, reg, *o.constants().smoothness, "logistic");
            }
        }
        rep.details.push_back("instances: " + std::to_string(instances));
    });
}

/// Minimizer-set distance contracts by √(1 − β/(1/η+β)) per projected step.
inline VerifyReport verify_semi_contraction(int instances = 500) {
    return detail::timed("semi_contraction", [&](VerifyReport& rep) {
        for (int i = 0; i < instances; ++i) {
            SeededRng rng = SeededRng(detail::kVerifySeed + 1).fork(static_cast<std::uint64_t>(i));
            const int d = 2 + static_cast<int>(rng.uniform_index(5));
            const int r = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(d - 1)));
            const Matrix g = random_spd(rng, r, rng.uniform(0.1, 1.0), rng.uniform(1.0, 5.0));
            const Matrix rot = random_rotation(rng, r);
            Matrix e = Matrix::Zero(r, d);
            e.leftCols(r) = rot;
            Vector p(r);
            for (int k = 0; k < r; ++k) p[k] = rng.uniform(-0.8, 0.8);
            const FeasibleSet set = i % 2 == 0 ? FeasibleSet::whole_space(d)
                                               : FeasibleSet::box(-Vector::Ones(d), Vector::Ones(d));
            SemiStrongOracle o(g, e, e.transpose() * (-2.0 * g * rot * p));
            const BetaCertificate cert = certify_semi_strong(o, set, rng, 500);
            const double beta = cert.beta;
            const double smooth = *o.constants().smoothness;
            const double eta = rng.uniform(0.05, 1.0) / smooth;
            const Vector u = set.bounded() ? set.sample(rng) : Vector(3.0 * gaussian_sample(rng, d));
            const Vector v = set.project(u - eta * o.gradient(u));
            const double du = (u - minimizer_set_project(o, set, u)).norm();
            const double dv = (v - minimizer_set_project(o, set, v)).norm();
            const double gamma = std::sqrt(1.0 - beta / (1.0 / eta + beta));
            const double rhs = gamma * du + 1e-9;
            rep.record(dv <= rhs, dv - rhs, [&] {
                return "instance " + std::to_string(i) + " (d=" + std::to_string(d) + ", rank " + std::to_string(r) +
                       ", beta " + detail::fmt(beta) + "): dist(v) = " + detail::fmt(dv) + " > " + detail::fmt(rhs);
            });
        }
        rep.details.push_back("instances: " + std::to_string(instances));
    });
}

/// After one damped Newton step, λ(v) ≤ 2λ(u)².
inline VerifyReport verify_newton(int instances = 500) {
    return detail::timed("newton", [&](VerifyReport& rep) {
        for (int i = 0; i < instances; ++i) {
            SeededRng rng = SeededRng(detail::kVerifySeed + 2).fork(static_cast<std::uint64_t>(i));
            const SelfConcordantOracle o = detail::random_selfconcordant(rng);
            const Vector u = detail::random_interior(rng, o, 1e-3);
            const NewtonStep step = damped_newton_step(o, u);
            const double lv = newton_decrement(o, step.next);
            const double rhs = 2.0 * step.decrement * step.decrement + 1e-8;
            rep.record(lv <= rhs, lv - rhs, [&] {
                return "instance " + std::to_string(i) + " at " + detail::vec_str(u) + ": lambda(v) = " +
                       detail::fmt(lv) + " > " + detail::fmt(rhs);
            });
        }
        rep.details.push_back("instances: " + std::to_string(instances));
    });
}

/// For r = ‖u − x*‖_{x*} < 0.45: λ(u) ≤ r/(1 − 2r), and the Hessian at u is
/// sandwiched between (1−r)²∇²f(x*) and ∇²f(x*)/(1−r)².
inline VerifyReport verify_decrement_bound(int instances = 500) {
    return detail::timed("decrement_bound", [&](VerifyReport& rep) {
        long sandwich_checked = 0;
        for (int i = 0; i < instances; ++i) {
            SeededRng rng = SeededRng(detail::kVerifySeed + 3).fork(static_cast<std::uint64_t>(i));
            const SelfConcordantOracle o = detail::random_selfconcordant(rng);
            const Vector x_star = minimizer(o);
            const Matrix h_star = o.hessian(x_star);
            const Eigen::SelfAdjointEigenSolver<Matrix> es(h_star);
            const Matrix inv_sqrt = es.operatorInverseSqrt();
            const double r = rng.uniform(0.0, 0.45);
            const Vector u = x_star + r * inv_sqrt * random_direction(rng, o.dim());
            const double r_actual = std::sqrt((u - x_star).dot(h_star * (u - x_star)));
            const double lu = newton_decrement(o, u);
            const double rhs = r_actual / (1.0 - 2.0 * r_actual) + 1e-8;
            rep.record(lu <= rhs, lu - rhs, [&] {
                return "instance " + std::to_string(i) + " r = " + detail::fmt(r_actual) + ": lambda(u) = " +
                       detail::fmt(lu) + " > " + detail::fmt(rhs);
            });
            const Matrix h_u = o.hessian(u);
            const double upper = max_generalized_eig(h_u, h_star);
            const double lower = min_generalized_eig(h_u, h_star);
            const double s = (1.0 - r_actual) * (1.0 - r_actual);
            ++sandwich_checked;
            const bool ok = lower >= s - 1e-8 && upper <= 1.0 / s + 1e-8;
            rep.record(ok, std::max(s - lower, upper - 1.0 / s), [&] {
                return "instance " + std::to_string(i) + " Dikin sandwich: eigs [" + detail::fmt(lower) + ", " +
                       detail::fmt(upper) + "] vs [" + detail::fmt(s) + ", " + detail::fmt(1.0 / s) + "]";
            });
        }
        rep.details.push_back("instances: " + std::to_string(instances));
        rep.details.push_back("sandwich checks: " + std::to_string(sandwich_checked));
    });
}

/// Analytic gradients and Hessians against central differences; relative
/// error ‖fd − exact‖/max(‖exact‖, 1) ≤ 1e-5.
inline VerifyReport verify_gradients(int points = 100) {
    return detail::timed("gradients", [&](VerifyReport& rep) {
        double worst[4] = {0, 0, 0, 0};
        const char* names[4] = {"quadratic", "logistic", "semi_strong", "self_concordant"};
        auto check = [&](int family, int i, const auto& o, const Vector& x, bool with_hessian) {
            auto f = [&](const Vector& p) { return o.value(p); };
            double err = detail::relative_error(finite_diff_gradient(f, x), o.gradient(x));
            if (with_hessian) {
                if constexpr (HessianOracle<std::decay_t<decltype(o)>>)
                    err = std::max(err, detail::relative_error(finite_diff_hessian(f, x), o.hessian(x)));
            }
            worst[family] = std::max(worst[family], err);
            rep.record(err <= 1e-5, err - 1e-5, [&] {
                return std::string(names[family]) + " point " + std::to_string(i) + " at " + detail::vec_str(x) +
                       ": relative error " + detail::fmt(err);
            });
        };
        for (int i = 0; i < points; ++i) {
            SeededRng rng = SeededRng(detail::kVerifySeed + 4).fork(static_cast<std::uint64_t>(i));
            const int d = 1 + static_cast<int>(rng.uniform_index(6));
            {
                const QuadraticOracle o(random_spd(rng, d, 0.1, 3.0), gaussian_sample(rng, d), rng.normal());
                check(0, i, o, gaussian_sample(rng, d), true);
            }
            {
                const int m = 1 + static_cast<int>(rng.uniform_index(10));
                Matrix z(m, d);
                for (int r = 0; r < m; ++r) z.row(r) = gaussian_sample(rng, d).transpose();
                Vector y(m);
                for (int r = 0; r < m; ++r) y[r] = rng.uniform() < 0.5 ? 1.0 : -1.0;
                const LogisticOracle o(z, y, rng.uniform(0.01, 1.0));
                check(1, i, o, gaussian_sample(rng, d), true);
            }
            {
                const int dd = std::max(2, d);
                const int r = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(dd - 1)));
                Matrix e = Matrix::Zero(r, dd);
                for (int k = 0; k < r; ++k) e.row(k) = gaussian_sample(rng, dd).transpose();
                const Matrix g = random_spd(rng, r, 0.2, 2.0);
                const SemiStrongOracle o(g, e, e.transpose() * gaussian_sample(rng, r));
                check(2, i, o, gaussian_sample(rng, dd), true);
            }
            {
                const SelfConcordantOracle o = detail::random_selfconcordant(rng);
                check(3, i, o, detail::random_interior(rng, o, 0.1), true);
            }
        }
        for (int k = 0; k < 4; ++k) rep.details.push_back(std::string(names[k]) + " max relative error: " + detail::fmt(worst[k]));
    });
}

namespace detail {

inline ExperimentConfig bounds_config(const std::string& text, std::uint64_t seed) {
    ExperimentConfig cfg = parse_config(text);
    apply_override(cfg, "experiment.seed", std::to_string(seed));
    return cfg;
}

inline const std::vector<std::pair<std::string, std::string>>& bound_cases() {
    static const std::vector<std::pair<std::string, std::string>> cases = {
        {"omgd drifting quadratic tau=0.3",
         "[experiment]\nseed=1\n[scenario]\nkind=drifting_quadratic\nT=1000\nd=5\ntau=0.3\nset=ball\nradius=2\n"
         "[learner]\nvariant=omgd\neta=auto\nK=auto\n"},
        {"omgd drifting quadratic tau=0.5",
         "[experiment]\nseed=1\n[scenario]\nkind=drifting_quadratic\nT=1000\nd=5\ntau=0.5\nset=ball\nradius=2\n"
         "[learner]\nvariant=omgd\neta=auto\nK=auto\n"},
        {"omgd drifting quadratic tau=0.8",
         "[experiment]\nseed=1\n[scenario]\nkind=drifting_quadratic\nT=1000\nd=5\ntau=0.8\nset=ball\nradius=2\n"
         "[learner]\nvariant=omgd\neta=auto\nK=auto\n"},
        {"ogd semi-strong drift",
         "[experiment]\nseed=1\n[scenario]\nkind=semistrong_drift\nT=500\nd=3\nrank=1\ntau=0.5\n"
         "[learner]\nvariant=ogd\neta=auto\n"},
        {"omgd semi-strong drift",
         "[experiment]\nseed=1\n[scenario]\nkind=semistrong_drift\nT=500\nd=3\nrank=2\ntau=0.5\n"
         "[learner]\nvariant=omgd\neta=auto\nK=auto\n"},
        {"omnu self-concordant drift",
         "[experiment]\nseed=1\n[scenario]\nkind=selfconcordant_drift\nT=300\nd=3\ntau=1\nvary_curvature=true\n"
         "[learner]\nvariant=omnu\nK=auto\nwarmstart=true\n"},
    };
    return cases;
}

} // namespace detail

/// Runs the bound experiments and checks every evaluated bound.
inline VerifyReport verify_bounds(int seeds = 1) {
    return detail::timed("bounds", [&](VerifyReport& rep) {
        for (int s = 0; s < seeds; ++s) {
            for (const auto& [name, text] : detail::bound_cases()) {
                const RunResult res = run(detail::bounds_config(text, static_cast<std::uint64_t>(s + 1)));
                const BoundReport& b = res.bounds;
                const std::optional<double> tight = b.tightest();
                const bool ok = tight.has_value() && b.all_satisfied() && b.note.empty();
                rep.record(ok, tight ? b.regret - *tight : 0.0, [&] {
                    return name + " seed " + std::to_string(s + 1) + ": regret " + detail::fmt(b.regret) +
                           ", tightest bound " + detail::fmt(tight) + (b.note.empty() ? "" : " (" + b.note + ")");
                });
                rep.details.push_back(name + " seed " + std::to_string(s + 1) + ": regret " + detail::fmt(b.regret) +
                                      " <= " + detail::fmt(tight));
            }
        }
    });
}

struct LowerBoundStats {
    double mean_regret = 0.0;
    double mean_squared_path = 0.0;
    double regret_target = 0.0;
    double squared_path_expectation = 0.0;
};

/// Averages regret and S* of OGD against the Gaussian adversary over seeds.
inline LowerBoundStats lower_bound_stats(int seeds = 50, int T = 200, int d = 3, double tau = 0.1) {
    LowerBoundStats st;
    for (int s = 1; s <= seeds; ++s) {
        ExperimentConfig cfg = parse_config("[experiment]\nseed=1\nx1=0\n[scenario]\nkind=lowerbound_adversary\n"
                                            "[learner]\nvariant=ogd\neta=auto\n");
        apply_override(cfg, "experiment.seed", std::to_string(s));
        apply_override(cfg, "scenario.T", std::to_string(T));
        apply_override(cfg, "scenario.d", std::to_string(d));
        apply_override(cfg, "scenario.tau", detail::fmt(tau));
        const RunResult res = run(cfg);
        st.mean_regret += res.bounds.regret / seeds;
        st.mean_squared_path += res.regularity.S_star / seeds;
    }
    st.regret_target = 0.9 * 2.0 * d * T * tau * tau;
    st.squared_path_expectation = 2.0 * d * (T - 1) * tau * tau;
    return st;
}

inline VerifyReport verify_lower_bound(int seeds = 50) {
    return detail::timed("lower_bound", [&](VerifyReport& rep) {
        const LowerBoundStats st = lower_bound_stats(seeds);
        rep.record(st.mean_regret >= st.regret_target, st.regret_target - st.mean_regret, [&] {
            return "mean regret " + detail::fmt(st.mean_regret) + " < " + detail::fmt(st.regret_target);
        });
        const double rel = std::abs(st.mean_squared_path - st.squared_path_expectation) / st.squared_path_expectation;
        rep.record(rel <= 0.1, rel - 0.1, [&] {
            return "mean S* " + detail::fmt(st.mean_squared_path) + " is " + detail::fmt(rel) +
                   " away from " + detail::fmt(st.squared_path_expectation);
        });
        rep.details.push_back("mean regret: " + detail::fmt(st.mean_regret) + " (target >= " + detail::fmt(st.regret_target) + ")");
        rep.details.push_back("mean S*: " + detail::fmt(st.mean_squared_path) + " (expected " +
                              detail::fmt(st.squared_path_expectation) + ")");
    });
}

/// Dispatches by suite name; `count` overrides the suite's default size.
inline VerifyReport verify(std::string_view suite, std::optional<int> count = std::nullopt) {
    if (suite == "contraction") return verify_contraction(count.value_or(1000));
    if (suite == "semi_contraction") return verify_semi_contraction(count.value_or(500));
    if (suite == "newton") return verify_newton(count.value_or(500));
    if (suite == "decrement_bound") return verify_decrement_bound(count.value_or(500));
    if (suite == "gradients") return verify_gradients(count.value_or(100));
    if (suite == "bounds") return verify_bounds(count.value_or(1));
    if (suite == "lower_bound") return verify_lower_bound(count.value_or(50));
    throw Error(ErrorKind::ConfigError, "unknown verify suite '" + std::string(suite) + "'");
}

inline std::string format_report(const VerifyReport& rep) {
    std::ostringstream os;
    os << rep.suite << ": " << (rep.passed ? "PASS" : "FAIL") << " (" << rep.checked << " checks, " << rep.failures
       << " failures, worst margin " << detail::fmt(rep.worst_margin) << ", " << detail::fmt(rep.seconds) << " s)\n";
    for (const std::string& d : rep.details) os << "  " << d << '\n';
    for (const std::string& c : rep.counterexamples) os << "  counterexample: " << c << '\n';
    return os.str();
}

} // namespace dynregret
