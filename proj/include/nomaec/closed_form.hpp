#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "nomaec/errors.hpp"
#include "nomaec/rate_model.hpp"
#include "nomaec/specfun.hpp"

namespace nomaec {

/// Two-user (K=2) parameter set: user 1 is the weak user (smaller ordered
/// gain), user 2 the strong user.
struct TwoUserParams {
    double p1 = 0.0;
    double p2 = 0.0;
    double rho = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

inline void validate(const TwoUserParams& p) {
    if (!(p.p1 > 0.0) || !(p.p2 > 0.0)) throw config_error("powers must be positive");
    if (!(p.rho > 0.0)) throw config_error("rho must be positive");
    if (!(p.beta1 < 0.0) || !(p.beta2 < 0.0)) throw config_error("betas must be negative");
}

inline TwoUserParams two_user_params(const NetworkConfig& cfg) {
    if (cfg.k_users != 2) throw config_error("two_user_params requires K = 2");
    return TwoUserParams{cfg.powers[0], cfg.powers[1], cfg.rho, cfg.betas[0], cfg.betas[1]};
}

enum class Strategy { oma, noma, noma_r };

/// The two NOMA-R EC models: TimeShare mixes the NOMA/OMA rates in the
/// exponent with deterministic weights tau and 1-tau; EventSelection applies
/// the per-realization cluster selection. They are distinct random variables
/// and both are reported (closed forms follow TimeShare, the per-user
/// ordering theorem follows EventSelection).
enum class NomarVariant { time_share, event_selection };

struct StrategyModel {
    Strategy strategy = Strategy::oma;
    std::optional<NomarVariant> variant;  // present iff strategy == noma_r
};

inline void validate(const StrategyModel& m) {
    if ((m.strategy == Strategy::noma_r) != m.variant.has_value())
        throw config_error("nomar_variant must be given exactly when strategy is NOMA-R");
}

namespace detail {

// The EC definition is 0/0 at beta = 0; below this threshold callers are
// redirected to the ergodic-rate limit instead of dividing by beta.
inline constexpr double kMinAbsBeta = 1e-6;

inline void require_usable_beta(double beta) {
    if (!(beta < 0.0)) throw std::domain_error("beta must be strictly negative");
    if (-beta < kMinAbsBeta)
        throw std::domain_error(
            "|beta| < 1e-6 is a degenerate QoS exponent; the EC tends to the ergodic "
            "rate there - use ergodic_rate_k2 instead");
}

}  // namespace detail

/// Probability tau(rho) that NOMA-R selects NOMA at K=2:
///   tau = f + g,
///   f   = 1 - exp(-(P2 + sqrt(P2^2+4P1^2)) / (rho P1^2)),
///   g   = sqrt(pi) e^A erfc(B) sqrt(P2/rho) / P1,
///   A   = (4P1^2+P2^2)/(4 rho P2 P1^2),
///   B   = (2P2 + sqrt(P2^2+4P1^2)) / (2 sqrt(P2 rho) P1).
/// g is assembled in log space: at small rho the exponential factor overflows
/// while erfc underflows, but their product is well scaled.
inline double tau_closed_form(const TwoUserParams& p) {
    validate(p);
    const double disc = std::sqrt(p.p2 * p.p2 + 4.0 * p.p1 * p.p1);
    const double f = -std::expm1(-(p.p2 + disc) / (p.rho * p.p1 * p.p1));
    const double a = (4.0 * p.p1 * p.p1 + p.p2 * p.p2) / (4.0 * p.rho * p.p2 * p.p1 * p.p1);
    const double b = (2.0 * p.p2 + disc) / (2.0 * std::sqrt(p.p2 * p.rho) * p.p1);
    const double log_g = std::log(detail::kSqrtPi) + a + log_erfc(b) +
                         0.5 * std::log(p.p2 / p.rho) - std::log(p.p1);
    const double g = std::exp(log_g);
    const double tau = f + g;
    if (!(tau > -1e-9 && tau < 1.0 + 1e-9))
        throw convergence_error("tau_closed_form left [0,1]: " + std::to_string(tau));
    return std::min(1.0, std::max(0.0, tau));
}

/// Weak-user NOMA-R effective capacity (TimeShare closed form):
///   (1/beta1) log2( (2/(rho P1)) U(1, 2 + beta1(tau+1)/2, 2/(rho P1)) ).
inline double ec_nomar_weak_closed(const TwoUserParams& p, const QuadratureSpec& q = {}) {
    validate(p);
    detail::require_usable_beta(p.beta1);
    const double tau = tau_closed_form(p);
    const double c = p.beta1 * (tau + 1.0) * 0.5;
    const double z = 2.0 / (p.rho * p.p1);
    const double mean = z * hyper_u_a1(2.0 + c, z, q);
    return std::log(mean) * kInvLn2 / p.beta1;
}

/// Strong-user NOMA-R effective capacity under TimeShare, by nested
/// quadrature of
///   E[(1 + rho P2 x2/(1 + rho P1 x1))^(beta2 tau) (1 + rho P2 x2)^(beta2(1-tau)/2)]
/// against the joint pdf 2 e^{-x1-x2} on x2 >= x1 (inner variable u = x2-x1
/// keeps the support rectangular).
inline double ec_nomar_strong_timeshare(const TwoUserParams& p, const QuadratureSpec& q = {}) {
    validate(p);
    detail::require_usable_beta(p.beta2);
    const double tau = tau_closed_form(p);
    QuadratureSpec inner_q = q;
    inner_q.rel_tol = std::max(q.rel_tol * 0.1, 1e-13);
    inner_q.abs_tol = std::max(q.abs_tol * 0.1, 1e-15);
    const double e_noma = p.beta2 * tau;
    const double e_oma = p.beta2 * (1.0 - tau) * 0.5;
    auto outer = [&](double x1) {
        const double base = 1.0 + p.rho * p.p1 * x1;
        auto g = [&](double u) {
            const double x2 = x1 + u;
            const double y2 = p.rho * p.p2 * x2;
            return std::exp(e_noma * std::log1p(y2 / base) + e_oma * std::log1p(y2) - u);
        };
        return 2.0 * std::exp(-2.0 * x1) * integrate_semi_infinite(g, inner_q);
    };
    const double mean = integrate_semi_infinite(outer, q);
    return std::log(mean) * kInvLn2 / p.beta2;
}

/// Factor m(beta) = Gamma(beta/2 + 1) (2 - 2^{-beta/2}) of the high-SNR
/// asymptote, equal to the Mellin moment E[x2^{beta/2}] of the strong-user
/// gain. The printed product is 0 * inf at beta = -2; rewriting with
/// Gamma(s+1)/s and expm1 (s = beta/2 + 1) evaluates the removable
/// singularity stably, limit value 2 ln 2.
inline double highsnr_moment_factor(double beta2) {
    if (!(beta2 > -4.0) || !(beta2 < 0.0))
        throw std::domain_error(
            "highsnr_moment_factor: moment E[x2^(beta/2)] exists only for beta2 in (-4,0)");
    const double s = 0.5 * beta2 + 1.0;
    const double q = (s == 0.0) ? kLn2 : -std::expm1(-s * kLn2) / s;
    return 2.0 * gamma_fn(s + 1.0) * q;
}

/// High-SNR asymptote of the strong-user NOMA-R EC (it converges to OMA):
///   (1/beta2) log2( m(beta2) (rho P2)^{beta2/2} ), assembled in log space.
inline double ec_nomar_strong_highsnr(const TwoUserParams& p) {
    validate(p);
    detail::require_usable_beta(p.beta2);
    if (!(p.beta2 > -4.0))
        throw std::domain_error(
            "ec_nomar_strong_highsnr: divergent moment, requires beta2 > -4");
    const double m = highsnr_moment_factor(p.beta2);
    const double log2_mean = std::log(m) * kInvLn2 + 0.5 * p.beta2 * std::log2(p.rho * p.p2);
    return log2_mean / p.beta2;
}

/// Semi-analytical K=2 EC of plain OMA / NOMA for either user: (1/beta)
/// log2 E[2^{beta r}] with r from the corresponding rate expression and the
/// expectation taken by quadrature against the K=2 order-statistic densities.
inline double ec_numeric_k2(Strategy strategy, int user, const TwoUserParams& p,
                            const QuadratureSpec& q = {}) {
    validate(p);
    if (strategy == Strategy::noma_r)
        throw config_error("ec_numeric_k2 covers OMA and NOMA only");
    if (user != 1 && user != 2) throw config_error("user must be 1 or 2");
    const double beta = (user == 1) ? p.beta1 : p.beta2;
    detail::require_usable_beta(beta);

    double mean = 0.0;
    if (user == 1) {
        // both strategies: r = c log2(1 + rho P1 x1), c = 1/2 (OMA) or 1 (NOMA)
        const double c = (strategy == Strategy::oma) ? 0.5 * beta : beta;
        auto f = [&](double x) {
            return 2.0 * std::exp(c * std::log1p(p.rho * p.p1 * x) - 2.0 * x);
        };
        mean = integrate_semi_infinite(f, q);
    } else if (strategy == Strategy::oma) {
        auto f = [&](double x) {
            return 2.0 * std::exp(0.5 * beta * std::log1p(p.rho * p.p2 * x) - x) *
                   (-std::expm1(-x));
        };
        mean = integrate_semi_infinite(f, q);
    } else {
        QuadratureSpec inner_q = q;
        inner_q.rel_tol = std::max(q.rel_tol * 0.1, 1e-13);
        inner_q.abs_tol = std::max(q.abs_tol * 0.1, 1e-15);
        auto outer = [&](double x1) {
            const double base = 1.0 + p.rho * p.p1 * x1;
            auto g = [&](double u) {
                return std::exp(beta * std::log1p(p.rho * p.p2 * (x1 + u) / base) - u);
            };
            return 2.0 * std::exp(-2.0 * x1) * integrate_semi_infinite(g, inner_q);
        };
        mean = integrate_semi_infinite(outer, q);
    }
    return std::log(mean) * kInvLn2 / beta;
}

/// Ergodic-rate limit E[r] of the K=2 EC as beta -> 0-, for the degenerate
/// exponent path.
inline double ergodic_rate_k2(Strategy strategy, int user, const TwoUserParams& p,
                              const QuadratureSpec& q = {}) {
    validate(p);
    if (strategy == Strategy::noma_r)
        throw config_error("ergodic_rate_k2 covers OMA and NOMA only");
    if (user != 1 && user != 2) throw config_error("user must be 1 or 2");
    if (user == 1) {
        const double c = (strategy == Strategy::oma) ? 0.5 : 1.0;
        auto f = [&](double x) {
            return 2.0 * std::exp(-2.0 * x) * c * log2_1p(p.rho * p.p1 * x);
        };
        return integrate_semi_infinite(f, q);
    }
    if (strategy == Strategy::oma) {
        auto f = [&](double x) {
            return 2.0 * std::exp(-x) * (-std::expm1(-x)) * 0.5 * log2_1p(p.rho * p.p2 * x);
        };
        return integrate_semi_infinite(f, q);
    }
    QuadratureSpec inner_q = q;
    inner_q.rel_tol = std::max(q.rel_tol * 0.1, 1e-13);
    auto outer = [&](double x1) {
        const double base = 1.0 + p.rho * p.p1 * x1;
        auto g = [&](double u) {
            return std::exp(-u) * log2_1p(p.rho * p.p2 * (x1 + u) / base);
        };
        return 2.0 * std::exp(-2.0 * x1) * integrate_semi_infinite(g, inner_q);
    };
    return integrate_semi_infinite(outer, q);
}

}  // namespace nomaec
