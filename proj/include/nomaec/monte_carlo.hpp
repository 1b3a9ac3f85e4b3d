#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "nomaec/channel.hpp"
#include "nomaec/closed_form.hpp"
#include "nomaec/rate_model.hpp"
#include "nomaec/rng.hpp"

namespace nomaec {

/// Monte-Carlo EC estimate. value = (1/beta) log2(raw_mean) where raw_mean
/// averages 2^{beta r}; std_err is the delta-method propagation of raw_se
/// through that transform.
struct EcEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
    double raw_mean = 0.0;
    double raw_se = 0.0;
};

/// Empirical probability that NOMA-R selects at least one NOMA cluster.
struct TauEstimate {
    double value = 0.0;
    double std_err = 0.0;  // binomial
    std::uint64_t n = 0;
};

struct SumEcEstimate {
    std::vector<EcEstimate> per_user;
    double sum_value = 0.0;
    double sum_std_err = 0.0;  // sqrt(sum SE_k^2), conservative independence bound
};

struct McOptions {
    unsigned workers = 0;  // 0 -> hardware concurrency
    /// Test hook applied to each sorted gain vector before rate evaluation
    /// (e.g. forcing all gains to zero). Leave empty in production use.
    std::function<void(std::span<double>)> gain_hook;
};

namespace detail {

// The sample index space is split into fixed-size blocks; block b draws from
// the stream derived from (seed, b) and partial sums are reduced in ascending
// block order, so results are bit-identical for any worker count.
inline constexpr std::uint64_t kMcBlockSize = 1ull << 16;

struct BlockMoments {
    std::vector<double> sum;
    std::vector<double> sumsq;
};

// Runs `eval` over n samples of K ordered gains. eval(gains, w) writes one
// value per output channel; the engine returns summed first and second
// moments per channel, reduced deterministically. Each worker runs its own
// copy of `eval`, so evaluator-internal scratch needs no synchronization.
template <typename EvalFn>
inline BlockMoments run_moments(const NetworkConfig& cfg, std::size_t n_outputs,
                                std::uint64_t n, RngSeed seed, const McOptions& opt,
                                const EvalFn& eval) {
    const std::size_t k = cfg.k_users;
    const std::uint64_t n_blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
    std::vector<BlockMoments> blocks(static_cast<std::size_t>(n_blocks));

    std::atomic<std::uint64_t> next_block{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        double gains[kMaxUsers];
        std::vector<double> w(n_outputs);
        EvalFn local_eval = eval;
        try {
            for (;;) {
                const std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
                if (b >= n_blocks) return;
                const std::uint64_t begin = b * kMcBlockSize;
                const std::uint64_t count = std::min(kMcBlockSize, n - begin);
                Xoshiro256pp rng = Xoshiro256pp::for_stream(seed, b);
                BlockMoments& out = blocks[static_cast<std::size_t>(b)];
                out.sum.assign(n_outputs, 0.0);
                out.sumsq.assign(n_outputs, 0.0);
                for (std::uint64_t i = 0; i < count; ++i) {
                    std::span<double> g(gains, k);
                    sample_ordered_gains(rng, g);
                    if (opt.gain_hook) opt.gain_hook(g);
                    local_eval(std::span<const double>(gains, k), std::span<double>(w));
                    for (std::size_t j = 0; j < n_outputs; ++j) {
                        out.sum[j] += w[j];
                        out.sumsq[j] += w[j] * w[j];
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next_block.store(n_blocks, std::memory_order_relaxed);
        }
    };

    unsigned workers = opt.workers != 0 ? opt.workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n_blocks, 1)));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    BlockMoments total;
    total.sum.assign(n_outputs, 0.0);
    total.sumsq.assign(n_outputs, 0.0);
    for (const auto& b : blocks) {
        for (std::size_t j = 0; j < n_outputs; ++j) {
            total.sum[j] += b.sum[j];
            total.sumsq[j] += b.sumsq[j];
        }
    }
    return total;
}

inline EcEstimate ec_from_moments(double sum, double sumsq, std::uint64_t n, double beta) {
    EcEstimate est;
    est.n = n;
    est.raw_mean = sum / static_cast<double>(n);
    double var = 0.0;
    if (n > 1) {
        var = (sumsq - static_cast<double>(n) * est.raw_mean * est.raw_mean) /
              static_cast<double>(n - 1);
        var = std::max(var, 0.0);
    }
    est.raw_se = std::sqrt(var / static_cast<double>(n));
    est.value = std::log(est.raw_mean) * kInvLn2 / beta + 0.0;  // +0.0 normalizes -0
    est.std_err = est.raw_se / (std::abs(beta) * kLn2 * est.raw_mean);
    return est;
}

// Fills w with 2^{beta_k r_k} for all users under one strategy. Rates go
// through the same rate_model code paths everywhere so that per-sample
// dominance relations between strategies survive in floating point.
struct StrategyEval {
    const NetworkConfig* cfg;
    StrategyModel model;
    double tau = 0.0;  // TimeShare only
    std::vector<std::size_t> full_cluster;
    mutable SelectScratch scratch;
    mutable double rates[kMaxUsers];
    mutable double rates_oma[kMaxUsers];
    mutable std::size_t members[kMaxUsers];

    explicit StrategyEval(const NetworkConfig& c, const StrategyModel& m) : cfg(&c), model(m) {
        for (std::size_t i = 1; i <= c.k_users; ++i) full_cluster.push_back(i);
        if (model.strategy == Strategy::noma_r &&
            model.variant.value() == NomarVariant::time_share) {
            if (c.k_users != 2)
                throw config_error(
                    "the TimeShare NOMA-R model needs the K=2 closed-form tau; use the "
                    "EventSelection variant for K != 2");
            tau = tau_closed_form(two_user_params(c));
        }
    }

    void operator()(std::span<const double> gains, std::span<double> w) const {
        const std::size_t k = cfg->k_users;
        switch (model.strategy) {
            case Strategy::oma:
                for (std::size_t u = 1; u <= k; ++u)
                    rates[u - 1] = oma_rate(u, gains, *cfg);
                break;
            case Strategy::noma:
                noma_rates(full_cluster, gains, *cfg, std::span<double>(rates, k));
                break;
            case Strategy::noma_r:
                if (*model.variant == NomarVariant::time_share) {
                    noma_rates(full_cluster, gains, *cfg, std::span<double>(rates, k));
                    for (std::size_t u = 1; u <= k; ++u) {
                        rates_oma[u - 1] = oma_rate(u, gains, *cfg);
                        rates[u - 1] =
                            tau * rates[u - 1] + (1.0 - tau) * rates_oma[u - 1];
                    }
                } else {
                    event_selection_rates(gains);
                }
                break;
        }
        for (std::size_t u = 0; u < k; ++u) w[u] = std::exp2(cfg->betas[u] * rates[u]);
    }

    void event_selection_rates(std::span<const double> gains) const {
        select_cluster_masks(gains, *cfg, scratch);
        std::uint32_t in_cluster = 0;
        for (std::uint32_t mask : scratch.search.best_clusters) {
            in_cluster |= mask;
            std::size_t m = 0;
            for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1)
                members[m++] = static_cast<std::size_t>(std::countr_zero(bits)) + 1;
            double block_rates[kMaxUsers];
            noma_rates(std::span<const std::size_t>(members, m), gains, *cfg,
                       std::span<double>(block_rates, m));
            for (std::size_t i = 0; i < m; ++i) rates[members[i] - 1] = block_rates[i];
        }
        for (std::size_t u = 1; u <= cfg->k_users; ++u)
            if (!(in_cluster & (1u << (u - 1)))) rates[u - 1] = oma_rate(u, gains, *cfg);
    }
};

}  // namespace detail

/// Monte-Carlo estimate of tau: the fraction of realizations in which
/// select_clusters returns at least one NOMA cluster. For K=2 this is exactly
/// the probability of the simplified threshold criterion, which doubles as a
/// fast path.
inline TauEstimate estimate_tau(const NetworkConfig& cfg, std::uint64_t n, RngSeed seed,
                                const McOptions& opt = {}) {
    validate(cfg);
    if (n < 1) throw config_error("estimate_tau: n must be >= 1");

    detail::BlockMoments moments;
    if (cfg.k_users == 2) {
        const double rho = cfg.rho, p1 = cfg.powers[0], p2 = cfg.powers[1];
        moments = detail::run_moments(
            cfg, 1, n, seed, opt, [rho, p1, p2](std::span<const double> g, std::span<double> w) {
                w[0] = noma_beneficial_k2_threshold(g[0], g[1], rho, p1, p2) ? 1.0 : 0.0;
            });
    } else {
        moments = detail::run_moments(
            cfg, 1, n, seed, opt, [&cfg](std::span<const double> g, std::span<double> w) {
                thread_local detail::SelectScratch tl_scratch;
                detail::select_cluster_masks(g, cfg, tl_scratch);
                w[0] = tl_scratch.search.best_clusters.empty() ? 0.0 : 1.0;
            });
    }
    TauEstimate est;
    est.n = n;
    est.value = moments.sum[0] / static_cast<double>(n);
    est.std_err = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(n));
    return est;
}

/// Monte-Carlo EC of every user under one strategy model, sharing a single
/// sample stream (common random numbers across users, and across strategies
/// when called with the same seed).
inline std::vector<EcEstimate> estimate_ec_all_users(const StrategyModel& model,
                                                     const NetworkConfig& cfg,
                                                     std::uint64_t n, RngSeed seed,
                                                     const McOptions& opt = {}) {
    validate(cfg);
    validate(model);
    if (n < 1) throw config_error("estimate_ec: n must be >= 1");
    for (double beta : cfg.betas) detail::require_usable_beta(beta);

    detail::StrategyEval eval(cfg, model);
    auto moments = detail::run_moments(cfg, cfg.k_users, n, seed, opt, eval);
    std::vector<EcEstimate> out(cfg.k_users);
    for (std::size_t u = 0; u < cfg.k_users; ++u)
        out[u] = detail::ec_from_moments(moments.sum[u], moments.sumsq[u], n, cfg.betas[u]);
    return out;
}

/// Monte-Carlo EC of one user (1-based order-statistic index).
inline EcEstimate estimate_ec(const StrategyModel& model, std::size_t user,
                              const NetworkConfig& cfg, std::uint64_t n, RngSeed seed,
                              const McOptions& opt = {}) {
    if (user < 1 || user > cfg.k_users) throw config_error("estimate_ec: bad user index");
    return estimate_ec_all_users(model, cfg, n, seed, opt)[user - 1];
}

/// Per-user ECs plus their sum, all from one sample stream. The sum's
/// standard error is the independence bound sqrt(sum SE_k^2) (conservative:
/// common random numbers correlate the per-user estimates).
inline SumEcEstimate estimate_sum_ec(const StrategyModel& model, const NetworkConfig& cfg,
                                     std::uint64_t n, RngSeed seed,
                                     const McOptions& opt = {}) {
    SumEcEstimate est;
    est.per_user = estimate_ec_all_users(model, cfg, n, seed, opt);
    double var = 0.0;
    for (const auto& e : est.per_user) {
        est.sum_value += e.value;
        var += e.std_err * e.std_err;
    }
    est.sum_std_err = std::sqrt(var);
    return est;
}

}  // namespace nomaec
