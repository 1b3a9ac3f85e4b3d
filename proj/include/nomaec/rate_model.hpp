#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nomaec/channel.hpp"
#include "nomaec/errors.hpp"

namespace nomaec {

inline constexpr double kLn2 = 0.6931471805599453;
inline constexpr double kInvLn2 = 1.4426950408889634;  // 1/ln(2)

inline double log2_1p(double v) { return std::log1p(v) * kInvLn2; }

/// Exhaustive partition search grows with the Bell numbers; 12 users is
/// already ~4.2e6 partitions per realization.
inline constexpr std::size_t kMaxUsers = 12;

/// Uplink network parameters. Powers and SNR are linear (not dB); betas are
/// the negative QoS exponents beta_k = -theta_k * T_f * B / ln(2).
struct NetworkConfig {
    std::size_t k_users = 0;
    std::vector<double> powers;
    double rho = 0.0;
    std::vector<double> betas;
};

/// Conversion helper from the physical QoS triplet; only the product enters
/// any rate or EC expression, so the config carries beta alone.
inline double beta_from_qos(double theta, double t_f, double bandwidth) {
    return -theta * t_f * bandwidth / kLn2;
}

/// Checks all NetworkConfig invariants. Throws config_error naming the
/// offending user/field; returns non-fatal warnings (e.g. powers not summing
/// to one, which the reference setups assume but nothing requires).
inline std::vector<std::string> validate(const NetworkConfig& cfg) {
    if (cfg.k_users < 1) throw config_error("k_users must be >= 1");
    if (cfg.k_users > kMaxUsers) {
        std::ostringstream os;
        os << "k_users = " << cfg.k_users << " exceeds the supported maximum of "
           << kMaxUsers << " (exhaustive cluster search)";
        throw config_error(os.str());
    }
    if (cfg.powers.size() != cfg.k_users)
        throw config_error("powers must list exactly one entry per user");
    if (cfg.betas.size() != cfg.k_users)
        throw config_error("betas must list exactly one entry per user");
    if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho))
        throw config_error("rho must be positive and finite");
    for (std::size_t i = 0; i < cfg.k_users; ++i) {
        if (!(cfg.powers[i] > 0.0) || !std::isfinite(cfg.powers[i])) {
            std::ostringstream os;
            os << "power for user " << (i + 1) << " must be positive";
            throw config_error(os.str());
        }
        if (!(cfg.betas[i] < 0.0) || !std::isfinite(cfg.betas[i])) {
            std::ostringstream os;
            os << "beta for user " << (i + 1) << " must be negative (got " << cfg.betas[i]
               << ")";
            throw config_error(os.str());
        }
    }
    std::vector<std::string> warnings;
    double psum = 0.0;
    for (double p : cfg.powers) psum += p;
    if (std::abs(psum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "sum of powers is " << psum << ", not 1";
        warnings.push_back(os.str());
    }
    return warnings;
}

/// Partition of users {1..K} into NOMA clusters (size >= 2) and OMA
/// singletons. All indices are 1-based order-statistic indices; member lists
/// ascend and clusters are ordered by smallest member.
struct ClusterAssignment {
    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> singletons;
};

struct RateVector {
    std::vector<double> rates;  // rates[k-1] = rate of user k, bits/s/Hz
};

/// Per-user NOMA rates for one cluster under perfect SIC:
///   R_k = (|S|/K) log2(1 + rho P_k x_k / (1 + sum_{j in S, j<k} rho P_j x_j)).
/// `cluster` lists 1-based members in ascending (gain) order; `out` is
/// parallel to it. The weakest member decodes free of intra-cluster
/// interference.
inline void noma_rates(std::span<const std::size_t> cluster, std::span<const double> gains,
                       const NetworkConfig& cfg, std::span<double> out) {
    const double share = static_cast<double>(cluster.size()) / static_cast<double>(cfg.k_users);
    double interference = 0.0;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        const std::size_t k = cluster[i] - 1;
        const double y = cfg.rho * cfg.powers[k] * gains[k];
        out[i] = share * log2_1p(y / (1.0 + interference));
        interference += y;
    }
}

inline void noma_rates(std::span<const std::size_t> cluster, const GainSample& sample,
                       const NetworkConfig& cfg, std::span<double> out) {
    noma_rates(cluster, std::span<const double>(sample.gains), cfg, out);
}

inline std::vector<double> noma_rates(std::span<const std::size_t> cluster,
                                      const GainSample& sample, const NetworkConfig& cfg) {
    std::vector<double> out(cluster.size());
    noma_rates(cluster, sample, cfg, out);
    return out;
}

/// OMA rate of user k (1-based): (1/K) log2(1 + rho P_k x_k).
inline double oma_rate(std::size_t k, std::span<const double> gains,
                       const NetworkConfig& cfg) {
    const double y = cfg.rho * cfg.powers[k - 1] * gains[k - 1];
    return log2_1p(y) / static_cast<double>(cfg.k_users);
}

inline double oma_rate(std::size_t k, const GainSample& sample, const NetworkConfig& cfg) {
    return oma_rate(k, std::span<const double>(sample.gains), cfg);
}

/// NOMA-benefit criterion for one cluster: true iff, for every member k,
///   1 + rho P_k x_k / (1 + sum_{j in S, j<k} rho P_j x_j) >= (1 + rho P_k x_k)^(1/|S|)
/// with inclusive equality. Evaluated in log form (monotone transform) so the
/// comparison stays well conditioned at extreme SNR.
inline bool noma_beneficial(std::span<const std::size_t> cluster, std::span<const double> gains,
                            const NetworkConfig& cfg) {
    const double inv_s = 1.0 / static_cast<double>(cluster.size());
    double interference = 0.0;
    for (std::size_t member : cluster) {
        const std::size_t k = member - 1;
        const double y = cfg.rho * cfg.powers[k] * gains[k];
        if (std::log1p(y / (1.0 + interference)) < inv_s * std::log1p(y)) return false;
        interference += y;
    }
    return true;
}

inline bool noma_beneficial(std::span<const std::size_t> cluster, const GainSample& sample,
                            const NetworkConfig& cfg) {
    return noma_beneficial(cluster, std::span<const double>(sample.gains), cfg);
}

/// K=2 simplified form of the criterion for the pair {1,2}:
///   x2 >= (rho^2 x1^2 P1^2 - 1) / (rho P2).
/// Fast path used by the Monte-Carlo tau estimator; equivalence with
/// noma_beneficial is asserted in the test suite.
inline bool noma_beneficial_k2_threshold(double x1, double x2, double rho, double p1,
                                         double p2) {
    const double a = rho * p1 * x1;
    return rho * p2 * x2 >= a * a - 1.0;
}

namespace detail {

// Lexicographic order on canonical cluster lists (masks ordered by smallest
// member, members ascending). Prefix compares smaller.
inline bool cluster_list_less(std::span<const std::uint32_t> a,
                              std::span<const std::uint32_t> b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t x = a[i];
        std::uint32_t y = b[i];
        while (x != 0 && y != 0) {
            const int ex = std::countr_zero(x);
            const int ey = std::countr_zero(y);
            if (ex != ey) return ex < ey;
            x &= x - 1;
            y &= y - 1;
        }
        if (x != y) return x == 0;
    }
    return a.size() < b.size();
}

// Exhaustive search over partitions of {0..k-1} into blocks of size >= 2
// (must be feasible) and singletons. Scratch buffers are caller-owned so hot
// loops can reuse them across millions of calls.
struct PartitionSearch {
    std::size_t k = 0;
    const std::uint8_t* feasible = nullptr;   // by mask
    const double* cluster_rate = nullptr;     // by mask
    const double* singleton_rate = nullptr;   // by user, 0-based

    double best_value = -std::numeric_limits<double>::infinity();
    int best_noma_users = -1;
    std::vector<std::uint32_t> best_clusters;
    std::vector<std::uint32_t> cur;

    void run() {
        cur.clear();
        best_clusters.clear();
        best_value = -std::numeric_limits<double>::infinity();
        best_noma_users = -1;
        recurse((1u << k) - 1u, 0.0, 0);
    }

    void consider(double value, int noma_users) {
        if (value < best_value) return;
        if (value == best_value) {
            if (noma_users < best_noma_users) return;
            if (noma_users == best_noma_users && !cluster_list_less(cur, best_clusters))
                return;
        }
        best_value = value;
        best_noma_users = noma_users;
        best_clusters.assign(cur.begin(), cur.end());
    }

    void recurse(std::uint32_t remaining, double value, int noma_users) {
        if (remaining == 0) {
            consider(value, noma_users);
            return;
        }
        const int leader = std::countr_zero(remaining);
        const std::uint32_t leader_bit = 1u << leader;
        const std::uint32_t rest = remaining & ~leader_bit;

        // leader stays on OMA
        recurse(rest, value + singleton_rate[leader], noma_users);

        // leader opens a NOMA cluster with every non-empty submask of rest
        for (std::uint32_t sub = rest; sub != 0; sub = (sub - 1) & rest) {
            const std::uint32_t block = sub | leader_bit;
            if (!feasible[block]) continue;
            cur.push_back(block);
            recurse(rest & ~sub, value + cluster_rate[block],
                    noma_users + std::popcount(block));
            cur.pop_back();
        }
    }
};

}  // namespace detail

/// Exhaustive argmax over partitions of {1..k} into NOMA blocks (size >= 2,
/// each passing `feasible`) and OMA singletons. Rates are supplied as
/// callables over user bitmasks (bit k-1 = user k) so tests can exercise the
/// selection logic directly. Ties prefer more users in NOMA, then the
/// lexicographically smallest cluster list.
template <typename FeasibleFn, typename ClusterRateFn, typename SingletonRateFn>
inline std::vector<std::uint32_t> best_partition(std::size_t k, FeasibleFn&& feasible,
                                                 ClusterRateFn&& cluster_rate,
                                                 SingletonRateFn&& singleton_rate,
                                                 double* sum_rate_out = nullptr) {
    if (k < 1) throw config_error("best_partition: k must be >= 1");
    if (k > kMaxUsers) {
        std::ostringstream os;
        os << "cluster selection supports at most " << kMaxUsers << " users (got " << k
           << ")";
        throw config_error(os.str());
    }
    const std::uint32_t nmask = 1u << k;
    std::vector<std::uint8_t> feas(nmask, 0);
    std::vector<double> rate(nmask, 0.0);
    std::vector<double> singleton(k);
    for (std::uint32_t m = 0; m < nmask; ++m) {
        if (std::popcount(m) < 2) continue;
        feas[m] = feasible(m) ? 1 : 0;
        if (feas[m]) rate[m] = cluster_rate(m);
    }
    for (std::size_t i = 0; i < k; ++i) singleton[i] = singleton_rate(i);

    detail::PartitionSearch search;
    search.k = k;
    search.feasible = feas.data();
    search.cluster_rate = rate.data();
    search.singleton_rate = singleton.data();
    search.run();
    if (sum_rate_out) *sum_rate_out = search.best_value;
    return std::move(search.best_clusters);
}

namespace detail {

// Scratch for the selection hot path; Monte-Carlo loops keep one per worker.
struct SelectScratch {
    std::vector<std::uint8_t> feas;
    std::vector<double> rate;
    PartitionSearch search;
};

// Core of select_clusters working on raw gains; returns the chosen cluster
// masks (bit i = user i+1) inside scratch.search.best_clusters.
inline void select_cluster_masks(std::span<const double> gains, const NetworkConfig& cfg,
                                 SelectScratch& scratch) {
    const std::size_t k = cfg.k_users;
    if (k > kMaxUsers) {
        std::ostringstream os;
        os << "cluster selection supports at most " << kMaxUsers << " users (got " << k
           << ")";
        throw config_error(os.str());
    }
    const double inv_k = 1.0 / static_cast<double>(k);

    double y[kMaxUsers];
    double logy[kMaxUsers];
    double singleton[kMaxUsers];
    for (std::size_t i = 0; i < k; ++i) {
        y[i] = cfg.rho * cfg.powers[i] * gains[i];
        logy[i] = std::log1p(y[i]);
        singleton[i] = inv_k * kInvLn2 * logy[i];
    }

    // Per-mask feasibility and sum rate, memoized across partitions. The sum
    // rate of a cluster collapses to (|S|/K) log2(1 + sum_{k in S} y_k).
    const std::uint32_t nmask = 1u << k;
    scratch.feas.assign(nmask, 0);
    scratch.rate.assign(nmask, 0.0);
    for (std::uint32_t m = 0; m < nmask; ++m) {
        if (std::popcount(m) < 2) continue;
        const double inv_s = 1.0 / static_cast<double>(std::popcount(m));
        bool ok = true;
        double interference = 0.0;
        double ysum = 0.0;
        for (std::uint32_t bits = m; bits != 0; bits &= bits - 1) {
            const int i = std::countr_zero(bits);
            if (std::log1p(y[i] / (1.0 + interference)) < inv_s * logy[i]) {
                ok = false;
                break;
            }
            interference += y[i];
            ysum += y[i];
        }
        if (!ok) continue;
        scratch.feas[m] = 1;
        scratch.rate[m] = static_cast<double>(std::popcount(m)) * inv_k * log2_1p(ysum);
    }

    scratch.search.k = k;
    scratch.search.feasible = scratch.feas.data();
    scratch.search.cluster_rate = scratch.rate.data();
    scratch.search.singleton_rate = singleton;
    scratch.search.run();
}

}  // namespace detail

/// NOMA-R cluster selection: the partition maximizing the instantaneous sum
/// rate among those whose every NOMA block satisfies the benefit criterion.
/// Cluster members take Eq.-(1)-style rates, singletons OMA rates.
inline ClusterAssignment select_clusters(const GainSample& sample, const NetworkConfig& cfg) {
    thread_local detail::SelectScratch scratch;
    detail::select_cluster_masks(sample.gains, cfg, scratch);

    ClusterAssignment out;
    std::uint32_t in_cluster = 0;
    for (std::uint32_t m : scratch.search.best_clusters) {
        in_cluster |= m;
        auto& members = out.clusters.emplace_back();
        for (std::uint32_t bits = m; bits != 0; bits &= bits - 1)
            members.push_back(static_cast<std::size_t>(std::countr_zero(bits)) + 1);
    }
    for (std::size_t i = 0; i < cfg.k_users; ++i)
        if (!(in_cluster & (1u << i))) out.singletons.push_back(i + 1);
    return out;
}

/// Per-realization NOMA-R rates: select_clusters, then Eq.-(1) rates inside
/// clusters and OMA rates for singletons.
inline RateVector noma_r_rates(const GainSample& sample, const NetworkConfig& cfg) {
    const ClusterAssignment assignment = select_clusters(sample, cfg);
    RateVector out;
    out.rates.assign(cfg.k_users, 0.0);
    std::vector<double> buf;
    for (const auto& cluster : assignment.clusters) {
        buf.resize(cluster.size());
        noma_rates(cluster, sample, cfg, buf);
        for (std::size_t i = 0; i < cluster.size(); ++i) out.rates[cluster[i] - 1] = buf[i];
    }
    for (std::size_t k : assignment.singletons)
        out.rates[k - 1] = oma_rate(k, sample, cfg);
    return out;
}

}  // namespace nomaec
