#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "nomaec/rng.hpp"

namespace nomaec {

/// One realization of the K ordered channel power gains x_1 <= ... <= x_K.
/// Gains are |h_k|^2 for unit-variance Rayleigh h_k, i.e. unit-mean
/// exponentials before ordering. gains[k-1] is the k-th order statistic.
struct GainSample {
    std::vector<double> gains;
};

/// Fills `out` with out.size() ordered unit-mean exponential gains.
/// Ordering is a full sort of the raw draws; K stays small (<= 16) in every
/// configuration this artifact supports.
inline void sample_ordered_gains(Xoshiro256pp& rng, std::span<double> out) {
    for (auto& g : out) g = rng.exponential();
    std::sort(out.begin(), out.end());
}

inline GainSample sample_ordered_gains(std::size_t k, Xoshiro256pp& rng) {
    if (k < 1) throw std::invalid_argument("sample_ordered_gains: k must be >= 1");
    GainSample s;
    s.gains.resize(k);
    sample_ordered_gains(rng, s.gains);
    return s;
}

/// Selector for the K=2 order-statistic densities.
enum class K2Gain { weak, strong, joint };

/// Analytical K=2 densities: weak-user pdf 2e^{-2x}, strong-user pdf
/// 2e^{-x}(1-e^{-x}), joint pdf 2e^{-x1-x2} on the ordered support x2 >= x1
/// (0 outside it).
inline double pdf_k2(K2Gain which, double x1,
                     double x2 = std::numeric_limits<double>::quiet_NaN()) {
    if (x1 < 0.0) throw std::domain_error("pdf_k2: negative gain argument");
    switch (which) {
        case K2Gain::weak:
            return 2.0 * std::exp(-2.0 * x1);
        case K2Gain::strong:
            return 2.0 * std::exp(-x1) * (-std::expm1(-x1));
        case K2Gain::joint:
            if (std::isnan(x2)) throw std::invalid_argument("pdf_k2: joint needs x2");
            if (x2 < 0.0) throw std::domain_error("pdf_k2: negative gain argument");
            if (x2 < x1) return 0.0;
            return 2.0 * std::exp(-x1 - x2);
    }
    throw std::invalid_argument("pdf_k2: bad selector");
}

}  // namespace nomaec
