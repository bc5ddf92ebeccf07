#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace ewm {

enum class CorrelationMethod { Spearman, Kendall };

// Average (fractional) ranks, 1-based; ties share the mean of their
// positional ranks.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double mean_rank = (double(i + 1) + double(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

// Spearman's rho: Pearson correlation of the average ranks (this form
// carries the tie correction automatically).
inline double spearman_rho(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("rank correlation: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("rank correlation: need at least 2 entries");
    std::vector<double> ra = average_ranks(a), rb = average_ranks(b);
    const double n = double(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0)
        throw std::invalid_argument("rank correlation: constant ranking");
    return cov / std::sqrt(va * vb);
}

// Kendall's tau-b with tie correction.
inline double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("rank correlation: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("rank correlation: need at least 2 entries");
    double concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            double da = a[i] - a[j], db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) continue;
            if (da == 0.0)
                ++ties_a;
            else if (db == 0.0)
                ++ties_b;
            else if (da * db > 0.0)
                ++concordant;
            else
                ++discordant;
        }
    }
    double denom = std::sqrt((concordant + discordant + ties_a) *
                             (concordant + discordant + ties_b));
    if (denom == 0.0) throw std::invalid_argument("rank correlation: constant ranking");
    return (concordant - discordant) / denom;
}

inline double rank_correlation(const std::vector<double>& a, const std::vector<double>& b,
                               CorrelationMethod method) {
    return method == CorrelationMethod::Spearman ? spearman_rho(a, b) : kendall_tau_b(a, b);
}

}  // namespace ewm
