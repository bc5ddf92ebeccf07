#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ewm/trajectory.hpp"

namespace ewm {

// Ordered point sequence of consistent dimensionality d in {2,3}; points are
// stored flat (point i occupies coords[i*dim .. i*dim+dim)). Timestamps are
// optional and unused by the pure geometric distances.
class PointSeq {
public:
    PointSeq() = default;
    PointSeq(std::size_t dim, std::vector<double> coords, std::vector<double> timestamps = {})
        : dim_(dim), coords_(std::move(coords)), times_(std::move(timestamps)) {
        if (dim_ < 2 || dim_ > 3) throw std::invalid_argument("PointSeq: dim must be 2 or 3");
        if (coords_.empty() || coords_.size() % dim_ != 0)
            throw std::invalid_argument("PointSeq: coordinate count not a multiple of dim");
        if (!times_.empty() && times_.size() != size())
            throw std::invalid_argument("PointSeq: timestamp count mismatch");
        for (double v : coords_)
            if (!std::isfinite(v)) throw std::invalid_argument("PointSeq: non-finite coordinate");
    }

    static PointSeq from_points(const std::vector<std::array<double, 3>>& pts) {
        std::vector<double> flat;
        flat.reserve(pts.size() * 3);
        for (const auto& p : pts) flat.insert(flat.end(), p.begin(), p.end());
        return PointSeq(3, std::move(flat));
    }

    // One arm's positions (with timestamps) as a 3-D point sequence.
    static PointSeq from_trajectory(const Trajectory& t, Arm arm) {
        std::vector<double> flat;
        std::vector<double> times;
        flat.reserve(t.size() * 3);
        times.reserve(t.size());
        for (const auto& s : t.steps) {
            const Pose& p = s.arm(arm);
            flat.insert(flat.end(), p.position.begin(), p.position.end());
            times.push_back(s.timestamp);
        }
        return PointSeq(3, std::move(flat), std::move(times));
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return coords_.size() / dim_; }
    const double* point(std::size_t i) const { return coords_.data() + i * dim_; }
    const std::vector<double>& timestamps() const { return times_; }

private:
    std::size_t dim_ = 3;
    std::vector<double> coords_;
    std::vector<double> times_;
};

namespace detail {

inline double point_dist(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
        double d = a[c] - b[c];
        s += d * d;
    }
    return std::sqrt(s);
}

inline void check_pair(const PointSeq& a, const PointSeq& b) {
    if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("empty point sequence");
    if (a.dim() != b.dim()) throw std::invalid_argument("point dimension mismatch");
}

}  // namespace detail

// max over x in a of min over y in b of |x - y|.
inline double directed_hausdorff(const PointSeq& a, const PointSeq& b) {
    detail::check_pair(a, b);
    const std::size_t dim = a.dim();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        const double* pa = a.point(i);
        for (std::size_t j = 0; j < b.size(); ++j) {
            double d = detail::point_dist(pa, b.point(j), dim);
            if (d < best) {
                best = d;
                if (best <= worst) break;  // cannot raise the max
            }
        }
        if (best > worst) worst = best;
    }
    return worst;
}

inline double symmetric_hausdorff(const PointSeq& g, const PointSeq& p) {
    return std::max(directed_hausdorff(g, p), directed_hausdorff(p, g));
}

// SA = 1 / (symH + eps).
inline double sa_score(const PointSeq& g, const PointSeq& p, double eps = 1e-8) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    return 1.0 / (symmetric_hausdorff(g, p) + eps);
}

struct DtwResult {
    double cost = 0.0;
    std::size_t path_len = 0;  // matched pairs on one optimal path
};

// Classic DTW over steps {(1,0),(0,1),(1,1)} minimizing summed Euclidean
// pairwise distances. Cost ties are broken by preferring the (1,1)
// predecessor, then (1,0), then (0,1), which makes path_len deterministic.
inline DtwResult dtw_distance(const PointSeq& g, const PointSeq& p) {
    detail::check_pair(g, p);
    const std::size_t n = g.size(), m = p.size(), dim = g.dim();
    const double inf = std::numeric_limits<double>::infinity();

    // Rolling rows of the accumulated-cost and path-length tables.
    std::vector<double> prev_cost(m + 1, inf), cur_cost(m + 1, inf);
    std::vector<std::size_t> prev_len(m + 1, 0), cur_len(m + 1, 0);
    prev_cost[0] = 0.0;

    for (std::size_t i = 1; i <= n; ++i) {
        cur_cost[0] = inf;
        const double* pg = g.point(i - 1);
        for (std::size_t j = 1; j <= m; ++j) {
            double d = detail::point_dist(pg, p.point(j - 1), dim);
            // Predecessors in preference order: (1,1), (1,0), (0,1).
            double best = prev_cost[j - 1];
            std::size_t len = prev_len[j - 1];
            if (prev_cost[j] < best) {
                best = prev_cost[j];
                len = prev_len[j];
            }
            if (cur_cost[j - 1] < best) {
                best = cur_cost[j - 1];
                len = cur_len[j - 1];
            }
            cur_cost[j] = best + d;
            cur_len[j] = len + 1;
        }
        std::swap(prev_cost, cur_cost);
        std::swap(prev_len, cur_len);
    }
    return {prev_cost[m], prev_len[m]};
}

// TA = 1 / (NDTW + eps) with NDTW = dtw cost / optimal path length.
inline double ta_score(const PointSeq& g, const PointSeq& p, double eps = 1e-8) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
    DtwResult r = dtw_distance(g, p);
    double ndtw = r.cost / static_cast<double>(r.path_len);
    return 1.0 / (ndtw + eps);
}

// Order-1 Wasserstein distance between the empirical distributions of two
// multisets, computed exactly by merging the sorted samples (no binning).
inline double wasserstein_1d(std::vector<double> u, std::vector<double> w) {
    if (u.empty() || w.empty()) throw std::invalid_argument("empty sample set");
    std::sort(u.begin(), u.end());
    std::sort(w.begin(), w.end());
    const double nu = static_cast<double>(u.size());
    const double nw = static_cast<double>(w.size());

    // Integrate |F_u(x) - F_w(x)| over the merged support.
    double total = 0.0;
    std::size_t i = 0, j = 0;
    double cdf_u = 0.0, cdf_w = 0.0;
    double x = std::min(u[0], w[0]);
    while (i < u.size() || j < w.size()) {
        double next;
        if (i < u.size() && (j == w.size() || u[i] <= w[j]))
            next = u[i];
        else
            next = w[j];
        total += std::abs(cdf_u - cdf_w) * (next - x);
        x = next;
        while (i < u.size() && u[i] == x) {
            cdf_u += 1.0 / nu;
            ++i;
        }
        while (j < w.size() && w[j] == x) {
            cdf_w += 1.0 / nw;
            ++j;
        }
    }
    return total;
}

// DYN weights; defaults follow the benchmark configuration.
struct DynWeights {
    double alpha = 0.007;
    double beta = 0.003;
    double epsilon = 1e-8;
};

inline void validate(const DynWeights& w) {
    if (!(w.alpha > 0.0) || !(w.beta > 0.0) || !(w.epsilon > 0.0))
        throw std::invalid_argument("DynWeights must be positive");
}

namespace detail {
inline double amplitude(const std::vector<double>& s) {
    auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    return *hi - *lo;
}
}  // namespace detail

// Dynamic-consistency score:
//   r_v = (min(Av_gt, Av_pred) + eps) / (max(Av_gt, Av_pred) + eps)   with
//   Av = max(v) - min(v), r_a analogously, then
//   score = alpha * r_v / (W(v) + eps) + beta * r_a / (W(a) + eps)
// clamped into [0,1]. W is the order-1 Wasserstein distance over the raw
// speed/acceleration samples.
inline double dyn_score(const KinematicProfile& gt, const KinematicProfile& pred,
                        const DynWeights& weights = {}) {
    validate(weights);
    if (gt.speeds.empty() || gt.accelerations.empty() || pred.speeds.empty() ||
        pred.accelerations.empty())
        throw std::invalid_argument("dyn_score: empty kinematic profile");
    const double eps = weights.epsilon;

    double av_g = detail::amplitude(gt.speeds), av_p = detail::amplitude(pred.speeds);
    double aa_g = detail::amplitude(gt.accelerations), aa_p = detail::amplitude(pred.accelerations);
    double r_v = (std::min(av_g, av_p) + eps) / (std::max(av_g, av_p) + eps);
    double r_a = (std::min(aa_g, aa_p) + eps) / (std::max(aa_g, aa_p) + eps);

    double wv = wasserstein_1d(gt.speeds, pred.speeds);
    double wa = wasserstein_1d(gt.accelerations, pred.accelerations);

    double raw = weights.alpha * r_v / (wv + eps) + weights.beta * r_a / (wa + eps);
    return std::clamp(raw, 0.0, 1.0);
}

// Index of the sample with lowest symmetric Hausdorff distance to g
// (ties -> lowest index), plus that distance.
inline std::pair<std::size_t, double> select_best_sample(const PointSeq& g,
                                                         const std::vector<PointSeq>& samples) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::size_t best_idx = 0;
    double best = symmetric_hausdorff(g, samples[0]);
    for (std::size_t i = 1; i < samples.size(); ++i) {
        double d = symmetric_hausdorff(g, samples[i]);
        if (d < best) {
            best = d;
            best_idx = i;
        }
    }
    return {best_idx, best};
}

}  // namespace ewm
