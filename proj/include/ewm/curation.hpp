#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "ewm/trajectory.hpp"

namespace ewm {

using VoxelIndex = std::array<std::int64_t, 3>;

// Occupancy grid over cells of edge `cell` anchored at `origin`.
struct VoxelGrid {
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    double cell = 0.05;
    std::set<VoxelIndex> occupied;
};

namespace detail {

inline VoxelIndex voxel_of(const std::array<double, 3>& p, const std::array<double, 3>& origin,
                           double cell) {
    VoxelIndex v;
    for (int c = 0; c < 3; ++c)
        v[c] = static_cast<std::int64_t>(std::floor((p[c] - origin[c]) / cell));
    return v;
}

// 3-D integer digital line between voxel indices (Bresenham driven by the
// dominant axis); inserts every visited cell including both endpoints.
inline void walk_line(VoxelIndex a, VoxelIndex b, std::set<VoxelIndex>& out) {
    std::int64_t dx = std::abs(b[0] - a[0]), dy = std::abs(b[1] - a[1]),
                 dz = std::abs(b[2] - a[2]);
    std::int64_t sx = a[0] < b[0] ? 1 : -1, sy = a[1] < b[1] ? 1 : -1, sz = a[2] < b[2] ? 1 : -1;
    out.insert(a);
    if (dx >= dy && dx >= dz) {
        std::int64_t e1 = 2 * dy - dx, e2 = 2 * dz - dx;
        while (a[0] != b[0]) {
            a[0] += sx;
            if (e1 > 0) { a[1] += sy; e1 -= 2 * dx; }
            if (e2 > 0) { a[2] += sz; e2 -= 2 * dx; }
            e1 += 2 * dy;
            e2 += 2 * dz;
            out.insert(a);
        }
    } else if (dy >= dx && dy >= dz) {
        std::int64_t e1 = 2 * dx - dy, e2 = 2 * dz - dy;
        while (a[1] != b[1]) {
            a[1] += sy;
            if (e1 > 0) { a[0] += sx; e1 -= 2 * dy; }
            if (e2 > 0) { a[2] += sz; e2 -= 2 * dy; }
            e1 += 2 * dx;
            e2 += 2 * dz;
            out.insert(a);
        }
    } else {
        std::int64_t e1 = 2 * dy - dz, e2 = 2 * dx - dz;
        while (a[2] != b[2]) {
            a[2] += sz;
            if (e1 > 0) { a[1] += sy; e1 -= 2 * dz; }
            if (e2 > 0) { a[0] += sx; e2 -= 2 * dz; }
            e1 += 2 * dy;
            e2 += 2 * dx;
            out.insert(a);
        }
    }
}

}  // namespace detail

// Maps each step position to floor((p - origin) / cell) and rasterizes the
// segment between consecutive positions so the occupancy set stays
// voxel-connected under sparse sampling. ArmSelect::Both unions both arms.
inline VoxelGrid voxelize(const Trajectory& t, ArmSelect arms, std::array<double, 3> origin,
                          double cell) {
    if (!(cell > 0.0)) throw std::invalid_argument("voxelize: cell must be > 0");
    validate_trajectory(t);
    VoxelGrid grid;
    grid.origin = origin;
    grid.cell = cell;
    auto add_arm = [&](Arm arm) {
        VoxelIndex prev{};
        bool have_prev = false;
        for (const auto& s : t.steps) {
            VoxelIndex v = detail::voxel_of(s.arm(arm).position, origin, cell);
            if (have_prev)
                detail::walk_line(prev, v, grid.occupied);
            else
                grid.occupied.insert(v);
            prev = v;
            have_prev = true;
        }
    };
    if (arms != ArmSelect::Right) add_arm(Arm::Left);
    if (arms != ArmSelect::Left) add_arm(Arm::Right);
    return grid;
}

// |a intersect b| / |a union b| for grids over the same lattice.
inline double traj_iou(const VoxelGrid& a, const VoxelGrid& b) {
    if (a.cell != b.cell || a.origin != b.origin)
        throw std::invalid_argument("traj_iou: mismatched grid parameters");
    if (a.occupied.empty() && b.occupied.empty())
        throw std::invalid_argument("traj_iou: both grids empty");
    std::size_t inter = 0;
    for (const auto& v : a.occupied) inter += b.occupied.count(v);
    std::size_t uni = a.occupied.size() + b.occupied.size() - inter;
    return double(inter) / double(uni);
}

// Symmetric pairwise similarity with unit diagonal.
struct SimilarityMatrix {
    std::size_t n = 0;
    std::vector<double> values;  // n*n, row-major

    double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }

    static SimilarityMatrix identity(std::size_t n) {
        SimilarityMatrix m;
        m.n = n;
        m.values.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }
};

inline SimilarityMatrix iou_matrix(const std::vector<VoxelGrid>& grids) {
    SimilarityMatrix m = SimilarityMatrix::identity(grids.size());
    for (std::size_t i = 0; i < grids.size(); ++i)
        for (std::size_t j = i + 1; j < grids.size(); ++j)
            m.at(i, j) = m.at(j, i) = traj_iou(grids[i], grids[j]);
    return m;
}

// Least-overlap greedy selection. Seed: lowest row-mean similarity (ties ->
// lowest index). Each following pick minimizes its maximum similarity to the
// already-selected set (ties -> lowest index). Returns selection order.
inline std::vector<std::size_t> greedy_select(const SimilarityMatrix& sim, std::size_t n_select) {
    const std::size_t n = sim.n;
    if (n_select < 1 || n_select > n)
        throw std::invalid_argument("greedy_select: n_select out of range");

    std::vector<bool> taken(n, false);
    std::vector<std::size_t> picked;
    picked.reserve(n_select);

    std::size_t seed = 0;
    double best_mean = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += sim.at(i, j);
        mean /= double(n);
        if (mean < best_mean) {
            best_mean = mean;
            seed = i;
        }
    }
    picked.push_back(seed);
    taken[seed] = true;

    while (picked.size() < n_select) {
        std::size_t best_idx = n;
        double best_val = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            double worst = 0.0;
            for (std::size_t s : picked) worst = std::max(worst, sim.at(i, s));
            if (worst < best_val) {
                best_val = worst;
                best_idx = i;
            }
        }
        picked.push_back(best_idx);
        taken[best_idx] = true;
    }
    return picked;
}

}  // namespace ewm
