#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ewm/format.hpp"

namespace ewm {

enum class Arm { Left, Right };
enum class ArmSelect { Left, Right, Both };

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

// One end-effector state: position (m), orientation (rad, roll/pitch/yaw),
// gripper openness in [0,1] with 1 = fully open.
struct Pose {
    std::array<double, 3> position{0.0, 0.0, 0.0};
    std::array<double, 3> orientation{0.0, 0.0, 0.0};
    double openness = 1.0;
};

// Validates the Pose invariants; `where` names the offending location in
// error messages (e.g. "row 3, left arm").
inline void validate_pose(const Pose& p, const std::string& where) {
    for (double v : p.position)
        if (!std::isfinite(v)) throw std::invalid_argument(where + ": non-finite position");
    for (double v : p.orientation)
        if (!std::isfinite(v)) throw std::invalid_argument(where + ": non-finite orientation");
    if (!std::isfinite(p.openness) || p.openness < 0.0 || p.openness > 1.0)
        throw std::invalid_argument(where + ": openness outside [0,1]");
}

struct DualArmStep {
    Pose left;
    Pose right;
    double timestamp = 0.0;  // seconds, monotone non-negative across a trajectory

    const Pose& arm(Arm a) const { return a == Arm::Left ? left : right; }

    // Concatenated [left | right] 7-vectors.
    std::array<double, 14> flatten() const {
        return {left.position[0],  left.position[1],  left.position[2],
                left.orientation[0], left.orientation[1], left.orientation[2], left.openness,
                right.position[0], right.position[1], right.position[2],
                right.orientation[0], right.orientation[1], right.orientation[2], right.openness};
    }
};

// Dual-arm trajectory with strictly increasing timestamps, K >= 1.
struct Trajectory {
    std::vector<DualArmStep> steps;

    std::size_t size() const { return steps.size(); }
};

struct MotionDelta {
    std::array<double, 3> dp{0.0, 0.0, 0.0};  // meters
    std::array<double, 3> dr{0.0, 0.0, 0.0};  // radians, wrapped into (-pi, pi]
};

// Scalar speed/acceleration series derived from one arm's positions.
// speeds has K-1 entries, accelerations K-2.
struct KinematicProfile {
    std::vector<double> speeds;         // m/s
    std::vector<double> accelerations;  // m/s^2
};

inline void validate_trajectory(const Trajectory& t) {
    if (t.steps.empty()) throw std::invalid_argument("empty trajectory");
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const std::string where = "step " + std::to_string(i);
        if (!std::isfinite(t.steps[i].timestamp) || t.steps[i].timestamp < 0.0)
            throw std::invalid_argument(where + ": bad timestamp");
        validate_pose(t.steps[i].left, where + ", left arm");
        validate_pose(t.steps[i].right, where + ", right arm");
        if (i > 0 && !(t.steps[i].timestamp > t.steps[i - 1].timestamp))
            throw std::invalid_argument(where + ": timestamps not strictly increasing");
    }
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline Pose pose_from_fields(const double* f) {
    Pose p;
    p.position = {f[0], f[1], f[2]};
    // Angles are canonicalized into (-pi, pi]; lossless for files already in
    // that range.
    p.orientation = {wrap_angle(f[3]), wrap_angle(f[4]), wrap_angle(f[5])};
    p.openness = f[6];
    return p;
}

}  // namespace detail

inline constexpr const char* kTrajectoryHeader =
    "t,lx,ly,lz,lroll,lpitch,lyaw,lo,rx,ry,rz,rroll,rpitch,ryaw,ro";

// Parses the trajectory CSV format: header row then one row per step with
// 15 decimal columns. `selector` controls which arm columns are validated and
// retained; the other arm is zeroed when a single arm is requested.
inline Trajectory parse_trajectory_stream(std::istream& in, ArmSelect selector,
                                          const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty trajectory");
    {
        auto header = detail::split_csv_row(line);
        if (header.size() != 15 || header[0] != "t")
            throw std::runtime_error(origin + ": bad header row");
    }
    Trajectory t;
    std::size_t row = 1;  // header was row 1
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        auto fields = detail::split_csv_row(line);
        const std::string where = origin + ": row " + std::to_string(row);
        if (fields.size() != 15)
            throw std::runtime_error(where + ": expected 15 columns, got " +
                                     std::to_string(fields.size()));
        double vals[15];
        for (int i = 0; i < 15; ++i) {
            try {
                vals[i] = parse_double(fields[i]);
            } catch (const std::exception&) {
                throw std::runtime_error(where + ": non-numeric field '" + fields[i] + "'");
            }
        }
        DualArmStep step;
        step.timestamp = vals[0];
        if (selector != ArmSelect::Right) step.left = detail::pose_from_fields(vals + 1);
        if (selector != ArmSelect::Left) step.right = detail::pose_from_fields(vals + 8);
        try {
            if (selector != ArmSelect::Right) validate_pose(step.left, "left arm");
            if (selector != ArmSelect::Left) validate_pose(step.right, "right arm");
        } catch (const std::exception& e) {
            throw std::runtime_error(where + ": " + e.what());
        }
        if (!t.steps.empty() && !(step.timestamp > t.steps.back().timestamp))
            throw std::runtime_error(where + ": timestamp not strictly increasing");
        if (!std::isfinite(step.timestamp) || step.timestamp < 0.0)
            throw std::runtime_error(where + ": bad timestamp");
        t.steps.push_back(step);
    }
    if (t.steps.empty()) throw std::runtime_error(origin + ": empty trajectory");
    return t;
}

inline Trajectory parse_trajectory(const std::string& path, ArmSelect selector = ArmSelect::Both) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open trajectory file");
    return parse_trajectory_stream(in, selector, path);
}

// Canonical serialization: shortest round-trip decimals, LF endings.
inline std::string serialize_trajectory(const Trajectory& t) {
    std::string out(kTrajectoryHeader);
    out += '\n';
    for (const auto& s : t.steps) {
        out += format_double(s.timestamp);
        auto flat = s.flatten();
        for (double v : flat) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

inline void write_trajectory(const Trajectory& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << serialize_trajectory(t);
}

// Pose deltas between consecutive steps of one arm: dp[i] = p[i+1]-p[i],
// orientation differences wrapped into (-pi, pi]. K-step input -> K-1 deltas.
inline std::vector<MotionDelta> motion_deltas(const Trajectory& t, Arm arm) {
    if (t.size() < 2) throw std::invalid_argument("trajectory too short");
    std::vector<MotionDelta> out;
    out.reserve(t.size() - 1);
    for (std::size_t i = 1; i < t.size(); ++i) {
        const Pose& a = t.steps[i - 1].arm(arm);
        const Pose& b = t.steps[i].arm(arm);
        MotionDelta d;
        for (int c = 0; c < 3; ++c) {
            d.dp[c] = b.position[c] - a.position[c];
            d.dr[c] = wrap_angle(b.orientation[c] - a.orientation[c]);
        }
        out.push_back(d);
    }
    return out;
}

// speeds[i] = |p[i+1]-p[i]| / (t[i+1]-t[i]); accelerations[i] =
// (speeds[i+1]-speeds[i]) / (t[i+2]-t[i+1]). Requires K >= 3 for the
// acceleration series (K >= 2 gives speeds only).
inline KinematicProfile kinematic_profile(const Trajectory& t, Arm arm) {
    if (t.size() < 2) throw std::invalid_argument("profile undefined: need at least 2 steps");
    KinematicProfile prof;
    prof.speeds.reserve(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        const Pose& a = t.steps[i].arm(arm);
        const Pose& b = t.steps[i + 1].arm(arm);
        double dt = t.steps[i + 1].timestamp - t.steps[i].timestamp;
        double dx = b.position[0] - a.position[0];
        double dy = b.position[1] - a.position[1];
        double dz = b.position[2] - a.position[2];
        prof.speeds.push_back(std::sqrt(dx * dx + dy * dy + dz * dz) / dt);
    }
    if (t.size() >= 3) {
        prof.accelerations.reserve(t.size() - 2);
        for (std::size_t i = 0; i + 2 < t.size(); ++i) {
            double dt = t.steps[i + 2].timestamp - t.steps[i + 1].timestamp;
            prof.accelerations.push_back((prof.speeds[i + 1] - prof.speeds[i]) / dt);
        }
    }
    return prof;
}

}  // namespace ewm
