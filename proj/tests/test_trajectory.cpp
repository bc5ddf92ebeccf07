#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ewm/trajectory.hpp"
#include "test_util.hpp"

using namespace ewm;
using ewm_test::TempDir;

namespace {

Trajectory from_csv(const std::string& body) {
    std::istringstream in(body);
    return parse_trajectory_stream(in, ArmSelect::Both, "test");
}

std::string row(double t, double x, double y, double z) {
    std::string s = format_double(t);
    s += "," + format_double(x) + "," + format_double(y) + "," + format_double(z) + ",0,0,0,1";
    s += "," + format_double(x) + "," + format_double(y) + "," + format_double(z) + ",0,0,0,1";
    return s;
}

}  // namespace

TEST_CASE("parse_trajectory accepts a two-row file") {
    std::string body = std::string(kTrajectoryHeader) + "\n" + row(0, 0, 0, 0) + "\n" +
                       row(1, 1, 0, 0) + "\n";
    Trajectory t = from_csv(body);
    REQUIRE(t.size() == 2);
    CHECK(t.steps[1].left.position[0] == 1.0);
    CHECK(t.steps[1].timestamp == 1.0);
}

TEST_CASE("parse_trajectory rejects an empty file") {
    std::istringstream in("");
    REQUIRE_THROWS_WITH(parse_trajectory_stream(in, ArmSelect::Both, "test"),
                        Catch::Matchers::ContainsSubstring("empty trajectory"));
}

TEST_CASE("parse_trajectory reports duplicate timestamps with the row number") {
    std::string body = std::string(kTrajectoryHeader) + "\n" + row(0, 0, 0, 0) + "\n" +
                       row(1, 1, 0, 0) + "\n" + row(1, 2, 0, 0) + "\n";
    REQUIRE_THROWS_WITH(from_csv(body), Catch::Matchers::ContainsSubstring("row 4"));
}

TEST_CASE("parse_trajectory reports malformed rows") {
    SECTION("wrong column count") {
        std::string body = std::string(kTrajectoryHeader) + "\n0,1,2\n";
        REQUIRE_THROWS_WITH(from_csv(body), Catch::Matchers::ContainsSubstring("15 columns"));
    }
    SECTION("non-numeric field") {
        std::string body = std::string(kTrajectoryHeader) + "\n" + row(0, 0, 0, 0) + "\n";
        body += "1,x,0,0,0,0,0,1,0,0,0,0,0,0,1\n";
        REQUIRE_THROWS_WITH(from_csv(body), Catch::Matchers::ContainsSubstring("non-numeric"));
    }
    SECTION("openness outside [0,1]") {
        std::string body = std::string(kTrajectoryHeader) + "\n";
        body += "0,0,0,0,0,0,0,1.5,0,0,0,0,0,0,1\n";
        REQUIRE_THROWS_WITH(from_csv(body), Catch::Matchers::ContainsSubstring("openness"));
    }
}

TEST_CASE("serialize then parse round-trips numeric content bit-exactly") {
    std::mt19937 rng(7);
    Trajectory t = ewm_test::random_trajectory(rng, 12);
    // canonicalize as the parser would
    for (auto& s : t.steps)
        for (Pose* p : {&s.left, &s.right})
            for (double& a : p->orientation) a = wrap_angle(a);

    std::string csv = serialize_trajectory(t);
    Trajectory back = from_csv(csv);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(back.steps[i].timestamp == t.steps[i].timestamp);
        CHECK(back.steps[i].flatten() == t.steps[i].flatten());
    }
    // and a canonically formatted file reproduces itself
    CHECK(serialize_trajectory(back) == csv);
}

TEST_CASE("motion_deltas basics") {
    SECTION("constant trajectory gives zero deltas") {
        Trajectory t;
        for (int i = 0; i < 4; ++i) {
            DualArmStep s;
            s.timestamp = i;
            s.left.position = {0.3, -0.2, 0.5};
            t.steps.push_back(s);
        }
        for (const auto& d : motion_deltas(t, Arm::Left)) {
            CHECK(d.dp == std::array<double, 3>{0, 0, 0});
            CHECK(d.dr == std::array<double, 3>{0, 0, 0});
        }
    }
    SECTION("unit x step") {
        Trajectory t;
        DualArmStep a, b;
        a.timestamp = 0;
        b.timestamp = 1;
        b.left.position = {1, 0, 0};
        t.steps = {a, b};
        auto deltas = motion_deltas(t, Arm::Left);
        REQUIRE(deltas.size() == 1);
        CHECK(deltas[0].dp == std::array<double, 3>{1, 0, 0});
    }
    SECTION("too short") {
        Trajectory t;
        t.steps.resize(1);
        REQUIRE_THROWS_WITH(motion_deltas(t, Arm::Left),
                            Catch::Matchers::ContainsSubstring("too short"));
    }
}

TEST_CASE("motion_deltas matches loop-based subtraction on random input") {
    std::mt19937 rng(11);
    Trajectory t = ewm_test::random_trajectory(rng, 10);
    auto deltas = motion_deltas(t, Arm::Right);
    REQUIRE(deltas.size() == 9);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            double expect =
                t.steps[i + 1].right.position[c] - t.steps[i].right.position[c];
            CHECK(deltas[i].dp[c] == expect);
            double raw = t.steps[i + 1].right.orientation[c] - t.steps[i].right.orientation[c];
            CHECK(deltas[i].dr[c] == Catch::Approx(wrap_angle(raw)).margin(0));
        }
    }
}

TEST_CASE("motion_deltas of a reversed trajectory are negated and reversed") {
    std::mt19937 rng(13);
    Trajectory t = ewm_test::random_trajectory(rng, 8);
    Trajectory rev = t;
    std::reverse(rev.steps.begin(), rev.steps.end());
    for (std::size_t i = 0; i < rev.steps.size(); ++i) rev.steps[i].timestamp = double(i);

    auto fwd = motion_deltas(t, Arm::Left);
    auto bwd = motion_deltas(rev, Arm::Left);
    REQUIRE(fwd.size() == bwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        const auto& f = fwd[i];
        const auto& b = bwd[bwd.size() - 1 - i];
        for (int c = 0; c < 3; ++c) {
            CHECK(b.dp[c] == Catch::Approx(-f.dp[c]).margin(1e-15));
            CHECK(wrap_angle(b.dr[c] + f.dr[c]) == Catch::Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("delta positions telescope to the endpoint difference") {
    std::mt19937 rng(17);
    Trajectory t = ewm_test::random_trajectory(rng, 25);
    auto deltas = motion_deltas(t, Arm::Left);
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        for (const auto& d : deltas) sum += d.dp[c];
        double expect = t.steps.back().left.position[c] - t.steps.front().left.position[c];
        CHECK(sum == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("orientation deltas are wrapped into (-pi, pi]") {
    Trajectory t;
    DualArmStep a, b;
    a.timestamp = 0;
    b.timestamp = 1;
    a.left.orientation = {3.0, 0, 0};
    b.left.orientation = {-3.0, 0, 0};  // raw difference -6.0, wrapped ~ +0.283
    t.steps = {a, b};
    auto deltas = motion_deltas(t, Arm::Left);
    CHECK(deltas[0].dr[0] == Catch::Approx(2 * std::numbers::pi - 6.0).epsilon(1e-12));
}

TEST_CASE("kinematic_profile on uniform straight-line motion") {
    Trajectory t;
    for (int i = 0; i < 5; ++i) {
        DualArmStep s;
        s.timestamp = i;
        s.left.position = {0.1 * i, 0, 0};
        t.steps.push_back(s);
    }
    KinematicProfile p = kinematic_profile(t, Arm::Left);
    REQUIRE(p.speeds.size() == 4);
    REQUIRE(p.accelerations.size() == 3);
    for (double v : p.speeds) CHECK(v == Catch::Approx(0.1).epsilon(1e-12));
    for (double a : p.accelerations) CHECK(a == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("kinematic_profile of a stationary trajectory is all zeros") {
    Trajectory t;
    for (int i = 0; i < 4; ++i) {
        DualArmStep s;
        s.timestamp = i * 0.5;
        s.left.position = {1, 2, 3};
        t.steps.push_back(s);
    }
    KinematicProfile p = kinematic_profile(t, Arm::Left);
    for (double v : p.speeds) CHECK(v == 0.0);
}

TEST_CASE("kinematic_profile matches hand-computed finite differences") {
    // 6 steps, non-uniform timestamps
    // positions on x: 0, 1, 3, 3, 7, 8 at t = 0, 1, 2, 4, 5, 7
    Trajectory t;
    const double xs[] = {0, 1, 3, 3, 7, 8};
    const double ts[] = {0, 1, 2, 4, 5, 7};
    for (int i = 0; i < 6; ++i) {
        DualArmStep s;
        s.timestamp = ts[i];
        s.left.position = {xs[i], 0, 0};
        t.steps.push_back(s);
    }
    KinematicProfile p = kinematic_profile(t, Arm::Left);
    // speeds: 1/1, 2/1, 0/2, 4/1, 1/2
    const double v[] = {1, 2, 0, 4, 0.5};
    REQUIRE(p.speeds.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(p.speeds[i] == Catch::Approx(v[i]).epsilon(1e-12));
    // accelerations: (2-1)/(2-1)=1, (0-2)/(4-2)=-1, (4-0)/(5-4)=4, (0.5-4)/(7-5)=-1.75
    const double a[] = {1, -1, 4, -1.75};
    REQUIRE(p.accelerations.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(p.accelerations[i] == Catch::Approx(a[i]).epsilon(1e-12));
}

TEST_CASE("kinematic_profile is invariant under rigid translation") {
    std::mt19937 rng(23);
    Trajectory t = ewm_test::random_trajectory(rng, 9);
    Trajectory shifted = t;
    for (auto& s : shifted.steps)
        for (Pose* p : {&s.left, &s.right})
            for (int c = 0; c < 3; ++c) p->position[c] += 10.0 * (c + 1);
    KinematicProfile a = kinematic_profile(t, Arm::Left);
    KinematicProfile b = kinematic_profile(shifted, Arm::Left);
    for (std::size_t i = 0; i < a.speeds.size(); ++i)
        CHECK(a.speeds[i] == Catch::Approx(b.speeds[i]).margin(1e-12));
}

TEST_CASE("kinematic_profile rejects too-short trajectories") {
    Trajectory t;
    t.steps.resize(1);
    t.steps[0].timestamp = 0;
    REQUIRE_THROWS_WITH(kinematic_profile(t, Arm::Left),
                        Catch::Matchers::ContainsSubstring("profile undefined"));
}

TEST_CASE("parse_trajectory reads files and honors the arm selector") {
    TempDir dir("traj");
    std::string body = std::string(kTrajectoryHeader) + "\n";
    body += "0,1,2,3,0.1,0.2,0.3,0.5,4,5,6,-0.1,-0.2,-0.3,0.25\n";
    body += "1,1,2,3,0.1,0.2,0.3,0.5,4,5,6,-0.1,-0.2,-0.3,0.25\n";
    auto path = dir.path / "t.csv";
    ewm_test::write_file(path, body);

    Trajectory both = parse_trajectory(path.string(), ArmSelect::Both);
    CHECK(both.steps[0].right.position == std::array<double, 3>{4, 5, 6});

    Trajectory left_only = parse_trajectory(path.string(), ArmSelect::Left);
    CHECK(left_only.steps[0].left.position == std::array<double, 3>{1, 2, 3});
    CHECK(left_only.steps[0].right.position == std::array<double, 3>{0, 0, 0});

    REQUIRE_THROWS_WITH(parse_trajectory((dir.path / "missing.csv").string()),
                        Catch::Matchers::ContainsSubstring("cannot open"));
}
