#include "mauav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

using namespace mauav;

namespace {

bool mentions(const std::vector<std::string>& list, const std::string& needle) {
    return std::any_of(list.begin(), list.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

std::filesystem::path bundled() { return std::filesystem::path(MAUAV_SOURCE_DIR) / "scenarios" / "paper_default.scn"; }

std::vector<std::string> parse_errors(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        auto v = e.violations();
        v.push_back(e.what());
        return v;
    }
    return {};
}

}  // namespace

TEST(Units, Conversions) {
    EXPECT_NEAR(dbm_to_watts(-110.0) / 1e-14, 1.0, 1e-12);
    EXPECT_NEAR(db_to_linear(-60.0) / 1e-6, 1.0, 1e-12);
    EXPECT_NEAR(watts_to_dbm(1e-14), -110.0, 1e-10);
    EXPECT_NEAR(linear_to_db(1e-6), -60.0, 1e-10);
    EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
}

TEST(Load, BundledFile) {
    const Scenario s = load_scenario(bundled());
    EXPECT_EQ(s.user_count(), 3);
    EXPECT_DOUBLE_EQ(s.max_power, 3.0);
    EXPECT_DOUBLE_EQ(s.altitude, 100.0);
    EXPECT_DOUBLE_EQ(s.duration, 40.0);
    for (double n : s.noise_power) EXPECT_NEAR(n / 1e-14, 1.0, 1e-12);
    EXPECT_NEAR(s.ref_gain / 1e-6, 1.0, 1e-12);
    EXPECT_NEAR(s.min_spacing, s.wavelength / 2, 1e-15);
    EXPECT_NEAR(s.array_length, 8 * s.wavelength, 1e-15);
    EXPECT_DOUBLE_EQ(s.v_min, 1.0);
    EXPECT_DOUBLE_EQ(s.v_max, 20.0);
    EXPECT_DOUBLE_EQ(s.slot_length(), 4.0);
    EXPECT_TRUE(validate(s).empty());
}

TEST(Load, MatchesBuiltInDefault) {
    const Scenario a = load_scenario(bundled());
    const Scenario b = paper_default();
    EXPECT_EQ(format_scenario(a), format_scenario(b));
}

TEST(Load, MissingFileThrows) {
    EXPECT_THROW(load_scenario("/nonexistent/file.scn"), ScenarioError);
}

TEST(Validate, DefaultIsValid) { EXPECT_TRUE(validate(paper_default()).empty()); }

TEST(Validate, ArrayTooShort) {
    Scenario s = paper_default();
    s.antennas = 5;
    s.min_spacing = 0.05;
    s.array_length = 0.1;
    EXPECT_TRUE(mentions(validate(s), "(M-1)*d_min exceeds L"));
}

TEST(Validate, NegativePowerNamesField) {
    Scenario s = paper_default();
    s.max_power = -1.0;
    const auto v = validate(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(mentions(v, "P_max"));
}

TEST(Validate, EndpointReachability) {
    Scenario s = paper_default();
    s.q_init = Vec2(0, 0);
    s.q_final = Vec2(1000, 0);
    EXPECT_TRUE(mentions(validate(s), "endpoint reachability"));
}

TEST(Validate, ZeroMinimumSpeed) {
    Scenario s = paper_default();
    s.v_min = 0.0;
    EXPECT_TRUE(mentions(validate(s), "V_min must be positive"));
}

TEST(Validate, ListsEveryViolation) {
    Scenario s = paper_default();
    s.max_power = 0.0;
    s.altitude = -5.0;
    s.slots = 0;
    s.noise_power[1] = 0.0;
    EXPECT_EQ(validate(s).size(), 4u);
    try {
        require_valid(s);
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.violations().size(), 4u);
    }
}

TEST(Parse, RoundTrip) {
    Scenario s = with_random_users(paper_default(), 5, 500.0, 17);
    s.noise_power[2] = 3.3e-13;
    s.fix_endpoints = false;
    s.antennas = 6;
    const Scenario back = parse_scenario(format_scenario(s));
    EXPECT_EQ(format_scenario(back), format_scenario(s));
    ASSERT_EQ(back.user_count(), 5);
    for (int k = 0; k < 5; ++k) {
        EXPECT_EQ(back.users[k], s.users[k]);
        EXPECT_EQ(back.noise_power[k], s.noise_power[k]);
    }
    EXPECT_FALSE(back.fix_endpoints);
}

TEST(Parse, SaveAndLoad) {
    const auto path = std::filesystem::temp_directory_path() / "mauav_roundtrip.scn";
    save_scenario(paper_default(), path);
    EXPECT_EQ(format_scenario(load_scenario(path)), format_scenario(paper_default()));
    std::filesystem::remove(path);
}

TEST(Parse, ScalarNoiseBroadcast) {
    std::string text = format_scenario(paper_default());
    const auto pos = text.find("noise = ");
    text.replace(pos, text.find('\n', pos) - pos, "noise = -100 dBm");
    const Scenario s = parse_scenario(text);
    ASSERT_EQ(s.noise_power.size(), 3u);
    for (double n : s.noise_power) EXPECT_NEAR(n / 1e-13, 1.0, 1e-12);
}

TEST(Parse, RandomUsersAreDeterministic) {
    std::string text = format_scenario(paper_default());
    const auto a = text.find("position = ");
    const auto b = text.find('\n', text.find("noise = "));
    text.replace(a, b - a, "random = 4\narea = 500\nseed = 9\nnoise = -110 dBm");
    const Scenario s1 = parse_scenario(text), s2 = parse_scenario(text);
    ASSERT_EQ(s1.user_count(), 4);
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(s1.users[k], s2.users[k]);
        EXPECT_GE(s1.users[k].minCoeff(), 0.0);
        EXPECT_LE(s1.users[k].maxCoeff(), 500.0);
    }
}

TEST(Parse, Malformed) {
    EXPECT_FALSE(parse_errors("[users]\nposition = 1\n").empty());
    EXPECT_FALSE(parse_errors("[bogus]\n").empty());
    std::string text = format_scenario(paper_default());
    EXPECT_FALSE(parse_errors(text + "\n[radio]\nunknown_key = 3\n").empty());
    std::string unitless = text;
    const auto pos = unitless.find("max_power = 3 W");
    unitless.replace(pos, 15, "max_power = 3");
    EXPECT_TRUE(mentions(parse_errors(unitless), "explicit unit"));
    std::string nonfinite = text;
    const auto alt = nonfinite.find("altitude = 100");
    nonfinite.replace(alt, 14, "altitude = inf");
    EXPECT_FALSE(parse_errors(nonfinite).empty());
}

TEST(Parse, ValidationFailureListsViolations) {
    std::string text = format_scenario(paper_default());
    const auto pos = text.find("max_power = 3 W");
    text.replace(pos, 15, "max_power = -1 W");
    EXPECT_TRUE(mentions(parse_errors(text), "P_max"));
}

TEST(Feasibility, TrajectoryLimits) {
    Scenario s = paper_default();
    s.slots = 3;
    s.duration = 12.0;
    s.q_init = Vec2(0, 0);
    s.q_final = Vec2(120, 0);
    Trajectory q;
    for (int n = 0; n <= 3; ++n) q.q.emplace_back(40.0 * n, 0.0);  // 10 m/s
    EXPECT_TRUE(check_trajectory(s, q).empty());

    Trajectory fast = q;
    fast.q[2] = Vec2(120, 0);
    fast.q[3] = Vec2(120, 0);
    EXPECT_FALSE(check_trajectory(s, fast).empty());  // 20 m/s jump then hover

    Trajectory moved = q;
    moved.q[3] = Vec2(121, 0);
    EXPECT_FALSE(check_trajectory(s, moved).empty());  // end point not reached
    s.fix_endpoints = false;
    EXPECT_TRUE(check_trajectory(s, moved).empty());
}

TEST(Feasibility, FirstSlotSpeedUnconstrained) {
    Scenario s = paper_default();
    s.slots = 2;
    s.duration = 8.0;
    s.q_init = Vec2(0, 0);
    s.q_final = Vec2(4 + 40, 0);
    Trajectory q;
    q.q = {Vec2(0, 0), Vec2(4, 0), Vec2(44, 0)};  // 1 m/s then 10 m/s; no acceleration limit before n = 3
    EXPECT_TRUE(check_trajectory(s, q).empty());
}

TEST(Feasibility, LayoutAndPower) {
    const Scenario s = paper_default();
    AntennaLayout x;
    Eigen::VectorXd row(4);
    row << 0.0, 0.05, 0.1, 0.15;
    x.x.assign(s.slots, row);
    EXPECT_TRUE(check_layout(s, x).empty());
    x.x[3][2] = 0.095;
    EXPECT_FALSE(check_layout(s, x).empty());
    x.x[3] = row;
    x.x[5][3] = s.array_length + 1e-12;
    EXPECT_FALSE(check_layout(s, x).empty());

    BeamformerSet w;
    w.w.assign(s.slots, std::vector<Eigen::VectorXcd>(3, Eigen::VectorXcd::Constant(4, std::sqrt(0.25))));
    EXPECT_DOUBLE_EQ(w.slot_power(0), 3.0);
    EXPECT_TRUE(check_beamformers(s, w).empty());
    w.w[2][0] *= 1.01;
    EXPECT_FALSE(check_beamformers(s, w).empty());
}
