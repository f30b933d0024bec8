#include "mauav/ao_driver.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "mauav/channel.hpp"

using namespace mauav;

namespace {

Scenario short_default() {
    Scenario s = paper_default();
    s.slots = 4;
    s.duration = 16.0;
    s.q_final = s.q_init + Vec2(200.0, 0.0);
    return s;
}

void expect_monotone(const AoTrace& tr) {
    double prev = tr.initial_objective;
    for (const auto& it : tr.iterations) {
        EXPECT_GE(it.objective, prev - 1e-6) << "iteration " << it.iteration;
        prev = it.objective;
    }
}

}  // namespace

TEST(Initialize, UniformHalfWavelengthLayout) {
    const Scenario sc = paper_default();
    const Iterate it = initialize(sc);
    ASSERT_EQ(it.x.x.size(), static_cast<std::size_t>(sc.slots));
    Eigen::VectorXd expect(4);
    expect << 0.0, 0.05, 0.10, 0.15;
    for (const auto& row : it.x.x) EXPECT_LE((row - expect).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(check_layout(sc, it.x).empty());
}

TEST(Initialize, FullPowerEverySlot) {
    const Scenario sc = paper_default();
    const Iterate it = initialize(sc);
    for (int s = 0; s < sc.slots; ++s) EXPECT_NEAR(it.w.slot_power(s), sc.max_power, 1e-12);
    EXPECT_TRUE(check_beamformers(sc, it.w).empty());
}

TEST(Initialize, StraightConstantSpeedTrajectory) {
    const Scenario sc = paper_default();
    const Iterate it = initialize(sc);
    EXPECT_EQ(it.q.q.front(), sc.q_init);
    EXPECT_LE((it.q.q.back() - sc.q_final).norm(), 1e-9);
    const double speed = (it.q.q[1] - it.q.q[0]).norm() / sc.slot_length();
    EXPECT_GE(speed, sc.v_min);
    EXPECT_LE(speed, sc.v_max);
    for (int n = 1; n <= sc.slots; ++n)
        EXPECT_NEAR((it.q.q[n] - it.q.q[n - 1]).norm() / sc.slot_length(), speed, 1e-9);
    EXPECT_TRUE(check_trajectory(sc, it.q).empty());
}

TEST(Initialize, ShortHopUsesArc) {
    Scenario sc = paper_default();
    sc.q_final = sc.q_init + Vec2(10.0, 0.0);  // straight line would be slower than V_min
    const Iterate it = initialize(sc);
    EXPECT_TRUE(check_trajectory(sc, it.q).empty());
    EXPECT_LE((it.q.q.back() - sc.q_final).norm(), 1e-9);
}

TEST(Optimize, SingleIterationTrace) {
    const Scenario sc = short_default();
    AoOptions o;
    o.max_iterations = 1;
    o.ma_start = MaStart::Default;
    const auto r = optimize(sc, o);
    ASSERT_EQ(r.trace.iterations.size(), 1u);
    const auto& blocks = r.trace.iterations[0].blocks;
    ASSERT_EQ(blocks.size(), 3u);
    EXPECT_EQ(blocks[0].block, Block::Beamforming);
    EXPECT_EQ(blocks[1].block, Block::Trajectory);
    EXPECT_EQ(blocks[2].block, Block::Antenna);
    for (const auto& b : blocks) EXPECT_TRUE(b.ran);
    EXPECT_EQ(r.trace.reason, StopReason::MaxIterations);
}

TEST(Optimize, DefaultScenarioConvergesMonotonically) {
    const Scenario sc = paper_default();
    const auto r = optimize(sc);
    EXPECT_EQ(r.trace.reason, StopReason::Epsilon);
    EXPECT_LE(r.trace.iterations.size(), 30u);
    expect_monotone(r.trace);
    EXPECT_LE(r.trace.iterations.back().gain, 1e-3);
    for (const auto& v : r.trace.feasibility_violations) EXPECT_TRUE(v.empty());
    EXPECT_NEAR(total_rate(sc, r.best.q, r.best.x, r.best.w), r.trace.final_objective(), 1e-9);
}

TEST(Optimize, FpaKeepsUniformLayout) {
    const Scenario sc = short_default();
    AoOptions o;
    o.fpa = true;
    const auto r = optimize(sc, o);
    const AntennaLayout x0 = uniform_layout(sc);
    EXPECT_EQ(r.best.x.x, x0.x);
    for (const auto& it : r.trace.iterations) {
        ASSERT_EQ(it.blocks.size(), 3u);
        EXPECT_FALSE(it.blocks[2].ran);
    }
    expect_monotone(r.trace);
}

TEST(Optimize, MovableAtLeastFixed) {
    const Scenario sc = paper_default();
    AoOptions ma, fpa;
    fpa.fpa = true;
    const double a = optimize(sc, ma).trace.final_objective();
    const double b = optimize(sc, fpa).trace.final_objective();
    EXPECT_GE(a, b - 1e-6);
}

TEST(Optimize, BothStartsKeepsTheBetter) {
    const Scenario sc = with_random_users(short_default(), 3, 500.0, 2);
    AoOptions o;
    const auto both = optimize(sc, o);
    o.ma_start = MaStart::Default;
    const auto cold = optimize(sc, o);
    o.ma_start = MaStart::FpaResult;
    const auto warm = optimize(sc, o);
    const double best = std::max(cold.trace.final_objective(), warm.trace.final_objective());
    EXPECT_NEAR(both.trace.final_objective(), best, 1e-9);
    EXPECT_NEAR(both.trace.alternative_objective,
                std::min(cold.trace.final_objective(), warm.trace.final_objective()), 1e-9);
    EXPECT_EQ(warm.trace.start, MaStart::FpaResult);
    EXPECT_FALSE(warm.trace.warm_start.empty());
    EXPECT_GE(warm.trace.final_objective(), warm.trace.warm_start.back().objective - 1e-6);
}

TEST(Optimize, Deterministic) {
    const Scenario sc = short_default();
    const auto a = optimize(sc);
    const auto b = optimize(sc);
    EXPECT_EQ(a.trace.final_objective(), b.trace.final_objective());
    EXPECT_EQ(a.best.x.x, b.best.x.x);
}

TEST(Optimize, StarvedSolverAbortsAfterThreeFailures) {
    const Scenario sc = short_default();
    AoOptions o;
    o.ma_start = MaStart::Default;
    o.solver.max_newton_steps = 1;
    const auto r = optimize(sc, o);
    EXPECT_EQ(r.trace.reason, StopReason::Failure);
    EXPECT_EQ(r.trace.iterations.size(), 3u);
    EXPECT_FALSE(r.trace.diagnostic.empty());
    EXPECT_NEAR(r.trace.final_objective(), r.trace.initial_objective, 1e-6);
}

TEST(Optimize, RejectsBadOptions) {
    const Scenario sc = short_default();
    AoOptions o;
    o.epsilon = 0.0;
    EXPECT_THROW(optimize(sc, o), std::invalid_argument);
    o.epsilon = 1e-3;
    o.max_iterations = 0;
    EXPECT_THROW(optimize(sc, o), std::invalid_argument);
}
