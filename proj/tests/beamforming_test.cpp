#include "mauav/beamforming.hpp"

#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "mauav/ao_driver.hpp"
#include "mauav/channel.hpp"
#include "mauav/sca_bounds.hpp"

using namespace mauav;

namespace {

Eigen::VectorXcd random_vector(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::VectorXcd v(m);
    for (int i = 0; i < m; ++i) v[i] = {n(rng), n(rng)};
    return v;
}

Scenario one_user_one_slot() {
    Scenario s = paper_default();
    s.users = {Vec2(100.0, 250.0)};
    s.noise_power = {1e-14};
    s.slots = 1;
    s.duration = 4.0;
    s.q_init = Vec2(0, 250);
    s.q_final = Vec2(40, 250);
    return s;
}

Scenario short_default(int slots) {
    Scenario s = paper_default();
    s.slots = slots;
    s.duration = 4.0 * slots;
    s.q_final = s.q_init + Vec2(40.0 * slots, 0.0);
    return s;
}

double relaxed_rate(const Scenario& sc, const Iterate& it, int slot, const std::vector<Eigen::MatrixXcd>& w) {
    return relaxed_slot_rate(channel_covariances(sc, it.q.q[slot + 1], it.x.x[slot]), w, sc.noise_power);
}

std::vector<Eigen::MatrixXcd> outer(const std::vector<Eigen::VectorXcd>& w) {
    std::vector<Eigen::MatrixXcd> out;
    for (const auto& v : w) out.push_back(v * v.adjoint());
    return out;
}

}  // namespace

TEST(RankOne, ExactOuterProduct) {
    std::mt19937_64 rng(4);
    const Eigen::VectorXcd v = random_vector(5, rng);
    const auto r = extract_rank_one(v * v.adjoint());
    EXPECT_FALSE(r.inexact);
    EXPECT_LE(r.reconstruction_error, 1e-10 * v.squaredNorm());
    const std::complex<double> phase = v.dot(r.w) / std::abs(v.dot(r.w));
    EXPECT_LE((r.w - phase * v).norm(), 1e-10 * v.norm());
}

TEST(RankOne, ZeroMatrix) {
    const auto r = extract_rank_one(Eigen::MatrixXcd::Zero(3, 3));
    EXPECT_FALSE(r.inexact);
    EXPECT_EQ(r.w.norm(), 0.0);
    EXPECT_EQ(r.eigen_ratio, 0.0);
}

TEST(RankOne, IdentityIsFlagged) {
    const auto r = extract_rank_one(Eigen::MatrixXcd::Identity(2, 2));
    EXPECT_TRUE(r.inexact);
    EXPECT_NEAR(r.eigen_ratio, 1.0, 1e-12);
    EXPECT_NEAR(r.reconstruction_error, 1.0, 1e-12);
    EXPECT_NEAR(r.w.squaredNorm(), 1.0, 1e-12);
}

TEST(RankOne, RejectsIndefinite) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(2, 2);
    w(1, 1) = -0.5;
    EXPECT_THROW(extract_rank_one(w), std::invalid_argument);
}

TEST(RankOne, ProjectionClampsNoise) {
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(3, 3);
    w(2, 2) = -1e-12;
    const Eigen::MatrixXcd p = project_psd(w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(p);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-15);
    EXPECT_NEAR((p - w).norm(), 1e-12, 1e-15);
}

TEST(RelaxedProgram, SingleUserClosedForm) {
    const Scenario sc = one_user_one_slot();
    const Iterate start = initialize(sc);
    const auto prog = build_p2i(sc, start.x, start.q, start.w);
    const auto sol = solve_p2i(prog);
    const auto link = link_geometry(sc, start.q.q[1], 0);
    const double closed = std::log2(1.0 + sc.max_power * sc.antennas * link.gain * link.gain / sc.noise_power[0]);
    EXPECT_NEAR(sol.surrogate_bits, closed, 1e-4);

    const Eigen::MatrixXcd& w = sol.matrices[0][0];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(w);
    const auto ev = eig.eigenvalues();
    EXPECT_GE(ev[3], 1e6 * std::max(ev[2], 1e-300));
    EXPECT_LE(w.trace().real(), sc.max_power + 1e-8);
}

TEST(RelaxedProgram, SandwichAroundPreviousIterate) {
    const Scenario sc = short_default(1);
    const Iterate it = initialize(sc);
    const auto prog = build_p2i(sc, it.x, it.q, it.w);
    const auto sol = solve_p2i(prog);
    const double before = relaxed_rate(sc, it, 0, outer(it.w.w[0]));
    const double after = relaxed_rate(sc, it, 0, sol.matrices[0]);
    // Feasible at W_prev with the surrogate tight there, and a lower bound everywhere.
    EXPECT_GE(sol.surrogate_bits, before - 1e-6);
    EXPECT_GE(after, sol.surrogate_bits - 1e-6);
}

TEST(RelaxedProgram, TightAtFixedPoint) {
    const Scenario sc = short_default(1);
    Iterate it = initialize(sc);
    BeamformingOptions opts;
    for (int i = 0; i < 40; ++i) it.w = update_beamformers(sc, it.x, it.q, it.w, opts).w;
    const auto sol = solve_p2i(build_p2i(sc, it.x, it.q, it.w));
    const double exact = slot_rate(sc, it.q.q[1], it.x.x[0], it.w.w[0]);
    EXPECT_NEAR(sol.surrogate_bits, exact, 1e-4 * std::max(1.0, exact));
}

TEST(RelaxedProgram, DefaultScenarioPsdAndPower) {
    const Scenario sc = paper_default();
    const Iterate it = initialize(sc);
    const auto prog = build_p2i(sc, it.x, it.q, it.w);
    const auto sol = conic::solve(prog.program);
    ASSERT_TRUE(sol.ok()) << sol.message;
    const auto raw = prog.matrices(sol);
    ASSERT_EQ(raw.size(), static_cast<std::size_t>(sc.slots));
    for (const auto& slot : raw) {
        double power = 0.0;
        for (const auto& w : slot) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(w);
            EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
            power += w.trace().real();
        }
        EXPECT_LE(power, sc.max_power + 1e-8);
    }
}

TEST(RelaxedProgram, SlotsDecompose) {
    const Scenario sc = short_default(3);
    const Iterate it = initialize(sc);
    const auto joint = solve_p2i(build_p2i(sc, it.x, it.q, it.w));
    double separate = 0.0;
    for (int s = 0; s < sc.slots; ++s) separate += solve_p2i(build_p2i(sc, it.x, it.q, it.w, {s})).surrogate_bits;
    EXPECT_NEAR(joint.surrogate_bits, separate, 1e-6 * std::max(1.0, std::abs(separate)));
}

TEST(RelaxedProgram, UnitNoiseStillSpendsPower) {
    Scenario sc = short_default(2);
    sc.noise_power.assign(3, 1.0);
    const Iterate it = initialize(sc);
    const auto sol = solve_p2i(build_p2i(sc, it.x, it.q, it.w));
    EXPECT_LT(sol.surrogate_bits, 1e-6);
    double best = 0.0;
    for (const auto& slot : sol.matrices) {
        double p = 0.0;
        for (const auto& w : slot) p += w.trace().real();
        best = std::max(best, p);
    }
    EXPECT_NEAR(best, sc.max_power, 1e-6);
}

TEST(Update, MonotoneAndFeasible) {
    const Scenario sc = paper_default();
    Iterate it = initialize(sc);
    for (int round = 0; round < 3; ++round) {
        const auto rep = update_beamformers(sc, it.x, it.q, it.w);
        EXPECT_GE(rep.rate_after, rep.rate_before - 1e-6);
        EXPECT_NEAR(rep.rate_after, total_rate(sc, it.q, it.x, rep.w), 1e-9);
        EXPECT_TRUE(check_beamformers(sc, rep.w).empty());
        EXPECT_FALSE(rep.all_failed());
        // Switched-off beams are not rank-tested.
        EXPECT_LE(rep.eigen_ratios.size(), static_cast<std::size_t>(sc.slots * sc.user_count()));
        EXPECT_FALSE(rep.eigen_ratios.empty());
        it.w = rep.w;
    }
}

TEST(Update, SingleUserMatchesClosedForm) {
    const Scenario sc = one_user_one_slot();
    const Iterate it = initialize(sc);
    const auto rep = update_beamformers(sc, it.x, it.q, it.w);
    const auto link = link_geometry(sc, it.q.q[1], 0);
    const double closed = std::log2(1.0 + sc.max_power * sc.antennas * link.gain * link.gain / sc.noise_power[0]);
    EXPECT_NEAR(rep.rate_after, closed, 1e-4 * closed);
    EXPECT_EQ(rep.inexact, 0);
}

TEST(Update, ParallelMatchesSerial) {
    const Scenario sc = short_default(4);
    const Iterate it = initialize(sc);
    BeamformingOptions serial, parallel;
    parallel.jobs = 3;
    const auto a = update_beamformers(sc, it.x, it.q, it.w, serial);
    const auto b = update_beamformers(sc, it.x, it.q, it.w, parallel);
    EXPECT_EQ(a.rate_after, b.rate_after);
    EXPECT_EQ(a.accepted, b.accepted);
}
