#include "mauav/ao_driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "mauav/channel.hpp"

namespace mauav {

AntennaLayout uniform_layout(const Scenario& sc) {
    const double pitch = std::max(0.5 * sc.wavelength, sc.min_spacing);
    Eigen::VectorXd row(sc.antennas);
    for (int m = 0; m < sc.antennas; ++m) row[m] = m * pitch;
    AntennaLayout x;
    x.x.assign(sc.slots, row);
    return x;
}

namespace {

Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// N equal chords of length c on a circle through a and b.
Trajectory arc(const Vec2& a, const Vec2& b, int slots, double chord) {
    const double dist = (b - a).norm();
    const double pi = std::numbers::pi;
    auto ratio = [&](double phi) { return std::sin(slots * phi / 2) / std::sin(phi / 2); };
    double phi = 2.0 * pi / slots;
    if (dist > 0.0) {
        double lo = 1e-12, hi = 2.0 * pi / slots;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ratio(mid) > dist / chord ? lo : hi) = mid;
        }
        phi = 0.5 * (lo + hi);
    }
    const double radius = chord / (2.0 * std::sin(phi / 2));
    const double sweep = slots * phi;
    const Vec2 u = dist > 0.0 ? Vec2((b - a) / dist) : Vec2(1.0, 0.0);
    const Vec2 normal(-u.y(), u.x());

    Trajectory best;
    double best_err = std::numeric_limits<double>::infinity();
    for (double side : {1.0, -1.0}) {
        const Vec2 center = 0.5 * (a + b) + side * normal * radius * std::cos(sweep / 2);
        for (double dir : {1.0, -1.0}) {
            Trajectory t;
            for (int n = 0; n <= slots; ++n) t.q.push_back(center + rotate(a - center, dir * n * phi));
            const double err = (t.q.back() - b).norm();
            if (err < best_err) {
                best_err = err;
                best = std::move(t);
            }
        }
    }
    best.q.front() = a;
    best.q.back() = b;
    return best;
}

}  // namespace

Trajectory initial_trajectory(const Scenario& sc) {
    const int slots = sc.slots;
    const double tau = sc.slot_length();
    const Vec2 span = sc.q_final - sc.q_init;
    const double dist = span.norm();
    Trajectory t;
    if (!sc.fix_endpoints) {
        const Vec2 dir = dist > 0.0 ? Vec2(span / dist) : Vec2(1.0, 0.0);
        const double speed = std::clamp(dist / sc.duration, sc.v_min, sc.v_max);
        for (int n = 0; n <= slots; ++n) t.q.push_back(sc.q_init + n * tau * speed * dir);
    } else if (dist / sc.duration >= sc.v_min) {
        for (int n = 0; n <= slots; ++n) t.q.push_back(sc.q_init + span * (static_cast<double>(n) / slots));
        t.q.back() = sc.q_final;
    } else {
        if (slots < 2) throw ScenarioError("initial trajectory: a single slot cannot satisfy V_min");
        const double chord = sc.v_min * tau * (1.0 + 1e-9);
        t = arc(sc.q_init, sc.q_final, slots, chord);
    }
    const auto bad = check_trajectory(sc, t);
    if (!bad.empty()) throw ScenarioError("initial trajectory is infeasible", bad);
    return t;
}

Iterate initialize(const Scenario& sc) {
    require_valid(sc);
    Iterate it;
    it.q = initial_trajectory(sc);
    it.x = uniform_layout(sc);
    for (int s = 0; s < sc.slots; ++s) it.w.w.push_back(mrt_beamformers(sc, it.q.q[s + 1], it.x.x[s]));
    const auto bad = check_layout(sc, it.x);
    if (!bad.empty()) throw ScenarioError("uniform layout does not fit the array", bad);
    return it;
}

const char* to_string(Block b) {
    switch (b) {
        case Block::Beamforming: return "beamforming";
        case Block::Trajectory: return "trajectory";
        case Block::Antenna: return "antenna";
    }
    return "unknown";
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::Epsilon: return "epsilon";
        case StopReason::MaxIterations: return "max_iter";
        case StopReason::Failure: return "failure";
    }
    return "unknown";
}

namespace {

std::vector<std::string> audit(const Scenario& sc, const Iterate& it) {
    auto v = check_trajectory(sc, it.q);
    for (auto& s : check_layout(sc, it.x)) v.push_back(std::move(s));
    for (auto& s : check_beamformers(sc, it.w)) v.push_back(std::move(s));
    return v;
}

BlockRecord run_block(Block block, const Scenario& sc, Iterate& it, const AoOptions& opt, RankStats& rank) {
    BlockRecord rec;
    rec.block = block;
    rec.ran = true;
    const double before = total_rate(sc, it.q, it.x, it.w);
    try {
        switch (block) {
            case Block::Beamforming: {
                BeamformingOptions bo;
                bo.solver = opt.solver;
                bo.jobs = opt.jobs;
                bo.seed = opt.seed;
                auto rep = update_beamformers(sc, it.x, it.q, it.w, bo);
                rec.solved = !rep.all_failed();
                int accepted = 0;
                for (bool a : rep.accepted) accepted += a ? 1 : 0;
                rec.accepted = accepted > 0;
                rec.status = std::to_string(accepted) + "/" + std::to_string(sc.slots) + " slots";
                if (!rec.solved && !rep.messages.empty()) rec.status += "; " + rep.messages.front();
                rank.matrices += static_cast<int>(rep.eigen_ratios.size());
                rank.inexact += rep.inexact;
                rank.fallbacks += rep.fallback_used;
                rank.ratios.insert(rank.ratios.end(), rep.eigen_ratios.begin(), rep.eigen_ratios.end());
                it.w = std::move(rep.w);
                break;
            }
            case Block::Trajectory: {
                auto up = update_trajectory(sc, it.w, it.x, it.q, opt.solver);
                rec.solved = up.solved;
                rec.accepted = up.accepted && up.step > 0.0;
                char buf[64];
                std::snprintf(buf, sizeof buf, "step %.4g", up.accepted ? up.step : 0.0);
                rec.status = std::string(conic::to_string(up.status)) + ", " + buf;
                it.q = std::move(up.q);
                break;
            }
            case Block::Antenna: {
                auto up = update_antennas(sc, it.w, it.q, it.x, opt.solver, opt.jobs);
                rec.solved = !up.all_failed();
                int accepted = 0;
                for (bool a : up.accepted) accepted += a ? 1 : 0;
                rec.accepted = accepted > 0;
                rec.status = std::to_string(accepted) + "/" + std::to_string(sc.slots) + " slots";
                it.x = std::move(up.x);
                break;
            }
        }
    } catch (const std::exception& e) {
        rec.solved = false;
        rec.accepted = false;
        rec.status = e.what();
    }
    rec.delta = total_rate(sc, it.q, it.x, it.w) - before;
    return rec;
}

}  // namespace

namespace {

void merge_prefix(AoTrace& into, const AoTrace& from) {
    into.rank.matrices += from.rank.matrices;
    into.rank.inexact += from.rank.inexact;
    into.rank.fallbacks += from.rank.fallbacks;
    into.rank.ratios.insert(into.rank.ratios.begin(), from.rank.ratios.begin(), from.rank.ratios.end());
    into.feasibility_violations.insert(into.feasibility_violations.begin(), from.feasibility_violations.begin(),
                                       from.feasibility_violations.end());
}

}  // namespace

const char* to_string(MaStart s) {
    switch (s) {
        case MaStart::Default: return "default";
        case MaStart::FpaResult: return "fpa_result";
        case MaStart::Both: return "both";
    }
    return "unknown";
}

AoResult optimize(const Scenario& sc, const AoOptions& options) {
    const Iterate start = initialize(sc);
    if (options.fpa || options.ma_start == MaStart::Default) return optimize(sc, start, options);

    AoOptions fixed = options;
    fixed.fpa = true;
    const AoResult pre = optimize(sc, start, fixed);
    AoResult warm = optimize(sc, pre.best, options);
    warm.trace.start = MaStart::FpaResult;
    warm.trace.warm_start = pre.trace.iterations;
    warm.trace.warm_start_reason = pre.trace.reason;
    merge_prefix(warm.trace, pre.trace);
    if (options.ma_start == MaStart::FpaResult) return warm;

    AoResult cold = optimize(sc, start, options);
    const bool keep_cold = cold.trace.reason != StopReason::Failure &&
                           cold.trace.final_objective() > warm.trace.final_objective();
    AoResult& kept = keep_cold ? cold : warm;
    const AoResult& other = keep_cold ? warm : cold;
    kept.trace.alternative_objective = other.trace.final_objective();
    merge_prefix(kept.trace, other.trace);
    return std::move(kept);
}

AoResult optimize(const Scenario& sc, const Iterate& start, const AoOptions& options) {
    require_valid(sc);
    if (!(options.epsilon > 0.0)) throw std::invalid_argument("optimize: epsilon must be positive");
    if (options.max_iterations < 1) throw std::invalid_argument("optimize: max_iterations must be at least 1");

    AoResult res;
    Iterate it = start;
    AoTrace& trace = res.trace;
    double rate = total_rate(sc, it.q, it.x, it.w);
    trace.initial_objective = rate;
    trace.feasibility_violations.push_back(audit(sc, it));
    res.best = it;
    double best_rate = rate;
    int failures = 0;

    for (int i = 1; i <= options.max_iterations; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iteration = i;
        bool any_solved = false;
        for (Block b : options.order) {
            if (b == Block::Antenna && options.fpa) {
                BlockRecord skip;
                skip.block = b;
                skip.status = "skipped (fpa)";
                rec.blocks.push_back(skip);
                continue;
            }
            rec.blocks.push_back(run_block(b, sc, it, options, trace.rank));
            any_solved = any_solved || rec.blocks.back().solved;
        }
        const double next = total_rate(sc, it.q, it.x, it.w);
        rec.objective = next;
        rec.gain = next - rate;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        trace.iterations.push_back(rec);
        trace.feasibility_violations.push_back(audit(sc, it));
        rate = next;
        if (next >= best_rate) {
            best_rate = next;
            res.best = it;
        }

        failures = any_solved ? 0 : failures + 1;
        if (failures >= 3) {
            trace.reason = StopReason::Failure;
            trace.diagnostic = "every block failed in three consecutive iterations";
            for (const auto& blk : rec.blocks)
                if (blk.ran) trace.diagnostic += std::string("; ") + to_string(blk.block) + ": " + blk.status;
            break;
        }
        if (rec.gain <= options.epsilon && any_solved) {
            trace.reason = StopReason::Epsilon;
            break;
        }
        trace.reason = StopReason::MaxIterations;
    }
    return res;
}

}  // namespace mauav
