#pragma once

#include <string>
#include <vector>

#include "mauav/antenna_opt.hpp"
#include "mauav/beamforming.hpp"
#include "mauav/scenario.hpp"
#include "mauav/trajectory_opt.hpp"

namespace mauav {

struct Iterate {
    BeamformerSet w;
    Trajectory q;
    AntennaLayout x;
};

// Uniform layout x_m = (m - 1) max(lambda/2, d_min) on every slot.
AntennaLayout uniform_layout(const Scenario& sc);

// Constant-speed trajectory from q_init. With fixed endpoints it is the straight segment when
// |q_final - q_init| / T >= V_min and an arc of equal chords otherwise; with free endpoints it
// heads towards q_final at max(V_min, |q_final - q_init| / T).
Trajectory initial_trajectory(const Scenario& sc);

// Q0, X0 as above and equal-power MRT beams. Throws ScenarioError if no such start
// satisfies the kinematic limits.
Iterate initialize(const Scenario& sc);

enum class Block { Beamforming, Trajectory, Antenna };
const char* to_string(Block b);

enum class StopReason { Epsilon, MaxIterations, Failure };
const char* to_string(StopReason r);

enum class MaStart { Default, FpaResult, Both };
const char* to_string(MaStart s);

struct AoOptions {
    double epsilon = 1e-3;  // bits
    int max_iterations = 30;
    bool fpa = false;
    // MA mode only. FpaResult runs the FPA schedule from the default start and begins the full
    // schedule at its best iterate; Both also runs from the default start and keeps the better.
    MaStart ma_start = MaStart::Both;
    std::vector<Block> order{Block::Beamforming, Block::Trajectory, Block::Antenna};
    int jobs = 1;
    std::uint64_t seed = 1;
    conic::SolverOptions solver;
};

struct BlockRecord {
    Block block = Block::Beamforming;
    bool ran = false;       // false when skipped (FPA mode)
    bool solved = false;    // at least one subproblem solved to optimality
    bool accepted = false;  // the block changed the iterate
    double delta = 0.0;     // exact-rate change, bits
    std::string status;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;  // exact total rate after the iteration
    double gain = 0.0;
    std::vector<BlockRecord> blocks;
    double seconds = 0.0;
};

struct RankStats {
    int matrices = 0;
    int inexact = 0;
    int fallbacks = 0;
    std::vector<double> ratios;
};

struct AoTrace {
    double initial_objective = 0.0;
    std::vector<IterationRecord> iterations;
    StopReason reason = StopReason::MaxIterations;
    std::string diagnostic;
    RankStats rank;
    // Start the returned run began from; Default unless an MA run used the FPA result.
    MaStart start = MaStart::Default;
    // FPA pre-phase of an MA run started from the FPA result; empty otherwise.
    std::vector<IterationRecord> warm_start;
    StopReason warm_start_reason = StopReason::MaxIterations;
    // Final objective of the discarded run under MaStart::Both.
    double alternative_objective = 0.0;
    // Every accepted iterate, including the initial point.
    std::vector<std::vector<std::string>> feasibility_violations;

    double final_objective() const {
        return iterations.empty() ? initial_objective : iterations.back().objective;
    }
};

struct AoResult {
    Iterate best;
    AoTrace trace;
};

// Alternating optimisation over the blocks in `options.order`; the antenna block is skipped in
// FPA mode. Stops when the per-iteration gain of the exact rate is at most epsilon, at
// max_iterations, or after three consecutive iterations in which every block failed.
// Starts from initialize(sc) and, in MA mode, according to options.ma_start.
AoResult optimize(const Scenario& sc, const AoOptions& options = {});
// Plain schedule from `start`; ma_start is ignored.
AoResult optimize(const Scenario& sc, const Iterate& start, const AoOptions& options);

}  // namespace mauav
