#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "mauav/ao_driver.hpp"
#include "mauav/scenario.hpp"

// Plain-text result files. Every delimited file starts with '#' lines, the last of which names
// the tab-separated columns.
namespace mauav::exports {

// iteration, objective_bits, gain_bits, one delta column per block, block flags. Row 0 is the
// start point. Flags hold one letter per block in schedule order: upper case when the block
// changed the iterate, lower case when it ran without a change, '-' when skipped, '!' when
// every solve of the block failed.
void write_trace(std::ostream& os, const AoTrace& trace);

// n, q_x, q_y, v_x, v_y, speed for n = 0..N; the velocity of row 0 is zero.
void write_trajectory(std::ostream& os, const Scenario& sc, const Trajectory& q);

// n, x_1..x_M in metres, n = 1..N.
void write_layout(std::ostream& os, const AntennaLayout& x);

// theta_rad and |a(theta)^H w_k|^2 for each user's beam in one slot (0-based), over [0, pi/2].
void write_beampattern(std::ostream& os, const Scenario& sc, const Iterate& it, int slot, int points = 1024);

struct SweepRow {
    double value = 0.0;
    double rate_ma = 0.0;
    double rate_fpa = 0.0;
};
void write_sweep(std::ostream& os, const std::string& axis, const std::vector<SweepRow>& rows);

// JSON document with the scenario, the final iterate (beamformers as [re, im] pairs) and the
// trace summary.
std::string solution_bundle(const Scenario& sc, const AoResult& result, bool fpa);

// Writes trace.tsv, trajectory.tsv, layout.tsv and solution.json into `dir`, creating it.
// Throws std::runtime_error when a file cannot be written.
void write_run(const std::filesystem::path& dir, const Scenario& sc, const AoResult& result, bool fpa);

}  // namespace mauav::exports
