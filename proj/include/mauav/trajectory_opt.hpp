#pragma once

#include <string>
#include <vector>

#include "mauav/conic.hpp"
#include "mauav/sca_bounds.hpp"
#include "mauav/scenario.hpp"

namespace mauav {

// Trajectory program with frozen steering vectors. Positions are stored in units of
// `length_unit`; the interference slack is stored shifted by ln d_prev.
struct TrajectoryProgram {
    conic::ConicProgram program;
    TrajectorySurrogateTerms terms;
    Trajectory q_prev;
    double length_unit = 1.0;
    std::vector<int> position_var;            // first of two variables for q[n], -1 when fixed
    std::vector<std::vector<int>> slack_var;  // [slot][user], -1 without interference

    bool has_variables() const;
    Trajectory trajectory(const conic::Solution& sol) const;
    // z_k[n] in natural-log units; -ln d_prev where the slack is absent.
    std::vector<std::vector<double>> slack(const conic::Solution& sol) const;
    // sum over slots and users of r1(d(q)) - r2(z).
    double surrogate_bits(const Trajectory& q, const std::vector<std::vector<double>>& z) const;
};

// Throws std::invalid_argument when two consecutive positions of q_prev coincide
// (the linearised minimum-speed constraint is then empty).
TrajectoryProgram build_p3i(const Scenario& sc, const BeamformerSet& w, const AntennaLayout& x,
                            const Trajectory& q_prev);

struct TrajectoryIterate {
    Trajectory q;
    std::vector<std::vector<double>> z;
    conic::Solution solution;
    double surrogate_bits = 0.0;
};

// Throws std::runtime_error carrying the solver message when the solve is not optimal.
TrajectoryIterate solve_p3i(const TrajectoryProgram& prog, const conic::SolverOptions& opts = {});

struct TrajectoryUpdate {
    Trajectory q;
    conic::Status status = conic::Status::NumericalFailure;
    std::string message;
    bool solved = false;
    bool accepted = false;
    double step = 0.0;  // fraction of the way from q_prev to the solved trajectory
    double rate_before = 0.0;
    double rate_after = 0.0;
};

// Solves the trajectory program and accepts the largest step 2^-j (j <= max_halvings) along
// q_prev -> solution whose trajectory is exactly feasible and does not lower the exact rate.
TrajectoryUpdate update_trajectory(const Scenario& sc, const BeamformerSet& w, const AntennaLayout& x,
                                   const Trajectory& q_prev, const conic::SolverOptions& opts = {},
                                   int max_halvings = 10);

}  // namespace mauav
