#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mauav/conic.hpp"
#include "mauav/scenario.hpp"

namespace mauav {

// eta[s][k]: SINR of user k in slot s+1 at the current iterate.
std::vector<std::vector<double>> dinkelbach_eta(const Scenario& sc, const Trajectory& q, const AntennaLayout& x,
                                                const BeamformerSet& w);

// Fractional-programming surrogate for the layouts of a set of slots. Coordinates are
// stored in wavelengths.
struct AntennaProgram {
    conic::ConicProgram program;
    std::vector<int> slots;
    std::vector<int> layout_var;                           // first coordinate per slot position
    // -1 where the term is left out: beams with |w|^2 <= 1e-12 P_max, and interference of users
    // whose weight eta h^2 / sigma^2 is below 1e-9 of the slot's largest weight.
    std::vector<std::vector<int>> signal_var;              // [slot position][user]
    std::vector<std::vector<std::vector<int>>> leak_var;   // [slot position][user][other]
    double length_unit = 1.0;
    int antennas = 0;

    Eigen::VectorXd layout(const conic::Solution& sol, std::size_t position) const;
};

AntennaProgram build_p4i(const Scenario& sc, const BeamformerSet& w, const Trajectory& q, const AntennaLayout& x_prev,
                         const std::vector<std::vector<double>>& eta, const std::vector<int>& slots);
AntennaProgram build_p4i(const Scenario& sc, const BeamformerSet& w, const Trajectory& q, const AntennaLayout& x_prev,
                         const std::vector<std::vector<double>>& eta);

struct AntennaUpdate {
    AntennaLayout x;
    std::vector<bool> solved;    // per slot
    std::vector<bool> accepted;  // per slot
    std::vector<conic::Status> status;
    std::vector<std::string> messages;
    double rate_before = 0.0;
    double rate_after = 0.0;

    bool all_failed() const;
    int rejections() const;
};

// Per-slot solves. Each slot takes the largest step 2^-j (j <= max_halvings) towards its
// solved layout whose exact rate does not drop by more than 1e-9 / N, or keeps x_prev.
AntennaUpdate solve_p4i_with_safeguard(const Scenario& sc, const BeamformerSet& w, const Trajectory& q,
                                       const AntennaLayout& x_prev, const std::vector<std::vector<double>>& eta,
                                       const conic::SolverOptions& opts = {}, int jobs = 1, int max_halvings = 10);

// One antenna block with eta refreshed at the current iterate.
AntennaUpdate update_antennas(const Scenario& sc, const BeamformerSet& w, const Trajectory& q,
                              const AntennaLayout& x_prev, const conic::SolverOptions& opts = {}, int jobs = 1, int max_halvings = 10);

}  // namespace mauav
