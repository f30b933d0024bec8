#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mauav/conic.hpp"
#include "mauav/scenario.hpp"

namespace mauav {

struct RankOneExtraction {
    Eigen::VectorXcd w;
    double eigen_ratio = 0.0;           // lambda_2 / lambda_1, 0 for the zero matrix
    double reconstruction_error = 0.0;  // ||W - w w^H||_F
    bool inexact = false;
};

// Eigenvalue clamp at zero.
Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& w);

// Principal eigenpair of the PSD projection; throws std::invalid_argument if the input
// has an eigenvalue below -1e-6 * max(1, ||W||).
RankOneExtraction extract_rank_one(const Eigen::MatrixXcd& w, double ratio_threshold = 1e-3);

// Relaxed beamforming program over a set of slots. Matrix variables are stored in units of
// the power budget; `slot_objective` maps the conic objective back to surrogate bits.
struct BeamformingProgram {
    conic::ConicProgram program;
    std::vector<int> slots;
    std::vector<std::vector<conic::HermitianVar>> vars;  // [slot position][user]
    double power_unit = 1.0;
    double bits_offset = 0.0;
    double reference_bits = 0.0;  // relaxed rate at the previous beams

    std::vector<std::vector<Eigen::MatrixXcd>> matrices(const conic::Solution& sol) const;
    // `base` with the gap floor lowered to the reference rate (at least 1e-12 bits), so
    // low-SNR programs are solved to relative accuracy.
    conic::SolverOptions solver_options(conic::SolverOptions base) const;
    double surrogate_bits(const conic::Solution& sol) const { return sol.objective + bits_offset; }
};

BeamformingProgram build_p2i(const Scenario& sc, const AntennaLayout& x, const Trajectory& q,
                             const BeamformerSet& w_prev, const std::vector<int>& slots);
BeamformingProgram build_p2i(const Scenario& sc, const AntennaLayout& x, const Trajectory& q,
                             const BeamformerSet& w_prev);

struct BeamformingSolution {
    conic::Solution solution;
    std::vector<std::vector<Eigen::MatrixXcd>> matrices;  // [slot position][user], PSD-projected
    double surrogate_bits = 0.0;
};

// Throws std::runtime_error carrying the solver message when the solve is not optimal.
BeamformingSolution solve_p2i(const BeamformingProgram& prog, const conic::SolverOptions& opts = {});

struct BeamformingOptions {
    conic::SolverOptions solver;
    int jobs = 1;
    double rank_threshold = 1e-3;
    int randomization_samples = 50;
    std::uint64_t seed = 1;
};

struct BeamformingReport {
    BeamformerSet w;
    std::vector<bool> accepted;  // per slot
    std::vector<conic::Status> status;
    std::vector<std::string> messages;
    std::vector<double> eigen_ratios;  // one per returned matrix
    int inexact = 0;
    int fallback_used = 0;
    double rate_before = 0.0;
    double rate_after = 0.0;

    bool all_failed() const;
};

// One beamforming block: per-slot relaxed solves, rank-one recovery with randomised fallback,
// and per-slot acceptance on the exact rate.
BeamformingReport update_beamformers(const Scenario& sc, const AntennaLayout& x, const Trajectory& q,
                                     const BeamformerSet& w_prev, const BeamformingOptions& opts = {});

}  // namespace mauav
