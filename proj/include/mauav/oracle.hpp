#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mauav/scenario.hpp"

// Reference computations for tests, built on the channel model and independent of the solvers.
namespace mauav::oracle {

// log2(1 + P M h^2 / sigma^2).
double mrt_closed_form_rate(double power, int antennas, double gain, double sigma2);

struct BeamformingOptions {
    int random_starts = 8;
    int max_iterations = 500;
    double tolerance = 1e-12;  // relative change of the sum rate between iterations
    std::uint64_t seed = 1;
};

struct SlotBeamforming {
    std::vector<Eigen::VectorXcd> w;
    double rate = 0.0;
};

// Multi-start WMMSE for a single slot at UAV position q with layout row x. The starts are
// equal-power MRT, single-user MRT for each user, zero-forcing when M >= K, and seeded
// random directions; the best stationary point is returned.
SlotBeamforming best_slot_beamforming(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x,
                                      const BeamformingOptions& opts = {},
                                      const std::vector<Eigen::VectorXcd>* warm = nullptr);

struct AntennaOracleOptions {
    BeamformingOptions beamforming;
    bool refine = true;     // pattern search on the spacings around the best grid points
    int refine_candidates = 3;
    double refine_tolerance = 1e-4;  // final pattern step, in wavelengths
};

struct AntennaOracleResult {
    Eigen::VectorXd layout;  // first element at 0
    std::vector<Eigen::VectorXcd> w;
    double rate = 0.0;
    double grid_rate = 0.0;  // best rate on the grid alone
    std::size_t layouts = 0; // ordered feasible grid layouts covered
};

// Exhaustive search over ordered, spacing-feasible layouts on {0, step, 2 step, ...} within
// [0, L] for slot position q. The rate depends only on the spacings, so each spacing tuple is
// evaluated once; ties keep the lexicographically lowest layout. Throws std::invalid_argument
// for M > 3, step <= 0 or more than 1e7 candidate layouts.
AntennaOracleResult grid_oracle_antenna(const Scenario& sc, const Vec2& q, double grid_step,
                                        const AntennaOracleOptions& opts = {});

enum class BoundKind { Cosine, SignalQuadratic, InterferenceQuadratic, TrajectoryFirstTerm };
const char* to_string(BoundKind k);

// Random expansion and evaluation points; counts lower-bound (or upper-bound) violations
// larger than 1e-9 relative to the exact value. Throws std::invalid_argument for trials < 1.
int sampled_bound_check(BoundKind kind, int trials, std::uint64_t seed);

}  // namespace mauav::oracle
