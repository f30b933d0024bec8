#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mauav {

using Vec2 = Eigen::Vector2d;

// Problem instance. Lengths in meters, powers in watts, gains linear.
// Treated as immutable once validated; all solver entry points take it by const&.
struct Scenario {
    std::vector<Vec2> users;          // ground positions s_k
    std::vector<double> noise_power;  // sigma_k^2, one per user

    double altitude = 100.0;  // H
    double duration = 40.0;   // T
    int slots = 10;           // N

    Vec2 q_init{0.0, 0.0};
    Vec2 q_final{0.0, 0.0};
    bool fix_endpoints = true;
    double v_min = 1.0;
    double v_max = 20.0;
    double a_max = 5.0;

    int antennas = 4;             // M
    double array_length = 0.8;    // L
    double min_spacing = 0.05;    // d_min
    double wavelength = 0.1;      // lambda
    double max_power = 3.0;       // P_max
    double ref_gain = 1e-6;       // chi

    int user_count() const { return static_cast<int>(users.size()); }
    double slot_length() const { return duration / slots; }
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& what, std::vector<std::string> violations = {})
        : std::runtime_error(what), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

// Every violated invariant, each as "<field>: <rule>". Empty means valid.
std::vector<std::string> validate(const Scenario& s);

// Throws ScenarioError (with the violation list) when validate() is non-empty.
void require_valid(const Scenario& s);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string format_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

// Bundled default: K=3 users in a 500 m square, P_max = 3 W, sigma^2 = -110 dBm,
// chi = -60 dB, lambda = 0.1 m, d_min = lambda/2, L = 8 lambda, V in [1, 20] m/s,
// H = 100 m, T = 40 s over N = 10 slots, M = 4.
Scenario paper_default();

// Replaces the user positions with `count` points drawn uniformly from the
// square [0, side]^2. Deterministic in `seed`.
Scenario with_random_users(Scenario s, int count, double side, std::uint64_t seed);

double dbm_to_watts(double dbm);
double db_to_linear(double db);
double watts_to_dbm(double watts);
double linear_to_db(double linear);

// Per-slot UAV positions. q[0] is the start point; slot n (1-based) uses q[n].
struct Trajectory {
    std::vector<Vec2> q;

    int slots() const { return static_cast<int>(q.size()) - 1; }
    // v[n] = (q[n] - q[n-1]) / tau, n = 1..N
    Vec2 velocity(int n, double tau) const { return (q[n] - q[n - 1]) / tau; }
    // a[n] = (v[n] - v[n-1]) / tau, n = 2..N
    Vec2 acceleration(int n, double tau) const {
        return (q[n] - 2.0 * q[n - 1] + q[n - 2]) / (tau * tau);
    }
};

// Row s holds the element coordinates of slot s+1.
struct AntennaLayout {
    std::vector<Eigen::VectorXd> x;

    int slots() const { return static_cast<int>(x.size()); }
};

// w[s][k] is the weight vector of user k in slot s+1.
struct BeamformerSet {
    std::vector<std::vector<Eigen::VectorXcd>> w;

    int slots() const { return static_cast<int>(w.size()); }
    double slot_power(int s) const;
};

// Violation descriptions for the exact, non-convexified constraints. Tolerances
// are absolute (power in W, spacing/range in m, kinematics in m/s and m/s^2).
struct FeasibilityTolerance {
    double power = 1e-8;
    double spacing = 1e-8;
    double range = 0.0;
    double kinematics = 1e-6;
};
std::vector<std::string> check_trajectory(const Scenario& s, const Trajectory& q,
                                          const FeasibilityTolerance& tol = {});
std::vector<std::string> check_layout(const Scenario& s, const AntennaLayout& x,
                                      const FeasibilityTolerance& tol = {});
std::vector<std::string> check_beamformers(const Scenario& s, const BeamformerSet& w,
                                           const FeasibilityTolerance& tol = {});

}  // namespace mauav
