#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mauav/scenario.hpp"

namespace mauav {

// Line-of-sight geometry between the UAV and one user in one slot.
struct LinkGeometry {
    double theta = 0.0;     // steering angle, [0, pi/2)
    double vartheta = 0.0;  // spatial frequency (2 pi / lambda) cos(theta), rad/m
    double gain = 0.0;      // amplitude path loss h = sqrt(chi / d)
    double dist2 = 0.0;     // d = |q - s|^2 + H^2
};

// geometry[s][k] for slot s+1 and user k.
struct ChannelSnapshot {
    std::vector<std::vector<LinkGeometry>> geometry;
};

double steering_angle(const Vec2& q, const Vec2& s, double altitude);
Eigen::VectorXcd steering_vector(const Eigen::VectorXd& x, double theta, double wavelength);
double spatial_frequency(double theta, double wavelength);
double path_loss(const Vec2& q, const Vec2& s, double altitude, double ref_gain);

LinkGeometry link_geometry(const Scenario& sc, const Vec2& q, int user);
ChannelSnapshot snapshot(const Scenario& sc, const Trajectory& traj);

// |h a_k^H w|^2 / (sum_{l != k} |h a_k^H w_l|^2 + sigma_k^2).
double sinr(const Scenario& sc, const LinkGeometry& link, const Eigen::VectorXd& x,
            const std::vector<Eigen::VectorXcd>& w, int user);

double rate(double gamma);

// Sum over users of the rate in one slot at UAV position q with layout row x.
double slot_rate(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x,
                 const std::vector<Eigen::VectorXcd>& w);

// Sum over slots n = 1..N and users; bits per channel use.
double total_rate(const Scenario& sc, const Trajectory& traj, const AntennaLayout& layout,
                  const BeamformerSet& beams);

// |a(x, theta)^H w|^2
double beam_gain(const Eigen::VectorXd& x, const Eigen::VectorXcd& w, double theta, double wavelength);

struct PatternPoint {
    double theta;
    double gain;
};

// Gain sampled on `points` angles evenly covering [0, pi/2].
std::vector<PatternPoint> beam_pattern(const Eigen::VectorXd& x, const Eigen::VectorXcd& w,
                                       double wavelength, int points = 1024);

// Per-user, unit-norm steering direction scaled to sqrt(P_max / K).
std::vector<Eigen::VectorXcd> mrt_beamformers(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x);

}  // namespace mauav
