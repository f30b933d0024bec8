#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mauav/channel.hpp"
#include "mauav/scenario.hpp"

namespace mauav {

// Second-order cosine bounds around beta0:
//   minorant  cos b0 - sin b0 (b - b0) - (b - b0)^2 / 2  <= cos b
//   majorant  cos b0 - sin b0 (b - b0) + (b - b0)^2 / 2  >= cos b
double cos_minorant(double beta, double beta0);
double cos_majorant(double beta, double beta0);

// Linearisation of the interference log term for one slot, one entry per user.
struct BeamformingLinearization {
    std::vector<double> alpha;                 // log2(I_k + sigma_k^2)
    std::vector<Eigen::MatrixXcd> delta;       // log2(e) Lambda_k / (I_k + sigma_k^2)
    std::vector<Eigen::MatrixXcd> lambda;      // h_k^2 a_k a_k^H
    std::vector<double> interference;          // I_k = sum_{l != k} tr(Lambda_k W_l^prev)
};

// Lambda_k = h_k^2 a_k a_k^H for every user of one slot.
std::vector<Eigen::MatrixXcd> channel_covariances(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x);

// Throws std::invalid_argument when a previous-iterate matrix is not PSD
// (min eigenvalue below -1e-9 * max(1, ||W||)).
BeamformingLinearization beamforming_linearization(const std::vector<Eigen::MatrixXcd>& w_prev,
                                                   const std::vector<Eigen::MatrixXcd>& lambda,
                                                   const std::vector<double>& sigma2);

// sum_k log2(1 + tr(Lambda_k W_k) / (sum_{l != k} tr(Lambda_k W_l) + sigma_k^2))
double relaxed_slot_rate(const std::vector<Eigen::MatrixXcd>& lambda, const std::vector<Eigen::MatrixXcd>& w,
                         const std::vector<double>& sigma2);

// Concave lower bound of relaxed_slot_rate, tight at the linearisation point:
// sum_k log2(sum_l tr(Lambda_k W_l) + sigma_k^2) - alpha_k - sum_{l != k} tr(Delta_k (W_l - W_l^prev)).
double beamforming_surrogate(const BeamformingLinearization& lin, const std::vector<Eigen::MatrixXcd>& w,
                             const std::vector<Eigen::MatrixXcd>& w_prev, const std::vector<double>& sigma2);

enum class SurrogateKind { SignalMinorant, InterferenceMajorant };

// 0.5 x^T A x + b^T x + c bounding |a(x, theta)^H w|^2 in the antenna coordinates.
struct QuadraticSurrogate {
    Eigen::MatrixXd a;
    Eigen::VectorXd b;
    double c = 0.0;
    SurrogateKind kind = SurrogateKind::SignalMinorant;
    Eigen::VectorXd amplitude;  // |w_m|
    double vartheta = 0.0;

    double eval(const Eigen::VectorXd& x) const { return 0.5 * x.dot(a * x) + b.dot(x) + c; }
    // F with ||F x||^2 = |0.5 x^T A x|: rows vartheta sqrt(u_p u_q) (e_p - e_q), p < q.
    Eigen::MatrixXd curvature_factor() const;
};

QuadraticSurrogate assemble_signal_quadratic(const Eigen::VectorXcd& w, double vartheta, const Eigen::VectorXd& x_prev);
QuadraticSurrogate assemble_interference_quadratic(const Eigen::VectorXcd& w, double vartheta,
                                                   const Eigen::VectorXd& x_prev);

// Reference double sum: sum_{p,q} |w_p w_q| bound(Theta(x_p, x_q) | Theta(x_p^i, x_q^i)).
double quadratic_double_sum(const Eigen::VectorXcd& w, double vartheta, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_prev, SurrogateKind kind);

bool is_negative_semidefinite(const Eigen::MatrixXd& a);
bool is_positive_semidefinite(const Eigen::MatrixXd& a);

// Frozen-steering coefficients for one (slot, user).
struct TrajectoryTerm {
    double phi = 0.0;      // chi |a~^H w_k|^2
    double upsilon = 0.0;  // sum_{l != k} chi |a~^H w_l|^2
    double d_prev = 0.0;   // |q^i - s_k|^2 + H^2
    Eigen::VectorXcd frozen_steering;
};

struct TrajectorySurrogateTerms {
    std::vector<std::vector<TrajectoryTerm>> terms;  // [slot][user]
    std::vector<double> sigma2;
    std::vector<Vec2> q_prev;  // positions of slots 1..N at the expansion point
    std::vector<Vec2> users;
    double altitude = 0.0;

    // First term of the frozen-steering rate and its affine-in-d minorant.
    double first_term(int slot, int user, double d) const;
    double r1(int slot, int user, double d) const;
    double r1_slope(int slot, int user) const;  // d r1 / d d (<= 0)
    double r2(int slot, int user, double z) const;
    // Frozen-steering rate log2((Phi + Ups)/d + s2) - log2(Ups/d + s2) at position q.
    double frozen_rate(int slot, int user, const Vec2& q) const;
    double dist2(int user, const Vec2& q) const {
        return (q - users[user]).squaredNorm() + altitude * altitude;
    }
};

TrajectorySurrogateTerms trajectory_surrogate(const Scenario& sc, const BeamformerSet& w, const AntennaLayout& x,
                                              const Trajectory& q_prev);

}  // namespace mauav
