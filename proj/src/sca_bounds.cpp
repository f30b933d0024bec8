#include "mauav/sca_bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mauav {

namespace {
constexpr double kLog2e = std::numbers::log2e;
}

double cos_minorant(double beta, double beta0) {
    const double d = beta - beta0;
    return std::cos(beta0) - std::sin(beta0) * d - 0.5 * d * d;
}

double cos_majorant(double beta, double beta0) {
    const double d = beta - beta0;
    return std::cos(beta0) - std::sin(beta0) * d + 0.5 * d * d;
}

std::vector<Eigen::MatrixXcd> channel_covariances(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x) {
    std::vector<Eigen::MatrixXcd> out;
    for (int k = 0; k < sc.user_count(); ++k) {
        const LinkGeometry g = link_geometry(sc, q, k);
        const Eigen::VectorXcd a = steering_vector(x, g.theta, sc.wavelength);
        out.push_back(g.gain * g.gain * (a * a.adjoint()));
    }
    return out;
}

namespace {

double tr_real(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a * b).trace().real(); }

void require_psd(const Eigen::MatrixXcd& w) {
    if (w.size() == 0) return;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::invalid_argument("beamforming linearization: previous iterate is not PSD");
}

}  // namespace

BeamformingLinearization beamforming_linearization(const std::vector<Eigen::MatrixXcd>& w_prev,
                                                   const std::vector<Eigen::MatrixXcd>& lambda,
                                                   const std::vector<double>& sigma2) {
    const std::size_t users = lambda.size();
    if (w_prev.size() != users || sigma2.size() != users)
        throw std::invalid_argument("beamforming linearization: inconsistent user counts");
    for (const auto& w : w_prev) require_psd(w);
    BeamformingLinearization lin;
    lin.lambda = lambda;
    for (std::size_t k = 0; k < users; ++k) {
        if (!(sigma2[k] > 0.0)) throw std::invalid_argument("beamforming linearization: sigma2 must be positive");
        double interference = 0.0;
        for (std::size_t l = 0; l < users; ++l)
            if (l != k) interference += tr_real(lambda[k], w_prev[l]);
        const double denom = interference + sigma2[k];
        lin.interference.push_back(interference);
        lin.alpha.push_back(std::log2(denom));
        lin.delta.push_back(kLog2e * lambda[k] / denom);
    }
    return lin;
}

double relaxed_slot_rate(const std::vector<Eigen::MatrixXcd>& lambda, const std::vector<Eigen::MatrixXcd>& w,
                         const std::vector<double>& sigma2) {
    double r = 0.0;
    for (std::size_t k = 0; k < lambda.size(); ++k) {
        double interference = 0.0;
        for (std::size_t l = 0; l < w.size(); ++l)
            if (l != k) interference += tr_real(lambda[k], w[l]);
        r += std::log2(1.0 + tr_real(lambda[k], w[k]) / (interference + sigma2[k]));
    }
    return r;
}

double beamforming_surrogate(const BeamformingLinearization& lin, const std::vector<Eigen::MatrixXcd>& w,
                             const std::vector<Eigen::MatrixXcd>& w_prev, const std::vector<double>& sigma2) {
    double r = 0.0;
    for (std::size_t k = 0; k < lin.lambda.size(); ++k) {
        double total = sigma2[k];
        double correction = 0.0;
        for (std::size_t l = 0; l < w.size(); ++l) {
            total += tr_real(lin.lambda[k], w[l]);
            if (l != k) correction += tr_real(lin.delta[k], w[l] - w_prev[l]);
        }
        r += std::log2(total) - lin.alpha[k] - correction;
    }
    return r;
}

namespace {

QuadraticSurrogate assemble(const Eigen::VectorXcd& w, double vartheta, const Eigen::VectorXd& x0,
                            SurrogateKind kind) {
    const auto m = w.size();
    QuadraticSurrogate s;
    s.kind = kind;
    s.vartheta = vartheta;
    s.amplitude = w.cwiseAbs();
    const Eigen::VectorXd& u = s.amplitude;
    const double gamma = u.sum();
    // +1 for the majorant, -1 for the minorant: sign of the quadratic remainder.
    const double sg = kind == SurrogateKind::SignalMinorant ? -1.0 : 1.0;
    const double v2 = vartheta * vartheta;

    s.a = sg * 2.0 * v2 * (gamma * Eigen::MatrixXd(u.asDiagonal()) - u * u.transpose());
    s.b = Eigen::VectorXd::Zero(m);
    s.c = 0.0;
    for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = 0; q < m; ++q) {
            const double uu = u[p] * u[q];
            const double dx = x0[p] - x0[q];
            const double theta0 = vartheta * dx - (std::arg(w[p]) - std::arg(w[q]));
            s.b[p] += -sg * 2.0 * v2 * uu * dx - 2.0 * vartheta * uu * std::sin(theta0);
            s.c += uu * std::cos(theta0) + vartheta * uu * std::sin(theta0) * dx + sg * 0.5 * v2 * uu * dx * dx;
        }
    return s;
}

}  // namespace

Eigen::MatrixXd QuadraticSurrogate::curvature_factor() const {
    const auto m = amplitude.size();
    const auto rows = m * (m - 1) / 2;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(rows, 1), m);
    Eigen::Index r = 0;
    for (Eigen::Index p = 0; p < m; ++p)
        for (Eigen::Index q = p + 1; q < m; ++q, ++r) {
            const double c = std::abs(vartheta) * std::sqrt(amplitude[p] * amplitude[q]);
            f(r, p) = c;
            f(r, q) = -c;
        }
    return f;
}

QuadraticSurrogate assemble_signal_quadratic(const Eigen::VectorXcd& w, double vartheta, const Eigen::VectorXd& x_prev) {
    return assemble(w, vartheta, x_prev, SurrogateKind::SignalMinorant);
}

QuadraticSurrogate assemble_interference_quadratic(const Eigen::VectorXcd& w, double vartheta,
                                                   const Eigen::VectorXd& x_prev) {
    return assemble(w, vartheta, x_prev, SurrogateKind::InterferenceMajorant);
}

double quadratic_double_sum(const Eigen::VectorXcd& w, double vartheta, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& x_prev, SurrogateKind kind) {
    double total = 0.0;
    for (Eigen::Index p = 0; p < w.size(); ++p)
        for (Eigen::Index q = 0; q < w.size(); ++q) {
            const double phase = std::arg(w[p]) - std::arg(w[q]);
            const double beta = vartheta * (x[p] - x[q]) - phase;
            const double beta0 = vartheta * (x_prev[p] - x_prev[q]) - phase;
            const double f = kind == SurrogateKind::SignalMinorant ? cos_minorant(beta, beta0) : cos_majorant(beta, beta0);
            total += std::abs(w[p]) * std::abs(w[q]) * f;
        }
    return total;
}

bool is_negative_semidefinite(const Eigen::MatrixXd& a) { return is_positive_semidefinite(-a); }

bool is_positive_semidefinite(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const double norm = a.norm();
    return es.eigenvalues().minCoeff() >= -1e-9 * std::max(norm, 1e-300);
}

double TrajectorySurrogateTerms::first_term(int slot, int user, double d) const {
    const auto& t = terms[slot][user];
    return std::log2((t.phi + t.upsilon) / d + sigma2[user]);
}

double TrajectorySurrogateTerms::r1_slope(int slot, int user) const {
    const auto& t = terms[slot][user];
    const double s = t.phi + t.upsilon;
    return -kLog2e * s / (t.d_prev * t.d_prev) / (s / t.d_prev + sigma2[user]);
}

double TrajectorySurrogateTerms::r1(int slot, int user, double d) const {
    const auto& t = terms[slot][user];
    return first_term(slot, user, t.d_prev) + r1_slope(slot, user) * (d - t.d_prev);
}

double TrajectorySurrogateTerms::r2(int slot, int user, double z) const {
    const auto& t = terms[slot][user];
    return std::log2(t.upsilon * std::exp(z) + sigma2[user]);
}

double TrajectorySurrogateTerms::frozen_rate(int slot, int user, const Vec2& q) const {
    const auto& t = terms[slot][user];
    const double d = dist2(user, q);
    return std::log2((t.phi + t.upsilon) / d + sigma2[user]) - std::log2(t.upsilon / d + sigma2[user]);
}

TrajectorySurrogateTerms trajectory_surrogate(const Scenario& sc, const BeamformerSet& w, const AntennaLayout& x,
                                              const Trajectory& q_prev) {
    TrajectorySurrogateTerms out;
    out.sigma2 = sc.noise_power;
    out.users = sc.users;
    out.altitude = sc.altitude;
    out.terms.resize(sc.slots);
    for (int n = 0; n < sc.slots; ++n) {
        const Vec2& q = q_prev.q[n + 1];
        out.q_prev.push_back(q);
        for (int k = 0; k < sc.user_count(); ++k) {
            TrajectoryTerm t;
            const LinkGeometry g = link_geometry(sc, q, k);
            t.d_prev = g.dist2;
            t.frozen_steering = steering_vector(x.x[n], g.theta, sc.wavelength);
            for (int l = 0; l < sc.user_count(); ++l) {
                const double p = sc.ref_gain * std::norm(t.frozen_steering.dot(w.w[n][l]));
                if (l == k) t.phi = p;
                else t.upsilon += p;
            }
            out.terms[n].push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace mauav
