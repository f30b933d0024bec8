#include "mauav/channel.hpp"

#include <cmath>
#include <numbers>

namespace mauav {

double steering_angle(const Vec2& q, const Vec2& s, double altitude) {
    const double d = std::sqrt((q - s).squaredNorm() + altitude * altitude);
    return std::acos(std::min(1.0, altitude / d));
}

double spatial_frequency(double theta, double wavelength) {
    return 2.0 * std::numbers::pi / wavelength * std::cos(theta);
}

Eigen::VectorXcd steering_vector(const Eigen::VectorXd& x, double theta, double wavelength) {
    const double k = spatial_frequency(theta, wavelength);
    Eigen::VectorXcd a(x.size());
    for (Eigen::Index m = 0; m < x.size(); ++m) a[m] = std::polar(1.0, k * x[m]);
    return a;
}

double path_loss(const Vec2& q, const Vec2& s, double altitude, double ref_gain) {
    return std::sqrt(ref_gain) / std::sqrt((q - s).squaredNorm() + altitude * altitude);
}

LinkGeometry link_geometry(const Scenario& sc, const Vec2& q, int user) {
    LinkGeometry g;
    const Vec2& s = sc.users[user];
    g.dist2 = (q - s).squaredNorm() + sc.altitude * sc.altitude;
    g.theta = steering_angle(q, s, sc.altitude);
    g.vartheta = spatial_frequency(g.theta, sc.wavelength);
    g.gain = path_loss(q, s, sc.altitude, sc.ref_gain);
    return g;
}

ChannelSnapshot snapshot(const Scenario& sc, const Trajectory& traj) {
    ChannelSnapshot snap;
    snap.geometry.resize(sc.slots);
    for (int n = 0; n < sc.slots; ++n) {
        snap.geometry[n].reserve(sc.user_count());
        for (int k = 0; k < sc.user_count(); ++k) snap.geometry[n].push_back(link_geometry(sc, traj.q[n + 1], k));
    }
    return snap;
}

double sinr(const Scenario& sc, const LinkGeometry& link, const Eigen::VectorXd& x,
            const std::vector<Eigen::VectorXcd>& w, int user) {
    const Eigen::VectorXcd a = steering_vector(x, link.theta, sc.wavelength);
    const double h2 = link.gain * link.gain;
    double signal = 0.0;
    double interference = 0.0;
    for (std::size_t l = 0; l < w.size(); ++l) {
        const double p = h2 * std::norm(a.dot(w[l]));  // dot() conjugates a
        if (static_cast<int>(l) == user) signal = p;
        else interference += p;
    }
    return signal / (interference + sc.noise_power[user]);
}

double rate(double gamma) { return std::log2(1.0 + gamma); }

double slot_rate(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x,
                 const std::vector<Eigen::VectorXcd>& w) {
    double r = 0.0;
    for (int k = 0; k < sc.user_count(); ++k) r += rate(sinr(sc, link_geometry(sc, q, k), x, w, k));
    return r;
}

double total_rate(const Scenario& sc, const Trajectory& traj, const AntennaLayout& layout,
                  const BeamformerSet& beams) {
    double r = 0.0;
    for (int n = 0; n < sc.slots; ++n) r += slot_rate(sc, traj.q[n + 1], layout.x[n], beams.w[n]);
    return r;
}

double beam_gain(const Eigen::VectorXd& x, const Eigen::VectorXcd& w, double theta, double wavelength) {
    return std::norm(steering_vector(x, theta, wavelength).dot(w));
}

std::vector<PatternPoint> beam_pattern(const Eigen::VectorXd& x, const Eigen::VectorXcd& w,
                                       double wavelength, int points) {
    std::vector<PatternPoint> out;
    out.reserve(points);
    for (int i = 0; i < points; ++i) {
        const double theta = points == 1 ? 0.0 : (std::numbers::pi / 2.0) * i / (points - 1);
        out.push_back({theta, beam_gain(x, w, theta, wavelength)});
    }
    return out;
}

std::vector<Eigen::VectorXcd> mrt_beamformers(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x) {
    std::vector<Eigen::VectorXcd> w;
    const double amp = std::sqrt(sc.max_power / sc.user_count() / static_cast<double>(x.size()));
    for (int k = 0; k < sc.user_count(); ++k)
        w.push_back(amp * steering_vector(x, steering_angle(q, sc.users[k], sc.altitude), sc.wavelength));
    return w;
}

}  // namespace mauav
