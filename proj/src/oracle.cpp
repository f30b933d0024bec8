#include "mauav/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mauav/channel.hpp"
#include "mauav/sca_bounds.hpp"

namespace mauav::oracle {

double mrt_closed_form_rate(double power, int antennas, double gain, double sigma2) {
    return std::log2(1.0 + power * antennas * gain * gain / sigma2);
}

namespace {

using Beams = std::vector<Eigen::VectorXcd>;

// Noise-normalised channel vectors g_k with SINR_k = |g_k^H w_k|^2 / (sum_{l != k} |g_k^H w_l|^2 + 1).
std::vector<Eigen::VectorXcd> normalised_channels(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x) {
    std::vector<Eigen::VectorXcd> g;
    for (int k = 0; k < sc.user_count(); ++k) {
        const LinkGeometry link = link_geometry(sc, q, k);
        g.push_back(steering_vector(x, link.theta, sc.wavelength) * (link.gain / std::sqrt(sc.noise_power[k])));
    }
    return g;
}

double normalised_rate(const std::vector<Eigen::VectorXcd>& g, const Beams& w) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double leak = 1.0;
        for (std::size_t l = 0; l < w.size(); ++l)
            if (l != k) leak += std::norm(g[k].dot(w[l]));
        total += std::log2(1.0 + std::norm(g[k].dot(w[k])) / leak);
    }
    return total;
}

void scale_to_power(Beams& w, double power) {
    double p = 0.0;
    for (const auto& v : w) p += v.squaredNorm();
    if (p <= 0.0) return;
    const double f = std::sqrt(power / p);
    for (auto& v : w) v *= f;
}

Beams wmmse(const std::vector<Eigen::VectorXcd>& g, Beams w, double power, const BeamformingOptions& opts) {
    const int users = static_cast<int>(g.size());
    const int m = static_cast<int>(g.front().size());
    double rate = normalised_rate(g, w);
    for (int it = 0; it < opts.max_iterations; ++it) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
        Beams rhs(users);
        for (int k = 0; k < users; ++k) {
            double total = 1.0;
            for (int l = 0; l < users; ++l) total += std::norm(g[k].dot(w[l]));
            const std::complex<double> u = g[k].dot(w[k]) / total;
            const double mse = std::max(1.0 - std::norm(g[k].dot(w[k])) / total, 1e-300);
            const double weight = 1.0 / mse;
            a += weight * std::norm(u) * g[k] * g[k].adjoint();
            rhs[k] = weight * u * g[k];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a);
        const Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(0.0);
        std::vector<Eigen::VectorXcd> proj;
        for (const auto& r : rhs) proj.push_back(eig.eigenvectors().adjoint() * r);
        auto power_at = [&](double mu) {
            double p = 0.0;
            for (const auto& c : proj)
                for (int i = 0; i < m; ++i) {
                    const double den = ev[i] + mu;
                    if (den <= 0.0) {
                        if (std::norm(c[i]) > 0.0) return std::numeric_limits<double>::infinity();
                        continue;
                    }
                    p += std::norm(c[i]) / (den * den);
                }
            return p;
        };
        double mu = 0.0;
        if (!(power_at(0.0) <= power) || ev.minCoeff() <= 1e-14 * std::max(1.0, ev.maxCoeff())) {
            double hi = 1e-12;
            while (power_at(hi) > power) hi *= 2.0;
            double lo = 0.0;
            for (int b = 0; b < 200; ++b) {
                const double mid = 0.5 * (lo + hi);
                (power_at(mid) > power ? lo : hi) = mid;
            }
            mu = hi;
        }
        Beams next(users);
        for (int k = 0; k < users; ++k) {
            Eigen::VectorXcd c = proj[k];
            for (int i = 0; i < m; ++i) c[i] = ev[i] + mu > 0.0 ? c[i] / (ev[i] + mu) : 0.0;
            next[k] = eig.eigenvectors() * c;
        }
        const double r = normalised_rate(g, next);
        w = std::move(next);
        if (std::abs(r - rate) <= opts.tolerance * (1.0 + std::abs(r))) break;
        rate = r;
    }
    return w;
}

std::vector<Beams> starts(const std::vector<Eigen::VectorXcd>& g, double power, const BeamformingOptions& opts) {
    const int users = static_cast<int>(g.size());
    const int m = static_cast<int>(g.front().size());
    std::vector<Beams> out;

    Beams mrt;
    for (const auto& v : g) mrt.push_back(v.norm() > 0.0 ? Eigen::VectorXcd(v / v.norm()) : Eigen::VectorXcd::Ones(m));
    scale_to_power(mrt, power);
    out.push_back(mrt);

    for (int k = 0; users > 1 && k < users; ++k) {
        // Other users keep a trace of power so WMMSE can still switch them back on.
        Beams solo(users);
        for (int l = 0; l < users; ++l) solo[l] = (l == k ? 1.0 : 1e-3) * mrt[l];
        scale_to_power(solo, power);
        out.push_back(solo);
    }

    if (m >= users) {
        Eigen::MatrixXcd gm(m, users);
        for (int k = 0; k < users; ++k) gm.col(k) = g[k];
        const Eigen::MatrixXcd gram = gm.adjoint() * gm;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
        if (eig.eigenvalues().minCoeff() > 1e-10 * eig.eigenvalues().maxCoeff()) {
            const Eigen::MatrixXcd zf = gm * gram.inverse();
            Beams w;
            for (int k = 0; k < users; ++k) w.push_back(zf.col(k));
            scale_to_power(w, power);
            out.push_back(w);
        }
    }

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    for (int r = 0; r < opts.random_starts; ++r) {
        Beams w;
        for (int k = 0; k < users; ++k) {
            Eigen::VectorXcd v(m);
            for (int i = 0; i < m; ++i) v[i] = {normal(rng), normal(rng)};
            w.push_back(v);
        }
        scale_to_power(w, power);
        out.push_back(w);
    }
    return out;
}

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

SlotBeamforming best_slot_beamforming(const Scenario& sc, const Vec2& q, const Eigen::VectorXd& x,
                                      const BeamformingOptions& opts, const std::vector<Eigen::VectorXcd>* warm) {
    const auto g = normalised_channels(sc, q, x);
    auto candidates = starts(g, sc.max_power, opts);
    if (warm) candidates.insert(candidates.begin(), *warm);
    SlotBeamforming best;
    best.rate = -std::numeric_limits<double>::infinity();
    for (auto& w0 : candidates) {
        Beams w = wmmse(g, std::move(w0), sc.max_power, opts);
        const double r = slot_rate(sc, q, x, w);
        if (r > best.rate) {
            best.rate = r;
            best.w = std::move(w);
        }
    }
    return best;
}

AntennaOracleResult grid_oracle_antenna(const Scenario& sc, const Vec2& q, double grid_step,
                                        const AntennaOracleOptions& opts) {
    const int m = sc.antennas;
    if (m > 3) throw std::invalid_argument("grid oracle: at most 3 antennas");
    if (m < 1) throw std::invalid_argument("grid oracle: at least 1 antenna");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid oracle: grid step must be positive");
    const int points = static_cast<int>(std::floor(sc.array_length / grid_step + 1e-9)) + 1;
    if (log_choose(points, std::min(m, points)) > std::log(1e7))
        throw std::invalid_argument("grid oracle: more than 1e7 candidate layouts");
    const double eps = 1e-9 * grid_step;

    std::map<std::vector<double>, SlotBeamforming> cache;
    auto evaluate = [&](const Eigen::VectorXd& spacing, const std::vector<Eigen::VectorXcd>* warm) {
        Eigen::VectorXd x(m);
        x[0] = 0.0;
        for (int i = 1; i < m; ++i) x[i] = x[i - 1] + spacing[i - 1];
        return std::pair{x, best_slot_beamforming(sc, q, x, opts.beamforming, warm)};
    };

    AntennaOracleResult res;
    res.rate = -std::numeric_limits<double>::infinity();
    std::vector<int> idx(m);
    // Enumerate index tuples i_1 < ... < i_M in lexicographic order.
    auto feasible = [&](int j) {
        return j == 0 || (idx[j] - idx[j - 1]) * grid_step >= sc.min_spacing - eps;
    };
    int depth = 0;
    idx[0] = -1;
    while (depth >= 0) {
        ++idx[depth];
        if (idx[depth] >= points) {
            --depth;
            continue;
        }
        if (!feasible(depth)) continue;
        if (depth + 1 < m) {
            ++depth;
            idx[depth] = idx[depth - 1];
            continue;
        }
        ++res.layouts;
        std::vector<double> key;
        Eigen::VectorXd spacing(m - 1);
        for (int i = 1; i < m; ++i) {
            spacing[i - 1] = (idx[i] - idx[i - 1]) * grid_step;
            key.push_back(spacing[i - 1]);
        }
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, evaluate(spacing, nullptr).second).first;
        if (it->second.rate > res.rate) {
            res.rate = it->second.rate;
            res.w = it->second.w;
            res.layout.resize(m);
            for (int i = 0; i < m; ++i) res.layout[i] = idx[i] * grid_step;
        }
    }
    // Translation does not change the rate, so report the layout starting at 0.
    res.layout.array() -= res.layout[0];
    res.grid_rate = res.rate;
    if (!opts.refine || m < 2) return res;

    std::vector<std::pair<double, std::vector<double>>> ranked;
    for (const auto& [key, val] : cache) ranked.emplace_back(val.rate, key);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    const int take = std::min<int>(opts.refine_candidates, static_cast<int>(ranked.size()));

    auto admissible = [&](const Eigen::VectorXd& s) {
        return s.minCoeff() >= sc.min_spacing && s.sum() <= sc.array_length;
    };
    for (int c = 0; c < take; ++c) {
        Eigen::VectorXd spacing = Eigen::Map<const Eigen::VectorXd>(ranked[c].second.data(), m - 1);
        SlotBeamforming cur = cache.at(ranked[c].second);
        double step = 0.5 * grid_step;
        while (step >= opts.refine_tolerance * sc.wavelength) {
            bool moved = false;
            for (int d = 0; d < m - 1 && !moved; ++d)
                for (double sign : {1.0, -1.0}) {
                    Eigen::VectorXd trial = spacing;
                    trial[d] += sign * step;
                    if (!admissible(trial)) continue;
                    auto [x, bf] = evaluate(trial, &cur.w);
                    if (bf.rate > cur.rate + 1e-12) {
                        spacing = trial;
                        cur = std::move(bf);
                        moved = true;
                        break;
                    }
                }
            if (!moved) step *= 0.5;
        }
        if (cur.rate > res.rate) {
            res.rate = cur.rate;
            res.w = cur.w;
            res.layout = evaluate(spacing, &cur.w).first;
        }
    }
    return res;
}

const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::Cosine: return "cosine";
        case BoundKind::SignalQuadratic: return "signal_quadratic";
        case BoundKind::InterferenceQuadratic: return "interference_quadratic";
        case BoundKind::TrajectoryFirstTerm: return "trajectory_first_term";
    }
    return "unknown";
}

int sampled_bound_check(BoundKind kind, int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("sampled bound check: trials must be at least 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal;
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    auto beam = [&](int m) {
        Eigen::VectorXcd w(m);
        for (int i = 0; i < m; ++i) w[i] = {normal(rng), normal(rng)};
        return w;
    };
    auto positions = [&](int m, double length) {
        Eigen::VectorXd x(m);
        for (int i = 0; i < m; ++i) x[i] = uniform(0.0, length);
        std::sort(x.data(), x.data() + m);
        return x;
    };
    constexpr double tol = 1e-9;
    const double pi = std::numbers::pi;

    int violations = 0;
    for (int t = 0; t < trials; ++t) {
        switch (kind) {
            case BoundKind::Cosine: {
                const double b0 = uniform(-10.0 * pi, 10.0 * pi);
                const double b = b0 + uniform(-10.0, 10.0);
                const double c = std::cos(b);
                if (cos_minorant(b, b0) > c + tol || cos_majorant(b, b0) < c - tol) ++violations;
                break;
            }
            case BoundKind::SignalQuadratic:
            case BoundKind::InterferenceQuadratic: {
                const int m = 1 + static_cast<int>(rng() % 6);
                const double wavelength = 1.0;
                const Eigen::VectorXcd w = beam(m);
                const double theta = uniform(0.0, 0.5 * pi);
                const double vt = spatial_frequency(theta, wavelength);
                const Eigen::VectorXd x_prev = positions(m, 8.0);
                const Eigen::VectorXd x = unit(rng) < 0.5 ? positions(m, 8.0)
                                                          : Eigen::VectorXd(x_prev + 0.05 * Eigen::VectorXd::Random(m));
                const double exact = beam_gain(x, w, theta, wavelength);
                const double scale = 1.0 + w.cwiseAbs().sum() * w.cwiseAbs().sum();
                if (kind == BoundKind::SignalQuadratic) {
                    if (assemble_signal_quadratic(w, vt, x_prev).eval(x) > exact + tol * scale) ++violations;
                } else {
                    if (assemble_interference_quadratic(w, vt, x_prev).eval(x) < exact - tol * scale) ++violations;
                }
                break;
            }
            case BoundKind::TrajectoryFirstTerm: {
                Scenario sc = with_random_users(paper_default(), 1 + static_cast<int>(rng() % 3), 500.0, rng());
                sc.slots = 2;
                sc.antennas = 1 + static_cast<int>(rng() % 6);
                Trajectory q;
                AntennaLayout x;
                BeamformerSet w;
                for (int n = 0; n <= sc.slots; ++n) q.q.emplace_back(uniform(0.0, 500.0), uniform(0.0, 500.0));
                for (int s = 0; s < sc.slots; ++s) {
                    x.x.push_back(positions(sc.antennas, sc.array_length));
                    std::vector<Eigen::VectorXcd> ws;
                    for (int k = 0; k < sc.user_count(); ++k) ws.push_back(0.5 * beam(sc.antennas));
                    w.w.push_back(ws);
                }
                const auto terms = trajectory_surrogate(sc, w, x, q);
                const int s = static_cast<int>(rng() % sc.slots);
                const Vec2 probe(uniform(-200.0, 700.0), uniform(-200.0, 700.0));
                for (int k = 0; k < sc.user_count(); ++k) {
                    const double theta = steering_angle(q.q[s + 1], sc.users[k], sc.altitude);
                    const Eigen::VectorXcd a = steering_vector(x.x[s], theta, sc.wavelength);
                    double received = 0.0;
                    for (const auto& wl : w.w[s]) received += std::norm(a.dot(wl));
                    const double d = (probe - sc.users[k]).squaredNorm() + sc.altitude * sc.altitude;
                    const double exact = std::log2(sc.ref_gain * received / d + sc.noise_power[k]);
                    if (terms.r1(s, k, d) > exact + tol * std::max(1.0, std::abs(exact))) ++violations;
                }
                break;
            }
        }
    }
    return violations;
}

}  // namespace mauav::oracle
