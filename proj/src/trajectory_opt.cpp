#include "mauav/trajectory_opt.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mauav/channel.hpp"

namespace mauav {

using conic::Affine;

namespace {

struct Point {
    Affine x, y;
};

Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }

}  // namespace

bool TrajectoryProgram::has_variables() const {
    for (int v : position_var)
        if (v >= 0) return true;
    return false;
}

Trajectory TrajectoryProgram::trajectory(const conic::Solution& sol) const {
    Trajectory out = q_prev;
    for (std::size_t n = 0; n < position_var.size(); ++n)
        if (position_var[n] >= 0)
            out.q[n] = length_unit * Vec2(sol.x[position_var[n]], sol.x[position_var[n] + 1]);
    return out;
}

std::vector<std::vector<double>> TrajectoryProgram::slack(const conic::Solution& sol) const {
    std::vector<std::vector<double>> z(slack_var.size());
    for (std::size_t s = 0; s < slack_var.size(); ++s)
        for (std::size_t k = 0; k < slack_var[s].size(); ++k) {
            const double ln_d = std::log(terms.terms[s][k].d_prev);
            z[s].push_back(slack_var[s][k] >= 0 ? sol.x[slack_var[s][k]] - ln_d : -ln_d);
        }
    return z;
}

double TrajectoryProgram::surrogate_bits(const Trajectory& q, const std::vector<std::vector<double>>& z) const {
    double total = 0.0;
    for (std::size_t s = 0; s < terms.terms.size(); ++s)
        for (std::size_t k = 0; k < terms.terms[s].size(); ++k) {
            const int si = static_cast<int>(s), ki = static_cast<int>(k);
            total += terms.r1(si, ki, terms.dist2(ki, q.q[s + 1])) - terms.r2(si, ki, z[s][k]);
        }
    return total;
}

TrajectoryProgram build_p3i(const Scenario& sc, const BeamformerSet& w, const AntennaLayout& x,
                            const Trajectory& q_prev) {
    const int slots = sc.slots;
    const int users = sc.user_count();
    const double tau = sc.slot_length();
    for (int n = 2; n <= slots; ++n)
        if ((q_prev.q[n] - q_prev.q[n - 1]).norm() <= 1e-12 * (1.0 + q_prev.q[n].norm()))
            throw std::invalid_argument("trajectory program: zero displacement at slot " + std::to_string(n) +
                                        " leaves the minimum-speed linearisation empty");

    TrajectoryProgram out;
    out.q_prev = q_prev;
    out.terms = trajectory_surrogate(sc, w, x, q_prev);
    out.length_unit = std::max(sc.altitude, 1.0);
    const double unit = out.length_unit;
    const double u2 = unit * unit;

    conic::ProgramBuilder b;
    std::vector<Point> pos(slots + 1);
    out.position_var.assign(slots + 1, -1);
    for (int n = 0; n <= slots; ++n) {
        const bool fixed = n == 0 || (sc.fix_endpoints && n == slots);
        const Vec2 p = q_prev.q[n] / unit;
        if (fixed) {
            pos[n] = {Affine(p.x()), Affine(p.y())};
            continue;
        }
        const auto v = b.add_vector("q_" + std::to_string(n), 2);
        out.position_var[n] = v.offset;
        pos[n] = {v[0], v[1]};
        b.set_start(v.offset, p.x());
        b.set_start(v.offset + 1, p.y());
    }

    // Kinematics; speed limits from slot 2, acceleration from slot 3.
    for (int n = 2; n <= slots; ++n) {
        const Point step = pos[n] - pos[n - 1];
        b.add_second_order(Affine(sc.v_max * tau / unit), {step.x, step.y});
        const Vec2 d0 = (q_prev.q[n] - q_prev.q[n - 1]) / unit;
        const double vmin2 = std::pow(sc.v_min * tau / unit, 2);
        Affine lin = 2.0 * d0.x() * step.x + 2.0 * d0.y() * step.y;
        lin -= d0.squaredNorm() + vmin2;
        b.add_nonnegative(lin);
    }
    for (int n = 3; n <= slots; ++n) {
        const Point acc{pos[n].x - 2.0 * pos[n - 1].x + pos[n - 2].x, pos[n].y - 2.0 * pos[n - 1].y + pos[n - 2].y};
        b.add_second_order(Affine(sc.a_max * tau * tau / unit), {acc.x, acc.y});
    }

    Affine objective;
    out.slack_var.assign(slots, std::vector<int>(users, -1));
    for (int s = 0; s < slots; ++s) {
        const Point& p = pos[s + 1];
        const Vec2 p0 = q_prev.q[s + 1];
        for (int k = 0; k < users; ++k) {
            const auto& term = out.terms.terms[s][k];
            const Vec2 su = sc.users[k] / unit;
            const std::string tag = std::to_string(s) + "_" + std::to_string(k);

            const double slope = out.terms.r1_slope(s, k);
            if (slope < 0.0) {
                // e >= |q - s|^2 in scaled units; d = unit^2 e + H^2.
                const auto e = b.add_scalar("e_" + tag);
                b.add_rotated_second_order(e, Affine(1.0), {p.x - su.x(), p.y - su.y()});
                objective += (slope * u2) * Affine(e);
                b.set_start(e.index, 1.1 * (p0 / unit - su).squaredNorm() + 0.01);
            }

            if (!(term.upsilon > 0.0)) continue;
            const double sigma2 = sc.noise_power[k];
            const double g = term.upsilon / (sigma2 * term.d_prev);
            const Vec2 r0 = p0 - sc.users[k];
            // d_lin / d_prev, affine in the scaled position.
            Affine dlin(1.0 - 2.0 * r0.dot(p0) / term.d_prev);
            dlin += (2.0 * r0.x() * unit / term.d_prev) * p.x;
            dlin += (2.0 * r0.y() * unit / term.d_prev) * p.y;

            const auto zh = b.add_scalar("z_" + tag);
            const auto u = b.add_scalar("u_" + tag);
            const auto p1 = b.add_scalar("p_" + tag);
            const auto p2 = b.add_scalar("r_" + tag);
            out.slack_var[s][k] = zh.index;
            b.add_exponential(-Affine(zh), Affine(1.0), dlin);
            b.add_exponential(Affine(zh) - Affine(u) + std::log(g), Affine(1.0), p1);
            b.add_exponential(-Affine(u), Affine(1.0), p2);
            b.add_less_equal(Affine(p1) + Affine(p2), Affine(1.0));
            objective -= std::numbers::log2e * Affine(u);

            const double z0 = 0.1, u0 = std::log(g * std::exp(z0) + 1.0) + 0.1;
            b.set_start(zh.index, z0);
            b.set_start(u.index, u0);
            b.set_start(p1.index, 1.02 * g * std::exp(z0 - u0));
            b.set_start(p2.index, 1.02 * std::exp(-u0));
        }
    }
    b.maximize(objective);
    out.program = b.build();
    return out;
}

TrajectoryIterate solve_p3i(const TrajectoryProgram& prog, const conic::SolverOptions& opts) {
    TrajectoryIterate out;
    out.solution = conic::solve(prog.program, opts);
    if (!out.solution.ok())
        throw std::runtime_error(std::string("trajectory solve failed (") + conic::to_string(out.solution.status) +
                                 "): " + out.solution.message);
    out.q = prog.trajectory(out.solution);
    out.z = prog.slack(out.solution);
    out.surrogate_bits = prog.surrogate_bits(out.q, out.z);
    return out;
}

TrajectoryUpdate update_trajectory(const Scenario& sc, const BeamformerSet& w, const AntennaLayout& x,
                                   const Trajectory& q_prev, const conic::SolverOptions& opts, int max_halvings) {
    TrajectoryUpdate up;
    up.q = q_prev;
    up.rate_before = total_rate(sc, q_prev, x, w);
    up.rate_after = up.rate_before;

    const TrajectoryProgram prog = build_p3i(sc, w, x, q_prev);
    if (!prog.has_variables()) {
        up.status = conic::Status::Optimal;
        up.solved = true;
        up.message = "no free positions";
        return up;
    }
    const auto sol = conic::solve(prog.program, opts);
    up.status = sol.status;
    up.message = sol.message;
    if (!sol.ok()) return up;
    up.solved = true;

    const Trajectory target = prog.trajectory(sol);
    double step = 1.0;
    for (int j = 0; j <= max_halvings; ++j, step *= 0.5) {
        Trajectory cand = q_prev;
        for (std::size_t n = 0; n < cand.q.size(); ++n) cand.q[n] = q_prev.q[n] + step * (target.q[n] - q_prev.q[n]);
        if (!check_trajectory(sc, cand).empty()) continue;
        const double r = total_rate(sc, cand, x, w);
        if (r >= up.rate_before) {
            up.q = std::move(cand);
            up.rate_after = r;
            up.step = step;
            up.accepted = true;
            return up;
        }
    }
    return up;
}

}  // namespace mauav
