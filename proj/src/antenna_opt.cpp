#include "mauav/antenna_opt.hpp"

#include <algorithm>
#include <cmath>

#include "mauav/channel.hpp"
#include "mauav/sca_bounds.hpp"
#include "parallel.hpp"

namespace mauav {

using conic::Affine;

std::vector<std::vector<double>> dinkelbach_eta(const Scenario& sc, const Trajectory& q, const AntennaLayout& x,
                                                const BeamformerSet& w) {
    std::vector<std::vector<double>> eta(sc.slots);
    for (int s = 0; s < sc.slots; ++s)
        for (int k = 0; k < sc.user_count(); ++k)
            eta[s].push_back(sinr(sc, link_geometry(sc, q.q[s + 1], k), x.x[s], w.w[s], k));
    return eta;
}

Eigen::VectorXd AntennaProgram::layout(const conic::Solution& sol, std::size_t position) const {
    return length_unit * sol.x.segment(layout_var[position], antennas);
}

namespace {

constexpr double kSilentBeam = 1e-12;
constexpr double kNegligibleWeight = 1e-9;

std::vector<Affine> rows_times(const Eigen::MatrixXd& f, const conic::VectorVar& x) {
    std::vector<Affine> out;
    for (Eigen::Index r = 0; r < f.rows(); ++r) {
        Affine a;
        for (Eigen::Index c = 0; c < f.cols(); ++c)
            if (f(r, c) != 0.0) a += f(r, c) * x[static_cast<int>(c)];
        out.push_back(a);
    }
    return out;
}

Affine linear_part(const QuadraticSurrogate& s, const conic::VectorVar& x) {
    Affine a(s.c);
    for (Eigen::Index m = 0; m < s.b.size(); ++m) a += s.b[m] * x[static_cast<int>(m)];
    return a;
}

}  // namespace

AntennaProgram build_p4i(const Scenario& sc, const BeamformerSet& w, const Trajectory& q, const AntennaLayout& x_prev,
                         const std::vector<std::vector<double>>& eta, const std::vector<int>& slots) {
    const int users = sc.user_count();
    const int m = sc.antennas;
    AntennaProgram out;
    out.slots = slots;
    out.antennas = m;
    out.length_unit = sc.wavelength;
    const double unit = out.length_unit;

    conic::ProgramBuilder b;
    Affine objective;
    for (int s : slots) {
        const std::string tag = std::to_string(s);
        const auto xv = b.add_vector("x_" + tag, m);
        out.layout_var.push_back(xv.offset);
        const Eigen::VectorXd x0 = x_prev.x[s] / unit;
        for (int i = 0; i < m; ++i) b.set_start(xv.offset + i, x0[i]);

        b.add_nonnegative(xv[0]);
        b.add_less_equal(xv[m - 1], Affine(sc.array_length / unit));
        for (int i = 0; i + 1 < m; ++i) b.add_less_equal(xv[i] + sc.min_spacing / unit, xv[i + 1]);

        std::vector<LinkGeometry> geo;
        std::vector<double> h2s;
        double heaviest = 0.0;
        for (int k = 0; k < users; ++k) {
            geo.push_back(link_geometry(sc, q.q[s + 1], k));
            h2s.push_back(geo[k].gain * geo[k].gain / sc.noise_power[k]);
            heaviest = std::max(heaviest, h2s[k] * std::max(1.0, eta[s][k]));
        }
        // Terms that cannot move the objective by more than a 1e-9 fraction are left out;
        // keeping them only degrades the conditioning.
        auto silent = [&](int l) { return w.w[s][l].squaredNorm() <= kSilentBeam * sc.max_power; };

        std::vector<int> sig_vars(users, -1);
        std::vector<std::vector<int>> leak_vars(users, std::vector<int>(users, -1));
        for (int k = 0; k < users; ++k) {
            const double vt = geo[k].vartheta * unit;
            const double h2 = h2s[k];
            const std::string kt = tag + "_" + std::to_string(k);

            if (!silent(k)) {
            const auto sig = assemble_signal_quadratic(w.w[s][k], vt, x0);
            const auto delta = b.add_scalar("delta_" + kt);
            sig_vars[k] = delta.index;
            b.add_rotated_second_order(linear_part(sig, xv) - Affine(delta), Affine(1.0),
                                       rows_times(sig.curvature_factor(), xv));
            const double s0 = sig.eval(x0);
            b.set_start(delta.index, s0 - 0.01 * (1.0 + std::abs(s0)));
            objective += h2 * Affine(delta);
            }

            if (!(eta[s][k] * h2 > kNegligibleWeight * heaviest)) continue;
            for (int l = 0; l < users; ++l) {
                if (l == k || silent(l)) continue;
                const auto itf = assemble_interference_quadratic(w.w[s][l], vt, x0);
                const auto zeta = b.add_scalar("zeta_" + kt + "_" + std::to_string(l));
                leak_vars[k][l] = zeta.index;
                b.add_rotated_second_order(Affine(zeta) - linear_part(itf, xv), Affine(1.0),
                                           rows_times(itf.curvature_factor(), xv));
                const double i0 = itf.eval(x0);
                b.set_start(zeta.index, i0 + 0.01 * (1.0 + std::abs(i0)));
                objective -= (eta[s][k] * h2) * Affine(zeta);
            }
        }
        out.signal_var.push_back(sig_vars);
        out.leak_var.push_back(leak_vars);
    }
    b.maximize(objective);
    out.program = b.build();
    return out;
}

AntennaProgram build_p4i(const Scenario& sc, const BeamformerSet& w, const Trajectory& q, const AntennaLayout& x_prev,
                         const std::vector<std::vector<double>>& eta) {
    std::vector<int> slots(sc.slots);
    for (int s = 0; s < sc.slots; ++s) slots[s] = s;
    return build_p4i(sc, w, q, x_prev, eta, slots);
}

bool AntennaUpdate::all_failed() const {
    for (bool s : solved)
        if (s) return false;
    return !solved.empty();
}

int AntennaUpdate::rejections() const {
    int n = 0;
    for (std::size_t s = 0; s < solved.size(); ++s)
        if (solved[s] && !accepted[s]) ++n;
    return n;
}

AntennaUpdate solve_p4i_with_safeguard(const Scenario& sc, const BeamformerSet& w, const Trajectory& q,
                                       const AntennaLayout& x_prev, const std::vector<std::vector<double>>& eta,
                                       const conic::SolverOptions& opts, int jobs, int max_halvings) {
    struct Outcome {
        conic::Status status = conic::Status::NumericalFailure;
        std::string message;
        Eigen::VectorXd x;
    };
    std::vector<Outcome> outcomes(sc.slots);
    detail::parallel_for(sc.slots, jobs, [&](int s) {
        const auto prog = build_p4i(sc, w, q, x_prev, eta, {s});
        const auto sol = conic::solve(prog.program, opts);
        outcomes[s].status = sol.status;
        outcomes[s].message = sol.message;
        if (sol.ok()) outcomes[s].x = prog.layout(sol, 0);
    });

    AntennaUpdate up;
    up.x = x_prev;
    up.rate_before = total_rate(sc, q, x_prev, w);
    const double slack = 1e-9 / sc.slots;
    for (int s = 0; s < sc.slots; ++s) {
        auto& o = outcomes[s];
        up.status.push_back(o.status);
        const bool solved = o.status == conic::Status::Optimal;
        bool accept = false;
        std::string msg = o.message;
        if (solved) {
            // Clean interior-point residue so the exact spacing and range checks hold.
            Eigen::VectorXd target = o.x;
            target[0] = std::max(target[0], 0.0);
            for (int i = 1; i < target.size(); ++i)
                target[i] = std::max(target[i], target[i - 1] + sc.min_spacing);
            Scenario one = sc;
            one.slots = 1;
            const double before = slot_rate(sc, q.q[s + 1], x_prev.x[s], w.w[s]);
            bool any_feasible = false;
            double step = 1.0;
            for (int j = 0; j <= max_halvings && !accept; ++j, step *= 0.5) {
                AntennaLayout probe;
                probe.x = {x_prev.x[s] + step * (target - x_prev.x[s])};
                if (!check_layout(one, probe).empty()) continue;
                any_feasible = true;
                if (slot_rate(sc, q.q[s + 1], probe.x[0], w.w[s]) >= before - slack) {
                    up.x.x[s] = probe.x[0];
                    accept = true;
                }
            }
            if (!accept) msg += any_feasible ? "; rejected: exact rate decreased" : "; rejected: layout infeasible";
        }
        up.solved.push_back(solved);
        up.accepted.push_back(accept);
        up.messages.push_back(msg);
    }
    up.rate_after = total_rate(sc, q, up.x, w);
    return up;
}

AntennaUpdate update_antennas(const Scenario& sc, const BeamformerSet& w, const Trajectory& q,
                              const AntennaLayout& x_prev, const conic::SolverOptions& opts, int jobs, int max_halvings) {
    return solve_p4i_with_safeguard(sc, w, q, x_prev, dinkelbach_eta(sc, q, x_prev, w), opts, jobs, max_halvings);
}

}  // namespace mauav
