#include "mauav/beamforming.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mauav/channel.hpp"
#include "mauav/sca_bounds.hpp"
#include "parallel.hpp"

namespace mauav {

using conic::Affine;

Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& w) {
    if (w.size() == 0) return w;
    const Eigen::MatrixXcd h = 0.5 * (w + w.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

RankOneExtraction extract_rank_one(const Eigen::MatrixXcd& w, double ratio_threshold) {
    RankOneExtraction out;
    const auto m = w.rows();
    out.w = Eigen::VectorXcd::Zero(m);
    if (m == 0) return out;
    const Eigen::MatrixXcd h = 0.5 * (w + w.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double norm = ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() < -1e-6 * std::max(1.0, norm))
        throw std::invalid_argument("extract_rank_one: matrix is not positive semidefinite");
    const double l1 = std::max(ev[m - 1], 0.0);
    const double l2 = m > 1 ? std::max(ev[m - 2], 0.0) : 0.0;
    if (l1 > 0.0) {
        out.w = std::sqrt(l1) * es.eigenvectors().col(m - 1);
        out.eigen_ratio = l2 / l1;
    }
    out.inexact = out.eigen_ratio > ratio_threshold;
    out.reconstruction_error = (h - out.w * out.w.adjoint()).norm();
    return out;
}

std::vector<std::vector<Eigen::MatrixXcd>> BeamformingProgram::matrices(const conic::Solution& sol) const {
    std::vector<std::vector<Eigen::MatrixXcd>> out;
    for (const auto& row : vars) {
        std::vector<Eigen::MatrixXcd> m;
        for (const auto& v : row) m.push_back(power_unit * sol.value(v));
        out.push_back(std::move(m));
    }
    return out;
}

BeamformingProgram build_p2i(const Scenario& sc, const AntennaLayout& x, const Trajectory& q,
                             const BeamformerSet& w_prev, const std::vector<int>& slots) {
    const int users = sc.user_count();
    const int m = sc.antennas;
    BeamformingProgram out;
    out.slots = slots;
    out.power_unit = sc.max_power;
    const double unit = out.power_unit;

    conic::ProgramBuilder b;
    Affine linear;
    double offset = 0.0;
    std::vector<Affine> log_args;
    std::vector<double> log_start;

    for (int s : slots) {
        std::vector<conic::HermitianVar> row;
        for (int k = 0; k < users; ++k) row.push_back(b.add_hermitian("W_" + std::to_string(s) + "_" + std::to_string(k), m));
        out.vars.push_back(row);

        // Noise-normalised covariances.
        auto lambda = channel_covariances(sc, q.q[s + 1], x.x[s]);
        std::vector<Eigen::MatrixXcd> prev;
        for (int k = 0; k < users; ++k) prev.push_back(w_prev.w[s][k] * w_prev.w[s][k].adjoint());
        for (int k = 0; k < users; ++k) lambda[k] /= sc.noise_power[k];
        const auto lin = beamforming_linearization(prev, lambda, std::vector<double>(users, 1.0));
        out.reference_bits += relaxed_slot_rate(lambda, prev, std::vector<double>(users, 1.0));

        Affine power;
        for (int k = 0; k < users; ++k) {
            power += conic::trace(row[k]);
            b.add_psd(row[k]);
        }
        b.add_less_equal(power, 1.0);

        // Start: previous beams mixed with a scaled identity, strictly interior.
        std::vector<Eigen::MatrixXcd> start;
        for (int k = 0; k < users; ++k) {
            const Eigen::MatrixXcd w0 = 0.5 * prev[k] / unit + 0.25 / (users * m) * Eigen::MatrixXcd::Identity(m, m);
            start.push_back(w0);
            for (int i = 0; i < m; ++i) {
                b.set_start(row[k].diag_index(i), w0(i, i).real());
                for (int j = i + 1; j < m; ++j) {
                    b.set_start(row[k].re_index(i, j), w0(i, j).real());
                    b.set_start(row[k].im_index(i, j), w0(i, j).imag());
                }
            }
        }

        for (int k = 0; k < users; ++k) {
            Affine arg(1.0);
            double arg0 = 1.0;
            for (int l = 0; l < users; ++l) {
                arg += conic::trace_product(unit * lambda[k], row[l]);
                arg0 += unit * (lambda[k] * start[l]).trace().real();
                if (l != k) {
                    linear -= conic::trace_product(unit * lin.delta[k], row[l]);
                    offset += (lin.delta[k] * prev[l]).trace().real();
                }
            }
            offset -= std::log2(lin.interference[k] + 1.0);
            log_args.push_back(arg);
            log_start.push_back(arg0);
        }
    }

    b.maximize(linear);
    for (std::size_t i = 0; i < log_args.size(); ++i) {
        const auto t = b.add_log_term(std::numbers::log2e, log_args[i]);
        b.set_start(t.index, std::log(log_start[i]) - 1.0);
    }
    out.program = b.build();
    out.bits_offset = offset;
    return out;
}

BeamformingProgram build_p2i(const Scenario& sc, const AntennaLayout& x, const Trajectory& q,
                             const BeamformerSet& w_prev) {
    std::vector<int> slots(sc.slots);
    for (int s = 0; s < sc.slots; ++s) slots[s] = s;
    return build_p2i(sc, x, q, w_prev, slots);
}

conic::SolverOptions BeamformingProgram::solver_options(conic::SolverOptions base) const {
    base.gap_floor = std::min(base.gap_floor, std::max(reference_bits, 1e-12));
    return base;
}

BeamformingSolution solve_p2i(const BeamformingProgram& prog, const conic::SolverOptions& opts) {
    BeamformingSolution out;
    out.solution = conic::solve(prog.program, prog.solver_options(opts));
    if (!out.solution.ok())
        throw std::runtime_error(std::string("beamforming solve failed (") + conic::to_string(out.solution.status) +
                                 "): " + out.solution.message);
    out.matrices = prog.matrices(out.solution);
    for (auto& row : out.matrices)
        for (auto& m : row) m = project_psd(m);
    out.surrogate_bits = prog.surrogate_bits(out.solution);
    return out;
}

bool BeamformingReport::all_failed() const {
    for (auto st : status)
        if (st == conic::Status::Optimal) return false;
    return !status.empty();
}

namespace {

void clamp_power(std::vector<Eigen::VectorXcd>& w, double budget) {
    double p = 0.0;
    for (const auto& v : w) p += v.squaredNorm();
    if (p > budget) {
        const double s = std::sqrt(budget / p);
        for (auto& v : w) v *= s;
    }
}

struct SlotOutcome {
    std::vector<Eigen::VectorXcd> w;
    conic::Status status = conic::Status::NumericalFailure;
    std::string message;
    std::vector<double> ratios;
    int inexact = 0;
    bool fallback = false;
};

SlotOutcome solve_slot(const Scenario& sc, const AntennaLayout& x, const Trajectory& q, const BeamformerSet& w_prev,
                       int slot, const BeamformingOptions& opts) {
    SlotOutcome out;
    const auto prog = build_p2i(sc, x, q, w_prev, {slot});
    const auto sol = conic::solve(prog.program, prog.solver_options(opts.solver));
    out.status = sol.status;
    out.message = sol.message;
    if (!sol.ok()) return out;

    const auto mats = prog.matrices(sol);
    std::vector<Eigen::MatrixXcd> proj;
    bool need_fallback = false;
    for (const auto& m : mats[0]) {
        proj.push_back(project_psd(m));
        const auto r1 = extract_rank_one(proj.back(), opts.rank_threshold);
        // Beams switched off by the solver carry only interior-point noise.
        const bool negligible = proj.back().trace().real() <= 1e-6 * sc.max_power;
        out.w.push_back(negligible ? Eigen::VectorXcd::Zero(sc.antennas) : r1.w);
        if (!negligible) {
            out.ratios.push_back(r1.eigen_ratio);
            if (r1.inexact) {
                ++out.inexact;
                need_fallback = true;
            }
        }
    }
    clamp_power(out.w, sc.max_power);
    if (!need_fallback) return out;

    // Gaussian randomisation around the relaxed covariances.
    out.fallback = true;
    const Vec2& pos = q.q[slot + 1];
    double best = slot_rate(sc, pos, x.x[slot], out.w);
    std::mt19937_64 rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(slot));
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    std::vector<Eigen::MatrixXcd> roots;
    for (const auto& m : proj) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        roots.push_back(es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal());
    }
    for (int s = 0; s < opts.randomization_samples; ++s) {
        std::vector<Eigen::VectorXcd> cand;
        for (std::size_t k = 0; k < proj.size(); ++k) {
            Eigen::VectorXcd r(sc.antennas);
            for (auto& e : r) e = {g(rng), g(rng)};
            Eigen::VectorXcd v = roots[k] * r;
            const double n2 = v.squaredNorm();
            if (n2 > 0.0) v *= std::sqrt(proj[k].trace().real() / n2);
            cand.push_back(v);
        }
        clamp_power(cand, sc.max_power);
        const double r = slot_rate(sc, pos, x.x[slot], cand);
        if (r > best) {
            best = r;
            out.w = std::move(cand);
        }
    }
    return out;
}

}  // namespace

BeamformingReport update_beamformers(const Scenario& sc, const AntennaLayout& x, const Trajectory& q,
                                     const BeamformerSet& w_prev, const BeamformingOptions& opts) {
    std::vector<SlotOutcome> outcomes(sc.slots);
    detail::parallel_for(sc.slots, opts.jobs,
                         [&](int s) { outcomes[s] = solve_slot(sc, x, q, w_prev, s, opts); });

    BeamformingReport rep;
    rep.w = w_prev;
    rep.rate_before = total_rate(sc, q, x, w_prev);
    for (int s = 0; s < sc.slots; ++s) {
        auto& o = outcomes[s];
        rep.status.push_back(o.status);
        rep.messages.push_back(o.message);
        bool accept = false;
        if (o.status == conic::Status::Optimal) {
            rep.eigen_ratios.insert(rep.eigen_ratios.end(), o.ratios.begin(), o.ratios.end());
            rep.inexact += o.inexact;
            rep.fallback_used += o.fallback ? 1 : 0;
            const double before = slot_rate(sc, q.q[s + 1], x.x[s], w_prev.w[s]);
            const double after = slot_rate(sc, q.q[s + 1], x.x[s], o.w);
            accept = after >= before;
            if (accept) rep.w.w[s] = std::move(o.w);
        }
        rep.accepted.push_back(accept);
    }
    rep.rate_after = total_rate(sc, q, x, rep.w);
    return rep;
}

}  // namespace mauav
