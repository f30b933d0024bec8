#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mauav/antenna_opt.hpp"
#include "mauav/ao_driver.hpp"
#include "mauav/beamforming.hpp"
#include "mauav/channel.hpp"
#include "mauav/oracle.hpp"
#include "mauav/sca_bounds.hpp"
#include "mauav/trajectory_opt.hpp"

using namespace mauav;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Timed {
    AoResult result;
    double seconds = 0.0;
};

Timed timed_optimize(const Scenario& sc, const AoOptions& o) {
    const auto t0 = Clock::now();
    Timed t{optimize(sc, o), 0.0};
    t.seconds = seconds_since(t0);
    return t;
}

AoOptions fpa_options() {
    AoOptions o;
    o.fpa = true;
    return o;
}

// Runs retained for the feasibility and rank audits.
struct Audit {
    std::vector<std::string> labels;
    std::vector<const AoResult*> runs;
    void add(const std::string& label, const AoResult& r) {
        labels.push_back(label);
        runs.push_back(&r);
    }
};

struct Verdict {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

bool trace_monotone(const AoTrace& tr, double tol) {
    double prev = tr.initial_objective;
    for (const auto& it : tr.iterations) {
        if (it.objective < prev - tol) return false;
        prev = it.objective;
    }
    return true;
}

int report(int id, const Verdict& v, const std::string& summary) {
    std::printf("criterion %d: %s  %s%s%s\n", id, v.pass ? "PASS" : "FAIL", summary.c_str(),
                v.detail.empty() ? "" : " | failed: ", v.detail.c_str());
    std::fflush(stdout);
    return v.pass ? 0 : 1;
}

Scenario random_default(std::uint64_t seed) { return with_random_users(paper_default(), 3, 500.0, seed); }

Scenario tiny_instance(std::uint64_t seed) {
    Scenario sc = with_random_users(paper_default(), 2, 500.0, seed);
    sc.antennas = 2;
    sc.slots = 1;
    sc.q_init = Vec2(50.0, 250.0);
    sc.q_final = Vec2(250.0, 250.0);
    return sc;
}

Scenario single_user(int antennas) {
    Scenario sc = paper_default();
    sc.users = {sc.users[1]};
    sc.noise_power = {sc.noise_power[1]};
    sc.antennas = antennas;
    sc.slots = 1;
    sc.duration = 4.0;
    sc.q_final = sc.q_init + Vec2(40.0, 0.0);
    return sc;
}

}  // namespace

int main() {
    int failures = 0;
    Audit audit;
    const auto t_all = Clock::now();

    // 1. Monotone convergence on the default scenario, M = 4 and 6.
    std::vector<Timed> default_runs;
    {
        Verdict v;
        std::string summary;
        for (int m : {4, 6}) {
            Scenario sc = paper_default();
            sc.antennas = m;
            default_runs.push_back(timed_optimize(sc, AoOptions{}));
            const Timed& t = default_runs.back();
            const AoTrace& tr = t.result.trace;
            const std::string tag = "M=" + std::to_string(m);
            v.require(trace_monotone(tr, 1e-6), tag + " trace decreases");
            v.require(tr.reason == StopReason::Epsilon, tag + " stopped by " + to_string(tr.reason));
            v.require(tr.iterations.size() <= 30, tag + " used more than 30 iterations");
            v.require(!tr.iterations.empty() && tr.iterations.back().gain <= 1e-3, tag + " last gain above 1e-3");
            v.require(t.seconds < 300.0, tag + " slower than 5 min");
            summary += tag + ": " + fmt("%.6f bits", tr.final_objective()) + ", " +
                       std::to_string(tr.iterations.size()) + " it, " + fmt("%.1f s", t.seconds) + "; ";
        }
        audit.add("default M=4", default_runs[0].result);
        audit.add("default M=6", default_runs[1].result);
        failures += report(1, v, summary);
    }

    // 2. MA >= FPA on the default scenario and on five random user drops.
    std::vector<Timed> fpa_default;
    std::vector<AoResult> seed_runs;
    {
        Verdict v;
        fpa_default.push_back(timed_optimize(paper_default(), fpa_options()));
        audit.add("default FPA", fpa_default[0].result);
        const double ma0 = default_runs[0].result.trace.final_objective();
        const double fpa0 = fpa_default[0].result.trace.final_objective();
        v.require(ma0 >= fpa0 - 1e-6, "default MA below FPA");
        std::string summary = fmt("default MA-FPA %.6f; seeds:", ma0 - fpa0);
        int strict = 0;
        seed_runs.reserve(10);
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Scenario sc = random_default(seed);
            seed_runs.push_back(optimize(sc, AoOptions{}));
            seed_runs.push_back(optimize(sc, fpa_options()));
            const double ma = seed_runs[seed_runs.size() - 2].trace.final_objective();
            const double fpa = seed_runs.back().trace.final_objective();
            v.require(ma >= fpa - 1e-6, "seed " + std::to_string(seed) + " MA below FPA");
            if (ma > fpa + 1e-6) ++strict;
            summary += fmt(" %.3g", ma - fpa);
        }
        for (std::size_t i = 0; i < seed_runs.size(); ++i)
            audit.add("seed " + std::to_string(i / 2 + 1) + (i % 2 ? " FPA" : " MA"), seed_runs[i]);
        v.require(strict >= 4, std::to_string(strict) + " of 5 strict");
        summary += "; strict on " + std::to_string(strict) + " of 5";
        failures += report(2, v, summary);
    }

    // 3. Single user, single slot: closed-form MRT rate and antenna-block invariance.
    std::vector<AoResult> single_runs;
    {
        Verdict v;
        std::string summary;
        single_runs.reserve(2);
        for (int m : {2, 4}) {
            const Scenario sc = single_user(m);
            single_runs.push_back(optimize(sc, AoOptions{}));
            const AoResult& r = single_runs.back();
            const auto link = link_geometry(sc, r.best.q.q[1], 0);
            const double expect = oracle::mrt_closed_form_rate(sc.max_power, m, link.gain, sc.noise_power[0]);
            const double got = r.trace.final_objective();
            const double rel = std::abs(got - expect) / expect;
            const std::string tag = "M=" + std::to_string(m);
            v.require(rel <= 1e-4, tag + fmt(" relative error %.3g", rel));
            double worst = 0.0;
            for (const auto& it : r.trace.iterations)
                for (const auto& b : it.blocks)
                    if (b.block == Block::Antenna && b.ran) worst = std::max(worst, std::abs(b.delta));
            const auto up = update_antennas(sc, r.best.w, r.best.q, r.best.x);
            worst = std::max(worst, std::abs(up.rate_after - up.rate_before));
            v.require(worst <= 1e-9, tag + fmt(" antenna block moved the rate by %.3g", worst));
            summary += tag + fmt(": AO %.7f vs %.7f (rel %.2g)", got, expect, rel) +
                       fmt(", antenna delta %.2g; ", worst);
        }
        audit.add("single user M=2", single_runs[0]);
        audit.add("single user M=4", single_runs[1]);
        failures += report(3, v, summary);
    }

    // 4. Tiny instances against the exhaustive layout oracle.
    std::vector<AoResult> tiny_runs;
    {
        Verdict v;
        std::string summary = "AO/oracle-1 (%):";
        int inside = 0;
        tiny_runs.reserve(10);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Scenario sc = tiny_instance(seed);
            const auto t0 = Clock::now();
            const auto orc = oracle::grid_oracle_antenna(sc, sc.q_final, sc.wavelength / 8);
            const double t_orc = seconds_since(t0);
            const auto t1 = Clock::now();
            tiny_runs.push_back(optimize(sc, AoOptions{}));
            const double t_ao = seconds_since(t1);
            const double got = tiny_runs.back().trace.final_objective();
            const std::string tag = "seed " + std::to_string(seed);
            const bool ok = got >= 0.95 * orc.rate && got <= orc.rate + 1e-4;
            if (ok) ++inside;
            v.require(got <= orc.rate + 1e-4, tag + " above the oracle");
            v.require(t_orc + t_ao < 120.0, tag + " slower than 2 min");
            summary += fmt(" %.1f", 100.0 * (got / orc.rate - 1.0));
        }
        for (std::size_t i = 0; i < tiny_runs.size(); ++i) audit.add("tiny seed " + std::to_string(i + 1), tiny_runs[i]);
        v.require(inside == 10, std::to_string(10 - inside) + " of 10 below oracle - 5%");
        summary += "; inside band on " + std::to_string(inside) + " of 10";
        failures += report(4, v, summary);
    }

    // 5. Bound suites and expansion-point tightness.
    {
        Verdict v;
        const int cos_bad = oracle::sampled_bound_check(oracle::BoundKind::Cosine, 10000, 1);
        const int sig_bad = oracle::sampled_bound_check(oracle::BoundKind::SignalQuadratic, 1000, 2);
        const int itf_bad = oracle::sampled_bound_check(oracle::BoundKind::InterferenceQuadratic, 1000, 3);
        const int trj_bad = oracle::sampled_bound_check(oracle::BoundKind::TrajectoryFirstTerm, 1000, 4);
        v.require(cos_bad == 0, std::to_string(cos_bad) + " cosine violations");
        v.require(sig_bad == 0, std::to_string(sig_bad) + " signal quadratic violations");
        v.require(itf_bad == 0, std::to_string(itf_bad) + " interference quadratic violations");
        v.require(trj_bad == 0, std::to_string(trj_bad) + " trajectory term violations");

        // Tightness at a tuned default iterate, where every block has non-trivial terms.
        const Scenario sc = paper_default();
        Iterate it = initialize(sc);
        it.w = update_beamformers(sc, it.x, it.q, it.w).w;
        double bf_err = 0.0, ant_err = 0.0;
        for (int s = 0; s < sc.slots; ++s) {
            const auto lam = channel_covariances(sc, it.q.q[s + 1], it.x.x[s]);
            std::vector<Eigen::MatrixXcd> prev;
            for (const auto& w : it.w.w[s]) prev.push_back(w * w.adjoint());
            const auto lin = beamforming_linearization(prev, lam, sc.noise_power);
            const double exact = relaxed_slot_rate(lam, prev, sc.noise_power);
            bf_err = std::max(bf_err, std::abs(beamforming_surrogate(lin, prev, prev, sc.noise_power) - exact) /
                                          std::max(1.0, std::abs(exact)));
            for (int k = 0; k < sc.user_count(); ++k) {
                const double theta = link_geometry(sc, it.q.q[s + 1], k).theta;
                const double vt = spatial_frequency(theta, sc.wavelength);
                for (int l = 0; l < sc.user_count(); ++l) {
                    const double g = beam_gain(it.x.x[s], it.w.w[s][l], theta, sc.wavelength);
                    const double scale = std::max(1.0, g);
                    const auto q1 = assemble_signal_quadratic(it.w.w[s][l], vt, it.x.x[s]);
                    const auto q2 = assemble_interference_quadratic(it.w.w[s][l], vt, it.x.x[s]);
                    ant_err = std::max({ant_err, std::abs(q1.eval(it.x.x[s]) - g) / scale,
                                        std::abs(q2.eval(it.x.x[s]) - g) / scale});
                }
            }
        }
        const auto p3 = build_p3i(sc, it.w, it.x, it.q);
        std::vector<std::vector<double>> z(sc.slots);
        for (int s = 0; s < sc.slots; ++s)
            for (int k = 0; k < sc.user_count(); ++k) z[s].push_back(-std::log(p3.terms.terms[s][k].d_prev));
        const double exact = total_rate(sc, it.q, it.x, it.w);
        const double trj_err = std::abs(p3.surrogate_bits(it.q, z) - exact) / std::max(1.0, exact);
        v.require(bf_err <= 1e-8, fmt("beamforming surrogate gap %.3g", bf_err));
        v.require(trj_err <= 1e-8, fmt("trajectory surrogate gap %.3g", trj_err));
        v.require(ant_err <= 1e-8, fmt("antenna surrogate gap %.3g", ant_err));
        const std::string summary = "violations cos/sig/itf/traj " + std::to_string(cos_bad) + "/" +
                                    std::to_string(sig_bad) + "/" + std::to_string(itf_bad) + "/" +
                                    std::to_string(trj_bad) +
                                    fmt("; tightness beamforming %.2g, trajectory %.2g, antenna %.2g", bf_err,
                                        trj_err, ant_err);
        failures += report(5, v, summary);
    }

    // 6. Exact feasibility of every accepted iterate of every run above.
    {
        Verdict v;
        std::size_t iterates = 0;
        for (std::size_t r = 0; r < audit.runs.size(); ++r) {
            const AoTrace& tr = audit.runs[r]->trace;
            iterates += tr.feasibility_violations.size();
            for (const auto& list : tr.feasibility_violations)
                if (!list.empty()) v.require(false, audit.labels[r] + ": " + list.front());
        }
        failures += report(6, v, std::to_string(iterates) + " accepted iterates over " +
                                      std::to_string(audit.runs.size()) + " runs");
    }

    // 7. Rank-one recovery over the runs of criteria 1 to 4.
    {
        Verdict v;
        int matrices = 0, rank_one = 0, fallbacks = 0;
        double worst = 0.0;
        for (const AoResult* r : audit.runs) {
            const RankStats& rs = r->trace.rank;
            fallbacks += rs.fallbacks;
            for (double ratio : rs.ratios) {
                ++matrices;
                if (ratio <= 1e-3) ++rank_one;
                worst = std::max(worst, ratio);
            }
        }
        const double share = matrices ? static_cast<double>(rank_one) / matrices : 0.0;
        v.require(matrices > 0, "no matrices recorded");
        v.require(share >= 0.99, fmt("rank-one share %.4f", share));
        failures += report(7, v,
                           std::to_string(rank_one) + " of " + std::to_string(matrices) +
                               fmt(" matrices rank one (%.2f%%), worst ratio %.2g", 100.0 * share, worst) + ", " +
                               std::to_string(fallbacks) + " fallbacks");
    }

    // 8. Sweep trends and the beam gain comparison.
    {
        Verdict v;
        std::string summary = "noise MA:";
        std::vector<double> noise_ma;
        for (double dbm : {-110.0, -105.0, -100.0}) {
            Scenario sc = paper_default();
            sc.noise_power.assign(sc.users.size(), dbm_to_watts(dbm));
            noise_ma.push_back(dbm == -110.0 ? default_runs[0].result.trace.final_objective()
                                             : optimize(sc, AoOptions{}).trace.final_objective());
            summary += fmt(" %.3f", noise_ma.back());
        }
        for (std::size_t i = 1; i < noise_ma.size(); ++i)
            v.require(noise_ma[i] <= noise_ma[i - 1] + 1e-6, "noise sweep increases");

        summary += "; power MA/gap:";
        std::vector<double> power_ma, power_gap;
        for (double p : {1.0, 2.0, 3.0}) {
            Scenario sc = paper_default();
            sc.max_power = p;
            double ma, fpa;
            if (p == 3.0) {
                ma = default_runs[0].result.trace.final_objective();
                fpa = fpa_default[0].result.trace.final_objective();
            } else {
                ma = optimize(sc, AoOptions{}).trace.final_objective();
                fpa = optimize(sc, fpa_options()).trace.final_objective();
            }
            power_ma.push_back(ma);
            power_gap.push_back(ma - fpa);
            summary += fmt(" %.3f/%.4f", ma, ma - fpa);
        }
        for (std::size_t i = 1; i < power_ma.size(); ++i) {
            v.require(power_ma[i] >= power_ma[i - 1] - 1e-6, "power sweep rate decreases");
            v.require(power_gap[i] >= power_gap[i - 1] - 1e-6,
                      fmt("power gap falls from %.4f to %.4f", power_gap[i - 1], power_gap[i]));
        }

        const double m4 = default_runs[0].result.trace.final_objective();
        const double m6 = default_runs[1].result.trace.final_objective();
        v.require(m6 >= m4 - 1e-6, "M=6 below M=4");
        summary += fmt("; M=4/6: %.3f/%.3f", m4, m6);

        const Scenario sc = paper_default();
        const int slot = (sc.slots + 1) / 2 - 1;
        const Iterate& ma = default_runs[0].result.best;
        const Iterate& fp = fpa_default[0].result.best;
        int user = -1;
        double theta = 0.0;
        for (int k = 0; k < sc.user_count(); ++k) {
            const double t = link_geometry(sc, ma.q.q[slot + 1], k).theta;
            if (ma.w.w[slot][k].squaredNorm() > 1e-6 * sc.max_power && (user < 0 || t < theta)) {
                user = k;
                theta = t;
            }
        }
        v.require(user >= 0, "no served user in the middle slot");
        if (user >= 0) {
            const double g_ma = beam_gain(ma.x.x[slot], ma.w.w[slot][user], theta, sc.wavelength);
            const double g_fpa = beam_gain(fp.x.x[slot], fp.w.w[slot][user], theta, sc.wavelength);
            v.require(g_fpa < g_ma, "FPA beam gain not below MA");
            summary += "; slot " + std::to_string(slot + 1) + " user " + std::to_string(user + 1) +
                       fmt(" at %.4f rad: MA gain %.4f, FPA %.4f", theta, g_ma, g_fpa);
        }
        failures += report(8, v, summary);
    }

    std::printf("%d of 8 criteria failed; %.1f s total\n", failures, seconds_since(t_all));
    return failures == 0 ? 0 : 1;
}
