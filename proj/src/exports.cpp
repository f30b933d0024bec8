#include "mauav/exports.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mauav/channel.hpp"

namespace mauav::exports {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

char block_letter(Block b) {
    switch (b) {
        case Block::Beamforming: return 'W';
        case Block::Trajectory: return 'Q';
        case Block::Antenna: return 'X';
    }
    return '?';
}

std::string flags(const std::vector<BlockRecord>& blocks) {
    std::string out;
    for (const auto& b : blocks) {
        const char c = block_letter(b.block);
        if (!b.ran) out += '-';
        else if (!b.solved) out += '!';
        else out += b.accepted ? c : static_cast<char>(std::tolower(c));
    }
    return out;
}

void save(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void write_trace(std::ostream& os, const AoTrace& trace) {
    std::vector<Block> order;
    if (!trace.iterations.empty())
        for (const auto& b : trace.iterations.front().blocks) order.push_back(b.block);
    os << "# alternating optimisation trace; stop reason: " << to_string(trace.reason) << "\n";
    os << "# columns: iteration\tobjective_bits\tgain_bits";
    for (Block b : order) os << "\tdelta_" << to_string(b);
    os << "\tblock_flags\n";
    os << "0\t" << num(trace.initial_objective) << "\t0";
    for (std::size_t i = 0; i < order.size(); ++i) os << "\t0";
    os << "\t" << std::string(order.size(), '.') << "\n";
    for (const auto& it : trace.iterations) {
        os << it.iteration << "\t" << num(it.objective) << "\t" << num(it.gain);
        for (const auto& b : it.blocks) os << "\t" << num(b.delta);
        os << "\t" << flags(it.blocks) << "\n";
    }
}

void write_trajectory(std::ostream& os, const Scenario& sc, const Trajectory& q) {
    const double tau = sc.slot_length();
    os << "# UAV positions and velocities per slot boundary, metres and m/s\n";
    os << "# columns: n\tq_x\tq_y\tv_x\tv_y\tspeed\n";
    for (int n = 0; n <= q.slots(); ++n) {
        const Vec2 v = n == 0 ? Vec2(0.0, 0.0) : q.velocity(n, tau);
        os << n << "\t" << num(q.q[n].x()) << "\t" << num(q.q[n].y()) << "\t" << num(v.x()) << "\t" << num(v.y())
           << "\t" << num(v.norm()) << "\n";
    }
}

void write_layout(std::ostream& os, const AntennaLayout& x) {
    const Eigen::Index m = x.x.empty() ? 0 : x.x.front().size();
    os << "# antenna positions per slot, metres\n";
    os << "# columns: n";
    for (Eigen::Index i = 1; i <= m; ++i) os << "\tx_" << i;
    os << "\n";
    for (int s = 0; s < x.slots(); ++s) {
        os << s + 1;
        for (Eigen::Index i = 0; i < x.x[s].size(); ++i) os << "\t" << num(x.x[s][i]);
        os << "\n";
    }
}

void write_beampattern(std::ostream& os, const Scenario& sc, const Iterate& it, int slot, int points) {
    if (slot < 0 || slot >= sc.slots) throw std::out_of_range("beam pattern slot out of range");
    const int users = sc.user_count();
    std::vector<std::vector<PatternPoint>> patterns;
    for (int k = 0; k < users; ++k) patterns.push_back(beam_pattern(it.x.x[slot], it.w.w[slot][k], sc.wavelength, points));
    os << "# beam gain |a(theta)^H w_k|^2 in slot " << slot + 1 << "\n";
    os << "# user angles (rad):";
    for (int k = 0; k < users; ++k) os << " " << num(link_geometry(sc, it.q.q[slot + 1], k).theta);
    os << "\n# columns: theta_rad";
    for (int k = 1; k <= users; ++k) os << "\tgain_user_" << k;
    os << "\n";
    for (int i = 0; i < points; ++i) {
        os << num(patterns.front()[i].theta);
        for (int k = 0; k < users; ++k) os << "\t" << num(patterns[k][i].gain);
        os << "\n";
    }
}

void write_sweep(std::ostream& os, const std::string& axis, const std::vector<SweepRow>& rows) {
    os << "# total rate (bits) of the movable and fixed arrays along " << axis << "\n";
    os << "# columns: " << axis << "\trate_MA\trate_FPA\n";
    for (const auto& r : rows) os << num(r.value) << "\t" << num(r.rate_ma) << "\t" << num(r.rate_fpa) << "\n";
}

std::string solution_bundle(const Scenario& sc, const AoResult& result, bool fpa) {
    using nlohmann::json;
    const AoTrace& tr = result.trace;
    json j;
    j["format"] = "mauav-solution-1";
    j["mode"] = fpa ? "fpa" : "ma";
    j["scenario"] = format_scenario(sc);
    j["objective_bits"] = tr.final_objective();
    j["initial_objective_bits"] = tr.initial_objective;
    j["iterations"] = tr.iterations.size();
    j["stop_reason"] = to_string(tr.reason);
    if (!tr.diagnostic.empty()) j["diagnostic"] = tr.diagnostic;
    if (!fpa) {
        j["start"] = to_string(tr.start);
        j["alternative_objective_bits"] = tr.alternative_objective;
    }
    j["rank"] = {{"matrices", tr.rank.matrices}, {"inexact", tr.rank.inexact}, {"fallbacks", tr.rank.fallbacks}};

    json q = json::array();
    for (const auto& p : result.best.q.q) q.push_back({p.x(), p.y()});
    j["trajectory"] = q;
    json x = json::array();
    for (const auto& row : result.best.x.x) x.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    j["layouts"] = x;
    json w = json::array();
    for (const auto& slot : result.best.w.w) {
        json users = json::array();
        for (const auto& v : slot) {
            json entries = json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i) entries.push_back({v[i].real(), v[i].imag()});
            users.push_back(entries);
        }
        w.push_back(users);
    }
    j["beamformers"] = w;
    return j.dump(2) + "\n";
}

void write_run(const std::filesystem::path& dir, const Scenario& sc, const AoResult& result, bool fpa) {
    std::filesystem::create_directories(dir);
    std::ostringstream trace, traj, layout;
    write_trace(trace, result.trace);
    write_trajectory(traj, sc, result.best.q);
    write_layout(layout, result.best.x);
    save(dir / "trace.tsv", trace.str());
    save(dir / "trajectory.tsv", traj.str());
    save(dir / "layout.tsv", layout.str());
    save(dir / "solution.json", solution_bundle(sc, result, fpa));
}

}  // namespace mauav::exports
