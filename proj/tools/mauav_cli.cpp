#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mauav/ao_driver.hpp"
#include "mauav/exports.hpp"
#include "mauav/scenario.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;
using namespace mauav;

namespace {

constexpr int kInvalidScenario = 1;
constexpr int kSolverAbort = 2;

struct Common {
    std::string scenario;
    bool fpa = false;
    double epsilon = 1e-3;
    int i_max = 30;
    std::string out = "mauav_out";
    std::uint64_t seed = 1;
    int jobs = 1;

    AoOptions options() const {
        AoOptions o;
        o.fpa = fpa;
        o.epsilon = epsilon;
        o.max_iterations = i_max;
        o.seed = seed;
        o.jobs = jobs;
        return o;
    }
};

void add_common(CLI::App* cmd, Common& c, bool with_fpa) {
    cmd->add_option("scenario", c.scenario, "Scenario file")->required();
    if (with_fpa) cmd->add_flag("--fpa", c.fpa, "Keep the antennas at the uniform half-wavelength layout");
    cmd->add_option("--epsilon", c.epsilon, "Stop when an iteration gains at most this many bits")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--i-max", c.i_max, "Iteration limit")->check(CLI::PositiveNumber);
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_option("--seed", c.seed, "Seed of the randomised rank-one fallback");
    cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void print_violations(const ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << "\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
}

std::optional<Scenario> load(const std::string& path) {
    try {
        return load_scenario(path);
    } catch (const ScenarioError& e) {
        print_violations(e);
        return std::nullopt;
    }
}

void report(const AoResult& r, const char* label) {
    std::cout << std::setprecision(10) << label << " final objective " << r.trace.final_objective() << " bits after "
              << r.trace.iterations.size() << " iterations (" << to_string(r.trace.reason) << ")\n";
    if (!r.trace.diagnostic.empty()) std::cout << "  " << r.trace.diagnostic << "\n";
}

int cmd_validate(const Common& c) {
    const auto sc = load(c.scenario);
    if (!sc) return kInvalidScenario;
    std::cout << "valid: " << sc->user_count() << " users, " << sc->antennas << " antennas, " << sc->slots
              << " slots\n";
    return 0;
}

int cmd_run(const Common& c) {
    const auto sc = load(c.scenario);
    if (!sc) return kInvalidScenario;
    const AoResult r = optimize(*sc, c.options());
    exports::write_run(c.out, *sc, r, c.fpa);
    report(r, c.fpa ? "FPA" : "MA");
    return r.trace.reason == StopReason::Failure ? kSolverAbort : 0;
}

int cmd_beampattern(const Common& c, int slot, int points) {
    const auto sc = load(c.scenario);
    if (!sc) return kInvalidScenario;
    if (slot == 0) slot = (sc->slots + 1) / 2;
    if (slot < 1 || slot > sc->slots) {
        std::cerr << "slot must lie in 1.." << sc->slots << "\n";
        return kInvalidScenario;
    }
    const AoResult r = optimize(*sc, c.options());
    fs::create_directories(c.out);
    const fs::path path = fs::path(c.out) / ("beampattern_slot" + std::to_string(slot) + (c.fpa ? "_fpa" : "") + ".tsv");
    std::ofstream f(path);
    exports::write_beampattern(f, *sc, r.best, slot - 1, points);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    report(r, c.fpa ? "FPA" : "MA");
    std::cout << "wrote " << path.string() << "\n";
    return r.trace.reason == StopReason::Failure ? kSolverAbort : 0;
}

Scenario apply_axis(Scenario s, const std::string& axis, double v) {
    if (axis == "noise_dbm") {
        s.noise_power.assign(s.users.size(), dbm_to_watts(v));
    } else if (axis == "power_w") {
        s.max_power = v;
    } else {
        if (v != std::floor(v)) throw ScenarioError("antenna count must be an integer", {"antennas: got " + std::to_string(v)});
        s.antennas = static_cast<int>(v);
    }
    require_valid(s);
    return s;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::vector<double>& values) {
    const auto base = load(c.scenario);
    if (!base) return kInvalidScenario;
    std::vector<Scenario> points;
    for (double v : values) {
        try {
            points.push_back(apply_axis(*base, axis, v));
        } catch (const ScenarioError& e) {
            std::cerr << axis << " = " << v << ": ";
            print_violations(e);
            return kInvalidScenario;
        }
    }

    const int n = static_cast<int>(values.size());
    std::vector<exports::SweepRow> rows(n);
    std::vector<char> failed(n, 0);
    AoOptions ma = c.options();
    ma.fpa = false;
    ma.jobs = 1;
    AoOptions fpa = ma;
    fpa.fpa = true;
    detail::parallel_for(2 * n, c.jobs, [&](int i) {
        const int p = i / 2;
        const AoResult r = optimize(points[p], i % 2 == 0 ? ma : fpa);
        (i % 2 == 0 ? rows[p].rate_ma : rows[p].rate_fpa) = r.trace.final_objective();
        if (r.trace.reason == StopReason::Failure) failed[p] = 1;
    });

    int complete = 0;
    while (complete < n && !failed[complete]) {
        rows[complete].value = values[complete];
        ++complete;
    }
    rows.resize(complete);
    fs::create_directories(c.out);
    const fs::path path = fs::path(c.out) / ("sweep_" + axis + ".tsv");
    std::ostringstream table;
    exports::write_sweep(table, axis, rows);
    std::ofstream f(path, std::ios::binary);
    f << table.str();
    if (!f) throw std::runtime_error("cannot write " + path.string());
    std::cout << table.str();
    if (complete < n) {
        std::cerr << "solver aborted at " << axis << " = " << values[complete] << "; table holds the points before it\n";
        return kSolverAbort;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sum-rate optimisation for a UAV carrying a movable-antenna array"};
    app.require_subcommand(1);

    Common run_opts, sweep_opts, pattern_opts, validate_opts;
    auto* run = app.add_subcommand("run", "Optimise one scenario and write trace, solution and trajectory files");
    add_common(run, run_opts, true);

    auto* sweep = app.add_subcommand("sweep", "Optimise each point of a parameter sweep in MA and FPA mode");
    add_common(sweep, sweep_opts, false);
    std::string axis;
    std::vector<double> values;
    sweep->add_option("--axis", axis, "Swept parameter")
        ->required()
        ->check(CLI::IsMember({"noise_dbm", "power_w", "antennas"}));
    sweep->add_option("--values", values, "Sweep values")->required()->delimiter(',');

    auto* pattern = app.add_subcommand("beampattern", "Optimise, then export the beam gains of one slot");
    add_common(pattern, pattern_opts, true);
    int slot = 0;
    int points = 1024;
    pattern->add_option("--slot", slot, "Slot, 1-based (default: the middle slot)");
    pattern->add_option("--points", points, "Angles sampled over [0, pi/2]")->check(CLI::Range(2, 1 << 20));

    auto* val = app.add_subcommand("validate", "Check a scenario file");
    val->add_option("scenario", validate_opts.scenario, "Scenario file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(run_opts);
        if (*sweep) return cmd_sweep(sweep_opts, axis, values);
        if (*pattern) return cmd_beampattern(pattern_opts, slot, points);
        return cmd_validate(validate_opts);
    } catch (const ScenarioError& e) {
        print_violations(e);
        return kInvalidScenario;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverAbort;
    }
}
