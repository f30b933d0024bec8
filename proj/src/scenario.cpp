#include "mauav/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace mauav {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double BeamformerSet::slot_power(int s) const {
    double p = 0.0;
    for (const auto& wk : w[s]) p += wk.squaredNorm();
    return p;
}

std::vector<std::string> validate(const Scenario& s) {
    std::vector<std::string> out;
    auto bad = [&](const std::string& field, const std::string& rule) {
        out.push_back(field + ": " + rule);
    };
    const auto finite = [](double v) { return std::isfinite(v); };

    if (s.users.empty()) bad("K", "at least one user is required");
    if (s.noise_power.size() != s.users.size())
        bad("sigma2", "one noise power per user is required");
    for (std::size_t k = 0; k < s.noise_power.size(); ++k)
        if (!(s.noise_power[k] > 0.0) || !finite(s.noise_power[k]))
            bad("sigma2", "noise power of user " + std::to_string(k + 1) + " must be positive");
    for (std::size_t k = 0; k < s.users.size(); ++k)
        if (!s.users[k].allFinite()) bad("users", "position " + std::to_string(k + 1) + " is not finite");

    if (s.slots < 1) bad("N", "slot count must be at least 1");
    if (!(s.duration > 0.0) || !finite(s.duration)) bad("T", "mission duration must be positive");
    if (s.antennas < 1) bad("M", "antenna count must be at least 1");
    if (!(s.altitude > 0.0) || !finite(s.altitude)) bad("H", "altitude must be positive");
    if (!(s.max_power > 0.0) || !finite(s.max_power)) bad("P_max", "power budget must be positive");
    if (!(s.ref_gain > 0.0) || !finite(s.ref_gain)) bad("chi", "reference gain must be positive");
    if (!(s.wavelength > 0.0) || !finite(s.wavelength)) bad("lambda", "wavelength must be positive");
    if (!(s.v_min > 0.0) || !finite(s.v_min)) bad("V_min", "V_min must be positive");
    if (!(s.v_max >= s.v_min) || !finite(s.v_max)) bad("V_max", "V_max must be at least V_min");
    if (!(s.a_max > 0.0) || !finite(s.a_max)) bad("a_max", "maximum acceleration must be positive");
    if (!(s.min_spacing >= 0.0) || !finite(s.min_spacing)) bad("d_min", "minimum spacing must be non-negative");
    if (!(s.array_length >= 0.0) || !finite(s.array_length)) bad("L", "array length must be non-negative");
    if (s.antennas >= 1 && (s.antennas - 1) * s.min_spacing > s.array_length)
        bad("L", "(M-1)*d_min exceeds L, no feasible antenna layout");
    if (!s.q_init.allFinite() || !s.q_final.allFinite()) bad("q_init/q_final", "endpoints must be finite");
    if (s.fix_endpoints && (s.q_final - s.q_init).norm() > s.v_max * s.duration)
        bad("q_final", "endpoint reachability violated, |q_final - q_init| > V_max*T");
    return out;
}

void require_valid(const Scenario& s) {
    auto v = validate(s);
    if (v.empty()) return;
    std::string msg = "invalid scenario:";
    for (const auto& e : v) msg += "\n  " + e;
    throw ScenarioError(msg, std::move(v));
}

Scenario paper_default() {
    Scenario s;
    s.users = {Vec2(120.0, 380.0), Vec2(250.0, 150.0), Vec2(400.0, 330.0)};
    s.noise_power.assign(3, dbm_to_watts(-110.0));
    s.altitude = 100.0;
    s.duration = 40.0;
    s.slots = 10;
    s.q_init = Vec2(0.0, 250.0);
    s.q_final = Vec2(500.0, 250.0);
    s.fix_endpoints = true;
    s.v_min = 1.0;
    s.v_max = 20.0;
    s.a_max = 5.0;
    s.wavelength = 0.1;
    s.antennas = 4;
    s.min_spacing = s.wavelength / 2.0;
    s.array_length = 8.0 * s.wavelength;
    s.max_power = 3.0;
    s.ref_gain = db_to_linear(-60.0);
    return s;
}

Scenario with_random_users(Scenario s, int count, double side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, side);
    const double sigma2 = s.noise_power.empty() ? dbm_to_watts(-110.0) : s.noise_power.front();
    s.users.clear();
    for (int k = 0; k < count; ++k) {
        const double x = u(rng);
        const double y = u(rng);
        s.users.emplace_back(x, y);
    }
    s.noise_power.assign(count, sigma2);
    return s;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

struct Entry {
    std::string value;
    int line;
};

class Reader {
public:
    explicit Reader(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') fail(lineno, "unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                static const char* known[] = {"users", "uav", "array", "radio", "horizon"};
                bool ok = false;
                for (const char* k : known) ok = ok || section == k;
                if (!ok) fail(lineno, "unknown section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) fail(lineno, "expected key = value");
            if (section.empty()) fail(lineno, "key outside of any section");
            const std::string key = section + "." + trim(line.substr(0, eq));
            entries_[key].push_back({trim(line.substr(eq + 1)), lineno});
        }
    }

    [[noreturn]] static void fail(int line, const std::string& msg) {
        throw ScenarioError("scenario parse error at line " + std::to_string(line) + ": " + msg);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const Entry& one(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) throw ScenarioError("scenario parse error: missing key '" + key + "'");
        if (it->second.size() != 1) fail(it->second[1].line, "duplicate key '" + key + "'");
        used_.insert(key);
        return it->second.front();
    }

    const std::vector<Entry>& many(const std::string& key) {
        used_.insert(key);
        static const std::vector<Entry> none;
        auto it = entries_.find(key);
        return it == entries_.end() ? none : it->second;
    }

    void reject_unused() const {
        for (const auto& [key, list] : entries_)
            if (!used_.count(key)) fail(list.front().line, "unknown key '" + key + "'");
    }

private:
    std::map<std::string, std::vector<Entry>> entries_;
    std::set<std::string> used_;
};

double number(const std::string& text, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        Reader::fail(line, "not a number: '" + text + "'");
    }
    if (trim(text.substr(pos)) != "") Reader::fail(line, "trailing characters in '" + text + "'");
    if (!std::isfinite(v)) Reader::fail(line, "non-finite value '" + text + "'");
    return v;
}

// Splits "<number> <unit>" into its parts; unit may be empty.
std::pair<double, std::string> quantity(const std::string& text, int line) {
    const std::string t = trim(text);
    const auto sp = t.find_first_of(" \t");
    if (sp == std::string::npos) return {number(t, line), ""};
    return {number(t.substr(0, sp), line), trim(t.substr(sp))};
}

double power_watts(const std::string& text, int line) {
    auto [v, unit] = quantity(text, line);
    double w = 0.0;
    if (unit == "W") w = v;
    else if (unit == "mW") w = v * 1e-3;
    else if (unit == "dBm") w = dbm_to_watts(v);
    else Reader::fail(line, "power needs an explicit unit (W, mW or dBm): '" + text + "'");
    if (!std::isfinite(w)) Reader::fail(line, "power converts to a non-finite value");
    return w;
}

double gain_linear(const std::string& text, int line) {
    auto [v, unit] = quantity(text, line);
    double g = 0.0;
    if (unit.empty()) g = v;
    else if (unit == "dB") g = db_to_linear(v);
    else Reader::fail(line, "gain unit must be dB or omitted: '" + text + "'");
    if (!std::isfinite(g)) Reader::fail(line, "gain converts to a non-finite value");
    return g;
}

double length_m(const std::string& text, int line, std::optional<double> wavelength) {
    auto [v, unit] = quantity(text, line);
    if (unit.empty() || unit == "m") return v;
    if (unit == "lambda") {
        if (!wavelength) Reader::fail(line, "'lambda' unit used before a wavelength is known");
        return v * *wavelength;
    }
    Reader::fail(line, "length unit must be m or lambda: '" + text + "'");
}

Vec2 point(const std::string& text, int line) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) Reader::fail(line, "expected 'x, y' but got '" + text + "'");
    return Vec2(number(parts[0], line), number(parts[1], line));
}

int integer(const std::string& text, int line) {
    const double v = number(text, line);
    if (v != std::floor(v) || std::abs(v) > 1e9) Reader::fail(line, "expected an integer: '" + text + "'");
    return static_cast<int>(v);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Reader r(text);
    Scenario s;

    {
        const auto& e = r.one("radio.wavelength");
        s.wavelength = length_m(e.value, e.line, std::nullopt);
    }
    {
        const auto& e = r.one("radio.max_power");
        s.max_power = power_watts(e.value, e.line);
    }
    {
        const auto& e = r.one("radio.ref_gain");
        s.ref_gain = gain_linear(e.value, e.line);
    }

    const auto& positions = r.many("users.position");
    if (r.has("users.random")) {
        if (!positions.empty()) Reader::fail(positions.front().line, "use either 'position' lines or 'random', not both");
        const auto& cnt = r.one("users.random");
        const auto& area = r.one("users.area");
        const auto& seed = r.one("users.seed");
        const int k = integer(cnt.value, cnt.line);
        if (k < 0) Reader::fail(cnt.line, "user count must be non-negative");
        s = with_random_users(s, k, length_m(area.value, area.line, s.wavelength),
                              static_cast<std::uint64_t>(integer(seed.value, seed.line)));
    } else {
        s.users.clear();
        for (const auto& e : positions) s.users.push_back(point(e.value, e.line));
    }

    {
        const auto& e = r.one("users.noise");
        const auto parts = split(e.value, ',');
        std::vector<double> p;
        for (const auto& part : parts) p.push_back(power_watts(part, e.line));
        if (p.size() == 1) p.assign(s.users.size(), p.front());
        else if (p.size() != s.users.size())
            Reader::fail(e.line, "noise list length must be 1 or the number of users");
        s.noise_power = std::move(p);
    }

    auto num = [&](const std::string& key) {
        const auto& e = r.one(key);
        return number(e.value, e.line);
    };
    auto len = [&](const std::string& key) {
        const auto& e = r.one(key);
        return length_m(e.value, e.line, s.wavelength);
    };

    s.altitude = len("uav.altitude");
    {
        const auto& e = r.one("uav.start");
        s.q_init = point(e.value, e.line);
    }
    {
        const auto& e = r.one("uav.end");
        s.q_final = point(e.value, e.line);
    }
    if (r.has("uav.endpoints")) {
        const auto& e = r.one("uav.endpoints");
        if (e.value == "fixed") s.fix_endpoints = true;
        else if (e.value == "free") s.fix_endpoints = false;
        else Reader::fail(e.line, "endpoints must be 'fixed' or 'free'");
    }
    s.v_min = num("uav.v_min");
    s.v_max = num("uav.v_max");
    s.a_max = num("uav.a_max");

    {
        const auto& e = r.one("array.antennas");
        s.antennas = integer(e.value, e.line);
    }
    s.array_length = len("array.length");
    s.min_spacing = len("array.min_spacing");

    s.duration = num("horizon.duration");
    {
        const auto& e = r.one("horizon.slots");
        s.slots = integer(e.value, e.line);
    }

    r.reject_unused();
    require_valid(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string format_scenario(const Scenario& s) {
    std::ostringstream o;
    o << "# mauav scenario\n";
    o << "[users]\n";
    for (const auto& u : s.users) o << "position = " << fmt(u.x()) << ", " << fmt(u.y()) << "\n";
    o << "noise = ";
    for (std::size_t k = 0; k < s.noise_power.size(); ++k)
        o << (k ? ", " : "") << fmt(s.noise_power[k]) << " W";
    o << "\n\n[uav]\n";
    o << "altitude = " << fmt(s.altitude) << "\n";
    o << "start = " << fmt(s.q_init.x()) << ", " << fmt(s.q_init.y()) << "\n";
    o << "end = " << fmt(s.q_final.x()) << ", " << fmt(s.q_final.y()) << "\n";
    o << "endpoints = " << (s.fix_endpoints ? "fixed" : "free") << "\n";
    o << "v_min = " << fmt(s.v_min) << "\n";
    o << "v_max = " << fmt(s.v_max) << "\n";
    o << "a_max = " << fmt(s.a_max) << "\n\n";
    o << "[array]\n";
    o << "antennas = " << s.antennas << "\n";
    o << "length = " << fmt(s.array_length) << "\n";
    o << "min_spacing = " << fmt(s.min_spacing) << "\n\n";
    o << "[radio]\n";
    o << "wavelength = " << fmt(s.wavelength) << "\n";
    o << "max_power = " << fmt(s.max_power) << " W\n";
    o << "ref_gain = " << fmt(s.ref_gain) << "\n\n";
    o << "[horizon]\n";
    o << "duration = " << fmt(s.duration) << "\n";
    o << "slots = " << s.slots << "\n";
    return o.str();
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ScenarioError("cannot write scenario file '" + path.string() + "'");
    out << format_scenario(s);
}

std::vector<std::string> check_trajectory(const Scenario& s, const Trajectory& q,
                                          const FeasibilityTolerance& tol) {
    std::vector<std::string> out;
    const int n_slots = s.slots;
    if (q.slots() != n_slots) {
        out.push_back("trajectory: expected " + std::to_string(n_slots + 1) + " positions");
        return out;
    }
    const double tau = s.slot_length();
    if (s.fix_endpoints) {
        if ((q.q[0] - s.q_init).norm() > 1e-9) out.push_back("q[0] != q_init");
        if ((q.q[n_slots] - s.q_final).norm() > 1e-9) out.push_back("q[N] != q_final");
    }
    for (int n = 2; n <= n_slots; ++n) {
        const double v = q.velocity(n, tau).norm();
        if (v < s.v_min - tol.kinematics || v > s.v_max + tol.kinematics)
            out.push_back("speed at slot " + std::to_string(n) + " = " + fmt(v) + " outside [V_min, V_max]");
    }
    for (int n = 3; n <= n_slots; ++n) {
        const double a = q.acceleration(n, tau).norm();
        if (a > s.a_max + tol.kinematics)
            out.push_back("acceleration at slot " + std::to_string(n) + " = " + fmt(a) + " exceeds a_max");
    }
    return out;
}

std::vector<std::string> check_layout(const Scenario& s, const AntennaLayout& x,
                                      const FeasibilityTolerance& tol) {
    std::vector<std::string> out;
    if (x.slots() != s.slots) {
        out.push_back("layout: expected " + std::to_string(s.slots) + " rows");
        return out;
    }
    for (int n = 0; n < x.slots(); ++n) {
        const auto& row = x.x[n];
        if (row.size() != s.antennas) {
            out.push_back("layout row " + std::to_string(n + 1) + " has wrong length");
            continue;
        }
        for (int m = 0; m < row.size(); ++m)
            if (row[m] < -tol.range || row[m] > s.array_length + tol.range)
                out.push_back("slot " + std::to_string(n + 1) + ": x_" + std::to_string(m + 1) + " outside [0, L]");
        for (int m = 0; m + 1 < row.size(); ++m)
            if (row[m + 1] - row[m] < s.min_spacing - tol.spacing)
                out.push_back("slot " + std::to_string(n + 1) + ": spacing " + std::to_string(m + 1) + " below d_min");
    }
    return out;
}

std::vector<std::string> check_beamformers(const Scenario& s, const BeamformerSet& w,
                                           const FeasibilityTolerance& tol) {
    std::vector<std::string> out;
    if (w.slots() != s.slots) {
        out.push_back("beamformers: expected " + std::to_string(s.slots) + " slots");
        return out;
    }
    for (int n = 0; n < w.slots(); ++n) {
        if (static_cast<int>(w.w[n].size()) != s.user_count()) {
            out.push_back("beamformers: wrong user count in slot " + std::to_string(n + 1));
            continue;
        }
        const double p = w.slot_power(n);
        if (p > s.max_power + tol.power)
            out.push_back("slot " + std::to_string(n + 1) + ": power " + fmt(p) + " exceeds P_max");
    }
    return out;
}

}  // namespace mauav
