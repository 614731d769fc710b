#include "spse/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spse/constants.hpp"
#include "spse/errors.hpp"

namespace spse {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw ConfigError("config key '" + key + "': bad number '" + item + "'");
        }
    }
    return out;
}

}  // namespace

LabConfig LabConfig::parse(const std::string& text) {
    LabConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        cfg.entries_[key] = value;
    }
    return cfg;
}

LabConfig LabConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

void LabConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    out << canonical_text();
}

std::string LabConfig::canonical_text() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    return out.str();
}

bool LabConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

void LabConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void LabConfig::set(const std::string& key, double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    entries_[key] = out.str();
}

std::string LabConfig::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string LabConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double LabConfig::get_double(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        return std::stod(v);
    } catch (...) {
        throw ConfigError("config key '" + key + "': bad number '" + v + "'");
    }
}

double LabConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long LabConfig::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        return std::stol(v);
    } catch (...) {
        throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
    }
}

long LabConfig::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

Vec3 LabConfig::get_vec3(const std::string& key, const Vec3& fallback) const {
    if (!has(key)) return fallback;
    const auto nums = parse_numbers(get_string(key), key);
    if (nums.size() != 3) throw ConfigError("config key '" + key + "': expected three numbers");
    return {nums[0], nums[1], nums[2]};
}

std::vector<double> LabConfig::get_list(const std::string& key) const {
    return parse_numbers(get_string(key), key);
}

Potential LabConfig::potential() const {
    const std::string kind = get_string("potential.kind", "quadratic_well");
    const Vec3 b0 = get_vec3("potential.b0", {0.0, 0.0, 0.0});
    const double v0 = get_double("potential.V0", 1.0);
    const double well = get_double("potential.well", 1.0);
    const double amp = get_double("potential.amp", 0.5);
    const double sigma = get_double("potential.sigma", 1.0);
    return potential_from_kind(kind, b0, v0, well, amp, sigma);
}

Grid3D LabConfig::box() const {
    const double L = get_double("grid.L", 12.0);
    const long n = get_int("grid.n", 65);
    if (n < 33 || n % 2 == 0) throw ConfigError("config key 'grid.n': need an odd count >= 33");
    return Grid3D(L, std::size_t(n));
}

void LabConfig::validate() const {
    for (const char* key : {"solver.tol", "solver.newton_tol", "match.tol"}) {
        if (has(key) && !(get_double(key) > 0.0))
            throw ConfigError(std::string("config key '") + key + "': tolerance must be positive");
    }
    if (has("experiment.eps_list"))
        for (double e : get_list("experiment.eps_list"))
            if (e == 0.0) throw ConfigError("config key 'experiment.eps_list': eps must avoid 0");
    if (has("experiment.eps") && get_double("experiment.eps") == 0.0)
        throw ConfigError("config key 'experiment.eps': eps must avoid 0");
    (void)box();
    (void)potential();

    // Case consistency: case i needs a < V0^{-3/2} a_*, case ii the
    // reverse, using the repository's pinned mass-critical constant.
    if (has("experiment.case") && has("experiment.a")) {
        const std::string c = get_string("experiment.case");
        const double a = get_double("experiment.a");
        const double v0 = get_double("potential.V0", 1.0);
        const double threshold = std::pow(v0, -1.5) * constants::kMassCriticalL2;
        if (c == "i" && !(a < threshold))
            throw ConfigError("config key 'experiment.case': case i requires a < V0^{-3/2} a_*");
        if (c == "ii" && !(a > threshold))
            throw ConfigError("config key 'experiment.case': case ii requires a > V0^{-3/2} a_*");
        if (c != "i" && c != "ii")
            throw ConfigError("config key 'experiment.case': expected 'i' or 'ii'");
    }
}

std::string LabConfig::hash() const {
    const std::string text = canonical_text();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace spse
