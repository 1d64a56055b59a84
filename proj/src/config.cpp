#include "pteem/config.hpp"

#include "pteem/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pteem {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"mixture2d",
         {"algorithm", "runs", "burnin", "samples", "ring_init", "p_ee", "seed", "threads",
          "unequal", "out"}},
        {"galaxy", {"algorithm", "runs", "burnin", "samples", "seed", "threads", "data", "out"}},
        {"tfbs",
         {"algorithm", "runs", "burnin", "samples", "ring_init", "p_ee", "seed", "threads",
          "out"}},
    };
    return keys;
}

[[noreturn]] void bad_entry(const KeyValue& kv, const std::string& what) {
    std::ostringstream os;
    os << kv.origin << ":" << kv.line << ": " << what;
    throw config_error(os.str());
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& what) {
    throw config_error("setting '" + key + "': " + what + ": '" + value + "'");
}

} // namespace

std::vector<KeyValue> parse_ini(std::istream& in, const std::string& origin) {
    std::vector<KeyValue> out;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error(origin + ":" + std::to_string(lineno) +
                                   ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw config_error(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
        KeyValue kv;
        kv.origin = origin;
        kv.line = lineno;
        kv.section = section;
        kv.key = trim(t.substr(0, eq));
        kv.value = trim(t.substr(eq + 1));
        if (kv.key.empty())
            throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<KeyValue> load_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    return parse_ini(in, path);
}

void Settings::set(const std::string& key, std::string value) { values_[key] = std::move(value); }

bool Settings::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Settings::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long long Settings::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long long v = 0;
    const char* b = it->second.data();
    const char* e = b + it->second.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e) bad_value(key, it->second, "not an integer");
    return v;
}

double Settings::get_real(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (errno != 0 || end == it->second.c_str() || *end != '\0')
        bad_value(key, it->second, "not a number");
    return v;
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    bad_value(key, it->second, "not a boolean");
}

std::uint64_t Settings::get_seed(const std::string& key, std::uint64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::uint64_t v = 0;
    const char* b = it->second.data();
    const char* e = b + it->second.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        bad_value(key, it->second, "not an unsigned integer");
    return v;
}

void apply_ini(Settings& settings, const std::vector<KeyValue>& entries,
               const std::string& section) {
    const auto& keys = known_keys();
    const auto target = keys.find(section);
    if (target == keys.end()) throw config_error("unknown settings section: " + section);

    for (const auto& kv : entries) {
        if (kv.section.empty()) {
            bool known_somewhere = false;
            for (const auto& [name, set] : keys) known_somewhere |= set.count(kv.key) != 0;
            if (!known_somewhere) bad_entry(kv, "unknown key '" + kv.key + "'");
        } else {
            const auto sec = keys.find(kv.section);
            if (sec == keys.end()) bad_entry(kv, "unknown section '" + kv.section + "'");
            if (!sec->second.count(kv.key))
                bad_entry(kv, "unknown key '" + kv.key + "' in section '" + kv.section + "'");
        }
    }
    // Top-level entries that mean something to this section first, then the
    // section's own block.
    for (const auto& kv : entries)
        if (kv.section.empty() && target->second.count(kv.key)) settings.set(kv.key, kv.value);
    for (const auto& kv : entries)
        if (kv.section == section) settings.set(kv.key, kv.value);
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "pt") return Algorithm::pt;
    if (name == "pteem") return Algorithm::pteem;
    if (name == "ees") return Algorithm::ees;
    throw config_error("unknown algorithm: '" + name + "' (expected pt, pteem or ees)");
}

namespace {

long long positive_int(const Settings& s, const std::string& key, long long fallback) {
    const long long v = s.get_int(key, fallback);
    if (v <= 0) throw config_error("setting '" + key + "' must be positive");
    return v;
}

int positive_int32(const Settings& s, const std::string& key, int fallback) {
    const long long v = positive_int(s, key, fallback);
    if (v > 1 << 24) throw config_error("setting '" + key + "' is implausibly large");
    return static_cast<int>(v);
}

double jump_probability(const Settings& s, double fallback) {
    const double v = s.get_real("p_ee", fallback);
    if (!(v > 0.0) || !(v < 1.0))
        throw config_error("setting 'p_ee' must lie strictly between 0 and 1");
    return v;
}

} // namespace

MixtureInvocation mixture_invocation_from(const Settings& s) {
    MixtureInvocation inv;
    const std::string alg = s.get_string("algorithm", "pteem");
    if (alg == "all")
        inv.algorithms = {Algorithm::pteem, Algorithm::pt, Algorithm::ees};
    else
        inv.algorithms = {parse_algorithm(alg)};

    mix2d::MixtureConfig& c = inv.config;
    c.unequal = s.get_bool("unequal", false);
    c.runs = positive_int32(s, "runs", c.runs);
    c.burnin = positive_int(s, "burnin", c.burnin);
    c.kept = positive_int(s, "samples", c.kept);
    c.ring_init = positive_int(s, "ring_init", c.ring_init);
    c.p_ee = jump_probability(s, c.p_ee);
    c.seed = s.get_seed("seed", c.seed);
    c.threads = positive_int32(s, "threads", c.threads);
    return inv;
}

galaxy::GalaxyConfig galaxy_config_from(const Settings& s) {
    galaxy::GalaxyConfig c;
    c.algorithm = parse_algorithm(s.get_string("algorithm", "pteem"));
    if (c.algorithm == Algorithm::ees)
        throw config_error("the velocity-mixture study runs under pt or pteem only");
    c.runs = positive_int32(s, "runs", c.runs);
    c.burnin = positive_int(s, "burnin", c.burnin);
    c.kept = positive_int(s, "samples", c.kept);
    c.seed = s.get_seed("seed", c.seed);
    c.threads = positive_int32(s, "threads", c.threads);
    c.data_path = s.get_string("data", c.data_path);
    return c;
}

tfbs::TfbsConfig tfbs_config_from(const Settings& s) {
    tfbs::TfbsConfig c;
    c.algorithm = parse_algorithm(s.get_string("algorithm", "pteem"));
    if (c.algorithm == Algorithm::pt)
        throw config_error("the motif study runs under pteem or ees");
    c.runs = positive_int32(s, "runs", c.runs);
    c.burnin = positive_int(s, "burnin", c.burnin);
    c.kept = positive_int(s, "samples", c.kept);
    c.ring_init = positive_int(s, "ring_init", c.ring_init);
    c.p_ee = jump_probability(s, c.p_ee);
    c.seed = s.get_seed("seed", c.seed);
    c.threads = positive_int32(s, "threads", c.threads);
    return c;
}

} // namespace pteem
