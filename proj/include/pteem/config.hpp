#pragma once

// Layered run settings: built-in defaults, then an INI config file, then
// explicit command-line flags; later layers win.  All values are carried as
// strings and converted (with validation) when an experiment config is built,
// so a bad value reads the same whether it came from a file or a flag.

#include "pteem/engines.hpp"
#include "pteem/galaxy.hpp"
#include "pteem/mixture2d.hpp"
#include "pteem/tfbs.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pteem {

struct KeyValue {
    std::string origin; // file name for error messages
    int line = 0;
    std::string section; // "" for top-level entries
    std::string key;
    std::string value;
};

// "key = value" lines with optional [section] headers; blank lines and lines
// starting with '#' or ';' are ignored.
std::vector<KeyValue> parse_ini(std::istream& in, const std::string& origin);
std::vector<KeyValue> load_ini(const std::string& path);

class Settings {
public:
    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_real(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;

    // Effective key/value view (for manifests).
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Merge the entries that apply to `section`: top-level keys first (those
// meaningful to the section; top-level keys must at least belong to some
// section), then the [section] block.  Unknown sections or keys are
// config errors naming the offending line.
void apply_ini(Settings& settings, const std::vector<KeyValue>& entries,
               const std::string& section);

Algorithm parse_algorithm(const std::string& name);

// Experiment configs assembled from settings; every numeric range is checked
// here so both config files and flags share one validation path.
struct MixtureInvocation {
    std::vector<Algorithm> algorithms; // several when "all" was requested
    mix2d::MixtureConfig config;
};
MixtureInvocation mixture_invocation_from(const Settings& s);
galaxy::GalaxyConfig galaxy_config_from(const Settings& s);
tfbs::TfbsConfig tfbs_config_from(const Settings& s);

} // namespace pteem
