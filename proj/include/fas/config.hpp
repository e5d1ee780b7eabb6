#pragma once

#include "fas/grid.hpp"
#include "fas/potential.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fas {

// Flat dotted key-value configuration: one `section.key = value` per line,
// `#` starts a comment, blank lines are skipped. Values are scalars or
// comma-separated number lists. Duplicate keys are rejected so archived
// configs stay unambiguous.
class Config {
  public:
    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const;

    // FNV-1a over the sorted `key=value` lines, as a 16-digit hex string;
    // artifact headers carry it so outputs can be traced to their inputs.
    std::string hash() const;

    const std::map<std::string, std::string>& entries() const { return kv_; }

    // Rejects keys outside the known set, so typos fail loudly before any
    // solver time is spent.
    void check_keys(const std::vector<std::string>& known_keys) const;

  private:
    std::map<std::string, std::string> kv_;
};

// Section builders; each reads only its own prefix and validates eagerly.
GridConfig grid_from_config(const Config& c);
EnsembleSpec ensemble_from_config(const Config& c);

// Potential under `section.*`: `<section>.file` (JSON written by
// gen-potential, with `<section>.index` choosing the entry) or
// `<section>.bumps` inline as "cx,cy,cz,r,amp; ...". Absent keys mean the
// zero potential.
Potential potential_from_config(const Config& c, const std::string& section, int n);

// Inverse of the inline form above, used when dumping ensembles to JSON.
std::string bumps_to_string(const Potential& V);

} // namespace fas
