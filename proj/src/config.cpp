#include "fas/config.hpp"

#include "json.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fas {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.')
            return false;
    return true;
}

double parse_double(const std::string& key, const std::string& raw) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " has a malformed number '" + raw + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

Config Config::from_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " has an invalid key '" + key + "'");
        if (!cfg.kv_.emplace(key, value).second)
            throw ConfigError("config: duplicate key '" + key + "'");
    }
    return cfg;
}

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string Config::require_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end() || it->second.empty())
        throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const double v = parse_double(key, it->second);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("config: " + key + " must be an integer");
    return i;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ConfigError("config: " + key + " must be true or false");
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        // stoull wraps "-4" around instead of failing, so screen the sign here
        if (it->second.empty() || !std::isdigit(static_cast<unsigned char>(it->second[0])))
            throw std::invalid_argument(it->second);
        std::size_t used = 0;
        const unsigned long long v = std::stoull(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: " + key + " must be a non-negative integer");
    }
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::vector<double> out;
    for (const std::string& tok : split(it->second, ',')) {
        const std::string t = trim(tok);
        if (t.empty())
            throw ConfigError("config: " + key + " has an empty list entry");
        out.push_back(parse_double(key, t));
    }
    return out;
}

std::string Config::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](const std::string& s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
    };
    for (const auto& [k, v] : kv_) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void Config::check_keys(const std::vector<std::string>& known_keys) const {
    for (const auto& [k, v] : kv_) {
        (void)v;
        bool ok = false;
        for (const std::string& known : known_keys)
            if (k == known) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config: unknown key '" + k + "'");
    }
}

GridConfig grid_from_config(const Config& c) {
    GridConfig g;
    g.n = c.get_int("grid.n", g.n);
    g.L = c.get_double("grid.L", g.L);
    g.h = c.get_double("grid.h", g.h);
    g.t0 = c.get_double("grid.t0", g.t0);
    g.T = c.get_double("grid.T", g.T);
    g.sponge_width = c.get_double("grid.sponge_width", g.sponge_width);
    return g;
}

EnsembleSpec ensemble_from_config(const Config& c) {
    EnsembleSpec e;
    e.count = c.get_int("ensemble.count", e.count);
    e.seed = c.get_u64("ensemble.seed", e.seed);
    e.bumps_min = c.get_int("ensemble.bumps_min", e.bumps_min);
    e.bumps_max = c.get_int("ensemble.bumps_max", e.bumps_max);
    e.center_max = c.get_double("ensemble.center_max", e.center_max);
    e.r_min = c.get_double("ensemble.r_min", e.r_min);
    e.r_max = c.get_double("ensemble.r_max", e.r_max);
    e.amp_max = c.get_double("ensemble.amp_max", e.amp_max);
    return e;
}

namespace {

std::vector<Bump> bumps_from_string(const std::string& key, const std::string& raw) {
    std::vector<Bump> bumps;
    for (const std::string& group : split(raw, ';')) {
        const std::string g = trim(group);
        if (g.empty()) continue;
        const std::vector<std::string> parts = split(g, ',');
        if (parts.size() != 5)
            throw ConfigError("config: " + key +
                              " groups need exactly cx,cy,cz,r,amp (got '" + g + "')");
        Bump b;
        b.center = {parse_double(key, trim(parts[0])), parse_double(key, trim(parts[1])),
                    parse_double(key, trim(parts[2]))};
        b.r = parse_double(key, trim(parts[3]));
        b.amp = parse_double(key, trim(parts[4]));
        bumps.push_back(b);
    }
    return bumps;
}

} // namespace

Potential potential_from_config(const Config& c, const std::string& section, int n) {
    const std::string file_key = section + ".file";
    const std::string bumps_key = section + ".bumps";
    if (c.has(file_key) && c.has(bumps_key))
        throw ConfigError("config: " + section + " has both .file and .bumps");
    if (c.has(file_key)) {
        const std::string path = c.require_string(file_key);
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open potential file '" + path + "'");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw ConfigError("config: potential file '" + path + "' is not JSON (" +
                              e.what() + ")");
        }
        if (!doc.contains("potentials") || !doc["potentials"].is_array())
            throw ConfigError("config: potential file '" + path +
                              "' lacks a potentials array");
        if (doc.contains("n") && doc["n"].get<int>() != n)
            throw ConfigError("config: potential file '" + path + "' was generated for n=" +
                              std::to_string(doc["n"].get<int>()));
        const auto& arr = doc["potentials"];
        const int idx = c.get_int(section + ".index", 0);
        if (idx < 0 || static_cast<std::size_t>(idx) >= arr.size())
            throw ConfigError("config: " + section + ".index out of range (file has " +
                              std::to_string(arr.size()) + " entries)");
        std::vector<Bump> bumps;
        for (const auto& jb : arr[idx]) {
            Bump b;
            const auto& ctr = jb.at("center");
            b.center = {ctr.at(0).get<double>(), ctr.at(1).get<double>(),
                        ctr.at(2).get<double>()};
            b.r = jb.at("r").get<double>();
            b.amp = jb.at("amp").get<double>();
            bumps.push_back(b);
        }
        return make_potential(std::move(bumps), n);
    }
    if (c.has(bumps_key))
        return make_potential(bumps_from_string(bumps_key, c.require_string(bumps_key)), n);
    return Potential();
}

std::string bumps_to_string(const Potential& V) {
    std::string out;
    char buf[160];
    for (const Bump& b : V.bumps()) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", b.center[0],
                      b.center[1], b.center[2], b.r, b.amp);
        if (!out.empty()) out += "; ";
        out += buf;
    }
    return out;
}

} // namespace fas
