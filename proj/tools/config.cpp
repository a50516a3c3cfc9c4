#include "config.hpp"

#include "lamlab/error.hpp"

#include <fstream>
#include <sstream>

namespace lamlab::cli {

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"tol.trace",        "tol.cluster",  "tol.landing",       "tol.slice",
                                               "tol.continuation", "budget.iteration", "budget.depth", "budget.max_den",
                                               "cache.dir",        "output.dir"};
    return keys;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw 0;
        return d;
    } catch (...) {
        throw precondition("config key " + key + ": not a number: '" + v + "'");
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        long long d = std::stoll(v, &pos);
        if (pos != v.size() || d > 1000000000LL || d < -1000000000LL) throw 0;
        return int(d);
    } catch (...) {
        throw precondition("config key " + key + ": not an integer: '" + v + "'");
    }
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    return v;
}

}

void Config::set(const std::string& key, const std::string& value, const std::string& from) {
    const std::string v = unquote(trim(value));
    if (key == "tol.trace") tol.trace = to_double(key, v);
    else if (key == "tol.cluster") tol.cluster = to_double(key, v);
    else if (key == "tol.landing") tol.landing = to_double(key, v);
    else if (key == "tol.slice") tol.slice = to_double(key, v);
    else if (key == "tol.continuation") tol.continuation = to_double(key, v);
    else if (key == "budget.iteration") iteration_budget = to_int(key, v);
    else if (key == "budget.depth") depth = to_int(key, v);
    else if (key == "budget.max_den") max_den = to_int(key, v);
    else if (key == "cache.dir") cache_dir = v;
    else if (key == "output.dir") output_dir = v;
    else throw precondition("unknown config key '" + key + "'");
    origin[key] = from;
}

void Config::validate() const {
    for (auto [name, t] : {std::pair{"tol.trace", tol.trace}, {"tol.cluster", tol.cluster}, {"tol.landing", tol.landing},
                           {"tol.slice", tol.slice}, {"tol.continuation", tol.continuation}})
        if (!(t > 0)) throw precondition(std::string(name) + " must be positive");
    if (iteration_budget < 1) throw precondition("budget.iteration must be positive");
    if (depth < 1) throw precondition("budget.depth must be positive");
    if (max_den < 1) throw precondition("budget.max_den must be positive");
}

nlohmann::json Config::to_json() const {
    nlohmann::json j;
    j["tol"] = {{"trace", tol.trace}, {"cluster", tol.cluster}, {"landing", tol.landing}, {"slice", tol.slice},
                {"continuation", tol.continuation}};
    j["budget"] = {{"iteration", iteration_budget}, {"depth", depth}, {"max_den", max_den}};
    j["cache"] = {{"dir", cache_dir}};
    j["output"] = {{"dir", output_dir}};
    nlohmann::json o;
    for (auto& k : config_keys()) {
        auto it = origin.find(k);
        o[k] = it == origin.end() ? "default" : it->second;
    }
    j["origin"] = o;
    return j;
}

void load_config_file(Config& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw precondition("cannot read config file " + path);
    std::string line, section;
    int no = 0;
    while (std::getline(f, line)) {
        ++no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw precondition(path + ":" + std::to_string(no) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw precondition(path + ":" + std::to_string(no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        cfg.set(key, line.substr(eq + 1), "file");
    }
}

}
