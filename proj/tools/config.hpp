#pragma once
// Run configuration: defaults, then a key = value file, then command-line flags.
#include "lamlab/dynamics.hpp"

#include <json.hpp>

#include <map>
#include <string>

namespace lamlab::cli {

struct Config {
    Tolerances tol;
    int iteration_budget = 2000;
    int depth = 5;
    int max_den = 30;
    std::string cache_dir = ".lamlab-cache";
    std::string output_dir = ".";
    std::map<std::string, std::string> origin;  // key -> default | file | env | flag

    nlohmann::json to_json() const;
    // all tolerances positive and budgets positive; throws precondition otherwise
    void validate() const;
    // set one documented key from its text value
    void set(const std::string& key, const std::string& value, const std::string& from);
};

// documented keys, in file order
const std::vector<std::string>& config_keys();

// TOML-style subset: "key = value", "# comment", "[section]" prefixing later keys with "section."
void load_config_file(Config& cfg, const std::string& path);

}
