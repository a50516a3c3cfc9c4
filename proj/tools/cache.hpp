#pragma once
// On-disk cache of JSON results keyed by a hash of the command, its parameters and tolerances.
#include <optional>
#include <string>

namespace lamlab::cli {

class Cache {
public:
    explicit Cache(std::string dir, bool enabled = true) : dir_(std::move(dir)), enabled_(enabled) {}

    // hex FNV-1a of the canonical key text
    static std::string hash(const std::string& key);
    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& value) const;

private:
    std::string path_of(const std::string& key) const;
    std::string dir_;
    bool enabled_;
};

}
