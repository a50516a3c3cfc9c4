#include "cache.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lamlab::cli {

namespace fs = std::filesystem;

std::string Cache::hash(const std::string& key) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

std::string Cache::path_of(const std::string& key) const { return (fs::path(dir_) / (hash(key) + ".json")).string(); }

std::optional<std::string> Cache::get(const std::string& key) const {
    if (!enabled_) return std::nullopt;
    std::ifstream f(path_of(key));
    if (!f) return std::nullopt;
    // first line repeats the key so hash collisions are detected
    std::string head;
    std::getline(f, head);
    if (head != key) return std::nullopt;
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void Cache::put(const std::string& key, const std::string& value) const {
    if (!enabled_ || key.find('\n') != std::string::npos) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) return;  // an unwritable cache only costs recomputation
    // write then rename so concurrent readers never see a partial file
    std::string tmp = path_of(key) + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f) return;
        f << key << "\n" << value;
    }
    fs::rename(tmp, path_of(key), ec);
}

}
