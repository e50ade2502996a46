#pragma once

// Content-addressed disk cache: entries are JSON files named by the FNV-1a
// hash of the request key. Concurrent readers are fine; writers serialize.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

namespace tlr {

inline uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& data) {
    static const char* digits = "0123456789abcdef";
    uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

class DiskCache {
public:
    DiskCache() = default;
    explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    std::optional<std::string> get(const std::string& key) const {
        if (!enabled()) return std::nullopt;
        std::ifstream in(path_for(key), std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

    void put(const std::string& key, const std::string& value) {
        if (!enabled()) return;
        std::lock_guard<std::mutex> lock(*write_mutex_);
        std::filesystem::path target = path_for(key);
        std::filesystem::path tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << value;
        }
        std::filesystem::rename(tmp, target);
    }

private:
    std::filesystem::path path_for(const std::string& key) const {
        return dir_ / (hash_hex(key) + ".json");
    }

    std::filesystem::path dir_;
    std::shared_ptr<std::mutex> write_mutex_ = std::make_shared<std::mutex>();
};

}  // namespace tlr
