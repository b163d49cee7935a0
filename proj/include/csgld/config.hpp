#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace csgld {

// Flat "key = value" configuration text. Keys use dotted section prefixes
// (e.g. kernel.epsilon); '#' starts a comment; blank lines are ignored.
// Duplicate keys are errors. Typed getters record which keys were consumed so
// loaders can reject unknown keys with their line numbers.
class config {
  public:
    static config parse_file(const std::string& path);
    static config parse_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::uint64_t> get_u64_list(const std::string& key,
                                            std::vector<std::uint64_t> fallback) const;
    std::vector<double> get_double_list(const std::string& key,
                                        std::vector<double> fallback) const;

    // Throws config_error naming the first unconsumed key and its line.
    void reject_unknown_keys() const;

    // All key/value pairs in file order (for config echoes).
    std::vector<std::pair<std::string, std::string>> entries() const;

  private:
    struct entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, entry> values_;
    std::vector<std::string> order_;
    mutable std::set<std::string> consumed_;

    const entry* find(const std::string& key) const;
};

}  // namespace csgld
