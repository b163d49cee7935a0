#include "csgld/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "csgld/errors.hpp"

namespace csgld {
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
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '_')
            return false;
    return true;
}

double parse_double(const std::string& key, const std::string& raw, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw config_error("key '" + key + "' needs a real number, got '" + raw + "'", line);
    }
}

long parse_long(const std::string& key, const std::string& raw, int line) {
    long v = 0;
    const auto* begin = raw.data();
    const auto* end = raw.data() + raw.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        // Accept scientific notation for large step counts (e.g. 1e6).
        const double d = parse_double(key, raw, line);
        const long l = static_cast<long>(d);
        if (static_cast<double>(l) != d)
            throw config_error("key '" + key + "' needs an integer, got '" + raw + "'", line);
        return l;
    }
    return v;
}

}  // namespace

config config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

config config::parse_string(const std::string& text) {
    config cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string content = trim(raw);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value', got '" + content + "'", line_no);
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (!valid_key(key)) throw config_error("invalid key '" + key + "'", line_no);
        if (value.empty()) throw config_error("key '" + key + "' has empty value", line_no);
        if (cfg.values_.count(key))
            throw config_error("duplicate key '" + key + "'", line_no);
        cfg.values_[key] = {value, line_no};
        cfg.order_.push_back(key);
    }
    return cfg;
}

const config::entry* config::find(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
}

bool config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string config::get_string(const std::string& key, const std::string& fallback) const {
    const entry* e = find(key);
    return e ? e->value : fallback;
}

double config::get_double(const std::string& key, double fallback) const {
    const entry* e = find(key);
    return e ? parse_double(key, e->value, e->line) : fallback;
}

long config::get_long(const std::string& key, long fallback) const {
    const entry* e = find(key);
    return e ? parse_long(key, e->value, e->line) : fallback;
}

bool config::get_bool(const std::string& key, bool fallback) const {
    const entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    throw config_error("key '" + key + "' needs a boolean", e->line);
}

std::vector<std::uint64_t> config::get_u64_list(const std::string& key,
                                                std::vector<std::uint64_t> fallback) const {
    const entry* e = find(key);
    if (!e) return fallback;
    std::vector<std::uint64_t> out;
    std::istringstream in(e->value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw config_error("key '" + key + "' has an empty list item", e->line);
        out.push_back(static_cast<std::uint64_t>(parse_long(key, item, e->line)));
    }
    if (out.empty()) throw config_error("key '" + key + "' needs a list", e->line);
    return out;
}

std::vector<double> config::get_double_list(const std::string& key,
                                            std::vector<double> fallback) const {
    const entry* e = find(key);
    if (!e) return fallback;
    std::vector<double> out;
    std::istringstream in(e->value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw config_error("key '" + key + "' has an empty list item", e->line);
        out.push_back(parse_double(key, item, e->line));
    }
    if (out.empty()) throw config_error("key '" + key + "' needs a list", e->line);
    return out;
}

void config::reject_unknown_keys() const {
    for (const auto& key : order_)
        if (!consumed_.count(key))
            throw config_error("unknown key '" + key + "'", values_.at(key).line);
}

std::vector<std::pair<std::string, std::string>> config::entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(order_.size());
    for (const auto& key : order_) out.emplace_back(key, values_.at(key).value);
    return out;
}

}  // namespace csgld
