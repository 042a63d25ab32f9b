#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace alrnn {

/// Flat `key = value` configuration. A `preset = <name>` line pulls in a
/// built-in preset; keys that follow override it. `#` starts a comment.
class Config
{
public:
    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config load(const std::string& path);
    static Config from_preset(const std::string& name);

    void set(const std::string& key, const std::string& value, const std::string& origin = "override");
    /// Loads every key of a built-in preset (later sets win).
    void apply_preset(const std::string& name);

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Keys not listed in `known` (prefix match when the entry ends in '*').
    std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

    std::map<std::string, std::string> values() const;

private:
    struct Entry
    {
        std::string value;
        std::string origin;
    };
    const Entry& entry(const std::string& key) const;
    std::map<std::string, Entry> entries_;
};

std::vector<std::string> preset_names();

} // namespace alrnn
