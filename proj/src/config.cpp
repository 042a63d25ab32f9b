#include <alrnn/config.hpp>
#include <alrnn/types.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <utility>

namespace alrnn {

namespace {

using Table = std::vector<std::pair<std::string, std::string>>;

const Table& shared_alm_keys()
{
    static const Table t{
        {"alm.gamma0", "1"},        {"alm.eps0", "0.1"},      {"alm.max_outer", "100"},
        {"alm.gamma_cap", "1e12"},  {"alm.mode", "fixed"},    {"bcd.mu", "1e-5"},
        {"bcd.max_inner", "500"},   {"bcd.big_gamma", "100"}, {"reg.l6", "1e-8"},
        {"activation", "relu"},     {"init", "normal:0.1"},   {"method", "alm"},
        {"baseline.epochs", "500"}, {"baseline.momentum", "0.9"},
    };
    return t;
}

const std::map<std::string, Table>& presets()
{
    static const std::map<std::string, Table> p{
        {"table5.2-synthetic-T10",
         {{"data.source", "synthetic"},
          {"data.t_len", "10"},
          {"data.n", "5"},
          {"data.m", "3"},
          {"data.r", "4"},
          {"data.weight_scale", "0.8"},
          {"data.noise_scale", "1e-3"},
          {"data.scale_reading", "variance"},
          {"data.input_low", "-1"},
          {"data.input_high", "1"},
          {"model.r", "4"},
          {"reg.tau", "1.2"},
          {"alm.eta1", "0.99"},
          {"alm.eta2", "0.83333333333333337"},
          {"alm.eta3", "0.01"},
          {"alm.eta4", "0.83333333333333337"},
          {"baseline.set", "synthetic_t10"}}},
        {"table5.2-synthetic-T500",
         {{"data.source", "synthetic"},
          {"data.t_len", "500"},
          {"data.n", "80"},
          {"data.m", "30"},
          {"data.r", "100"},
          {"data.weight_scale", "0.05"},
          {"data.noise_scale", "1e-5"},
          {"data.scale_reading", "stddev"},
          {"data.input_low", "-1"},
          {"data.input_high", "1"},
          {"model.r", "100"},
          {"reg.tau", "500"},
          {"alm.eta1", "0.9"},
          {"alm.eta2", "0.9"},
          {"alm.eta3", "0.015"},
          {"alm.eta4", "0.8"},
          {"baseline.set", "synthetic_t500"}}},
        {"table5.2-sp500",
         {{"data.source", "csv"},
          {"data.n", "11"},
          {"data.m", "1"},
          {"data.header", "detect"},
          {"data.standardize", "train"},
          {"model.r", "20"},
          {"reg.tau", "1"},
          {"alm.eta1", "0.99"},
          {"alm.eta2", "0.83333333333333337"},
          {"alm.eta3", "0.01"},
          {"alm.eta4", "0.83333333333333337"},
          {"baseline.set", "sp500"}}},
    };
    return p;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& [name, table] : presets()) names.push_back(name);
    return names;
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin)
{
    entries_[key] = {value, origin};
}

void Config::apply_preset(const std::string& name)
{
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string list;
        for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
        throw ConfigError("config: unknown preset '" + name + "' (known: " + list + ")");
    }
    for (const auto& [k, v] : shared_alm_keys()) set(k, v, "preset " + name);
    for (const auto& [k, v] : it->second) set(k, v, "preset " + name);
    set("preset", name, "preset " + name);
}

Config Config::from_preset(const std::string& name)
{
    Config c;
    c.apply_preset(name);
    return c;
}

Config Config::parse(std::istream& in, const std::string& source)
{
    Config c;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(line_no);
        if (eq == std::string::npos) {
            throw ConfigError("config " + where + ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config " + where + ": empty key");
        if (key == "preset") {
            c.apply_preset(value);
        } else {
            c.set(key, value, where);
        }
    }
    return c;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse(in, path);
}

const Config::Entry& Config::entry(const std::string& key) const
{
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

std::string Config::get(const std::string& key) const
{
    return entry(key).value;
}

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    return has(key) ? get(key) : fallback;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value, const std::string& origin,
               const char* what)
{
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || value.empty()) {
        throw ConfigError("config " + origin + ": key '" + key + "' = '" + value + "' is not " +
                          what);
    }
    return out;
}

} // namespace

double Config::get_double(const std::string& key) const
{
    const Entry& e = entry(key);
    return parse_number<double>(key, e.value, e.origin, "a number");
}

double Config::get_double(const std::string& key, double fallback) const
{
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const
{
    const Entry& e = entry(key);
    return parse_number<int>(key, e.value, e.origin, "an integer");
}

int Config::get_int(const std::string& key, int fallback) const
{
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const
{
    const Entry& e = entry(key);
    return parse_number<std::uint64_t>(key, e.value, e.origin, "a non-negative integer");
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key)) return fallback;
    const Entry& e = entry(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError("config " + e.origin + ": key '" + key + "' = '" + e.value +
                      "' is not a boolean");
}

std::vector<std::string> Config::unknown_keys(const std::vector<std::string>& known) const
{
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_) {
        bool ok = false;
        for (const auto& k : known) {
            if (!k.empty() && k.back() == '*') {
                ok = key.compare(0, k.size() - 1, k, 0, k.size() - 1) == 0;
            } else {
                ok = key == k;
            }
            if (ok) break;
        }
        if (!ok) out.push_back(key + " (" + e.origin + ")");
    }
    return out;
}

std::map<std::string, std::string> Config::values() const
{
    std::map<std::string, std::string> out;
    for (const auto& [k, e] : entries_) out[k] = e.value;
    return out;
}

} // namespace alrnn
