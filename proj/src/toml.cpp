#include "pisco/toml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pisco/errors.hpp"

namespace pisco::toml {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

Value parse_scalar(const std::string& tok, long lineno) {
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return Value{tok.substr(1, tok.size() - 2)};
    // integer if it parses fully without '.', 'e', 'inf', 'nan'
    const bool has_float_char = tok.find_first_of(".eE") != std::string::npos ||
                                tok.find("inf") != std::string::npos ||
                                tok.find("nan") != std::string::npos;
    if (!has_float_char) {
        std::int64_t iv;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
        if (res.ec == std::errc() && res.ptr == tok.data() + tok.size()) return Value{iv};
    }
    try {
        std::size_t used = 0;
        const double dv = std::stod(tok, &used);
        if (used == tok.size()) return Value{dv};
    } catch (const std::exception&) {
    }
    throw ConfigError("toml: cannot parse value '" + tok + "' on line " + std::to_string(lineno));
}

Value parse_value(const std::string& raw, long lineno) {
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("toml: empty value on line " + std::to_string(lineno));
    if (s.front() == '[') {
        if (s.back() != ']')
            throw ConfigError("toml: unterminated array on line " + std::to_string(lineno));
        std::vector<Value> items;
        std::string body = s.substr(1, s.size() - 2);
        std::string tok;
        bool in_str = false;
        for (const char c : body) {
            if (c == '"') in_str = !in_str;
            if (c == ',' && !in_str) {
                if (!trim(tok).empty()) items.push_back(parse_scalar(trim(tok), lineno));
                tok.clear();
            } else {
                tok += c;
            }
        }
        if (!trim(tok).empty()) items.push_back(parse_scalar(trim(tok), lineno));
        return Value{std::move(items)};
    }
    return parse_scalar(s, lineno);
}

}  // namespace

bool Value::as_bool() const {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw ConfigError("toml: expected boolean value");
}

std::int64_t Value::as_int() const {
    if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return *i;
    throw ConfigError("toml: expected integer value");
}

double Value::as_double() const {
    if (const double* d = std::get_if<double>(&v)) return *d;
    if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw ConfigError("toml: expected numeric value");
}

const std::string& Value::as_string() const {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("toml: expected string value");
}

const std::vector<Value>& Value::as_array() const {
    if (const auto* a = std::get_if<std::vector<Value>>(&v)) return *a;
    throw ConfigError("toml: expected array value");
}

Table Table::parse(std::istream& in) {
    Table t;
    std::string section;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("toml: malformed section header on line " +
                                  std::to_string(lineno));
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError("toml: empty section name on line " + std::to_string(lineno));
            if (!t.sections_.count(section)) {
                t.sections_[section] = {};
                t.section_order_.push_back(section);
            }
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("toml: expected key = value on line " + std::to_string(lineno));
        const std::string key = trim(s.substr(0, eq));
        if (key.empty())
            throw ConfigError("toml: empty key on line " + std::to_string(lineno));
        t.set(section, key, parse_value(s.substr(eq + 1), lineno));
    }
    return t;
}

Table Table::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
}

bool Table::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const auto& kv) { return kv.first == key; });
}

const Value& Table::get(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it != sections_.end())
        for (const auto& kv : it->second)
            if (kv.first == key) return kv.second;
    throw ConfigError("toml: missing key [" + section + "] " + key);
}

std::optional<bool> Table::get_bool(const std::string& s, const std::string& k) const {
    if (!has(s, k)) return std::nullopt;
    return get(s, k).as_bool();
}

std::optional<std::int64_t> Table::get_int(const std::string& s, const std::string& k) const {
    if (!has(s, k)) return std::nullopt;
    return get(s, k).as_int();
}

std::optional<double> Table::get_double(const std::string& s, const std::string& k) const {
    if (!has(s, k)) return std::nullopt;
    return get(s, k).as_double();
}

std::optional<std::string> Table::get_string(const std::string& s, const std::string& k) const {
    if (!has(s, k)) return std::nullopt;
    return get(s, k).as_string();
}

std::optional<std::vector<double>> Table::get_double_list(const std::string& s,
                                                          const std::string& k) const {
    if (!has(s, k)) return std::nullopt;
    std::vector<double> out;
    for (const Value& v : get(s, k).as_array()) out.push_back(v.as_double());
    return out;
}

std::optional<std::vector<std::int64_t>> Table::get_int_list(const std::string& s,
                                                             const std::string& k) const {
    if (!has(s, k)) return std::nullopt;
    std::vector<std::int64_t> out;
    for (const Value& v : get(s, k).as_array()) out.push_back(v.as_int());
    return out;
}

void Table::set(const std::string& section, const std::string& key, Value v) {
    if (!sections_.count(section)) {
        sections_[section] = {};
        section_order_.push_back(section);
    }
    auto& kvs = sections_[section];
    for (auto& kv : kvs) {
        if (kv.first == key) {
            kv.second = std::move(v);
            return;
        }
    }
    kvs.emplace_back(key, std::move(v));
}

std::string to_string(const Value& v) {
    struct Visitor {
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            std::string s(buf);
            // Keep floats recognizable as floats on re-parse.
            if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
            return s;
        }
        std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
        std::string operator()(const std::vector<Value>& a) const {
            std::string out = "[";
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (i) out += ", ";
                out += to_string(a[i]);
            }
            return out + "]";
        }
    };
    return std::visit(Visitor{}, v.v);
}

void Table::write(std::ostream& out) const {
    for (const std::string& sec : section_order_) {
        if (!sec.empty()) out << "[" << sec << "]\n";
        for (const auto& [k, v] : sections_.at(sec)) out << k << " = " << to_string(v) << "\n";
        out << "\n";
    }
}

}  // namespace pisco::toml
