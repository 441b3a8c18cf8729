#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace pisco::toml {

// Minimal TOML subset: single-level [tables], bare keys, values that are
// booleans, integers, floats, quoted strings, or flat arrays of those.
// Enough for experiment specs; not a general TOML implementation.

struct Value {
    std::variant<bool, std::int64_t, double, std::string, std::vector<Value>> v;

    bool is_array() const { return std::holds_alternative<std::vector<Value>>(v); }
    bool as_bool() const;
    std::int64_t as_int() const;
    double as_double() const;  // accepts integer values too
    const std::string& as_string() const;
    const std::vector<Value>& as_array() const;
};

class Table {
  public:
    static Table parse(std::istream& in);
    static Table parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    const Value& get(const std::string& section, const std::string& key) const;

    std::optional<bool> get_bool(const std::string& s, const std::string& k) const;
    std::optional<std::int64_t> get_int(const std::string& s, const std::string& k) const;
    std::optional<double> get_double(const std::string& s, const std::string& k) const;
    std::optional<std::string> get_string(const std::string& s, const std::string& k) const;
    std::optional<std::vector<double>> get_double_list(const std::string& s,
                                                       const std::string& k) const;
    std::optional<std::vector<std::int64_t>> get_int_list(const std::string& s,
                                                          const std::string& k) const;

    void set(const std::string& section, const std::string& key, Value v);
    void write(std::ostream& out) const;

  private:
    // section -> key -> value; insertion-ordered for stable serialization
    std::map<std::string, std::vector<std::pair<std::string, Value>>> sections_;
    std::vector<std::string> section_order_;
};

std::string to_string(const Value& v);

}  // namespace pisco::toml
