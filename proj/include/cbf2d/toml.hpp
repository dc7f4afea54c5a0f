#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cbf2d {

// Raised for any scenario/world file problem: unreadable file, parse
// error, missing or ill-typed key, failed validation.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace toml {

// Small TOML subset, enough for the shipped scenario and world files:
// comments, [table] and [[array-of-tables]] headers with dotted keys,
// strings, numbers, booleans, and (multi-line, arbitrarily nested) arrays.
// Dates, inline tables, and string escapes beyond \" \\ \n \t are not
// supported.
class Value {
 public:
  using Array = std::vector<Value>;
  using Table = std::map<std::string, Value>;

  Value() : v_(Table{}) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(Array a) : v_(std::move(a)) {}
  explicit Value(Table t) : v_(std::move(t)) {}

  bool is_number() const { return std::holds_alternative<double>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  bool is_table() const { return std::holds_alternative<Table>(v_); }

  double as_number(const std::string& context) const;
  bool as_bool(const std::string& context) const;
  const std::string& as_string(const std::string& context) const;
  const Array& as_array(const std::string& context) const;
  const Table& as_table(const std::string& context) const;

  Table& table();  // throws if not a table
  Array& array();  // throws if not an array

 private:
  std::variant<double, bool, std::string, Array, Table> v_;
};

// Parses a whole document. source_name appears in error messages.
Value::Table parse(const std::string& text, const std::string& source_name);

Value::Table parse_file(const std::string& path);

// Lookup helpers. key may not be dotted; missing keys either throw
// (require_*) or return the fallback (get_*).
const Value* find(const Value::Table& table, const std::string& key);
double require_number(const Value::Table&, const std::string& key,
                      const std::string& context);
double get_number(const Value::Table&, const std::string& key, double fallback);
bool get_bool(const Value::Table&, const std::string& key, bool fallback);
std::string get_string(const Value::Table&, const std::string& key,
                       const std::string& fallback);
std::string require_string(const Value::Table&, const std::string& key,
                           const std::string& context);
const Value::Array& require_array(const Value::Table&, const std::string& key,
                                  const std::string& context);

}  // namespace toml
}  // namespace cbf2d
