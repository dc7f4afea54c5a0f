#include "cbf2d/toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cbf2d::toml {

double Value::as_number(const std::string& context) const {
  if (!is_number()) throw ScenarioError(context + ": expected a number");
  return std::get<double>(v_);
}

bool Value::as_bool(const std::string& context) const {
  if (!is_bool()) throw ScenarioError(context + ": expected a boolean");
  return std::get<bool>(v_);
}

const std::string& Value::as_string(const std::string& context) const {
  if (!is_string()) throw ScenarioError(context + ": expected a string");
  return std::get<std::string>(v_);
}

const Value::Array& Value::as_array(const std::string& context) const {
  if (!is_array()) throw ScenarioError(context + ": expected an array");
  return std::get<Array>(v_);
}

const Value::Table& Value::as_table(const std::string& context) const {
  if (!is_table()) throw ScenarioError(context + ": expected a table");
  return std::get<Table>(v_);
}

Value::Table& Value::table() {
  if (!is_table()) throw ScenarioError("internal: expected a table");
  return std::get<Table>(v_);
}

Value::Array& Value::array() {
  if (!is_array()) throw ScenarioError("internal: expected an array");
  return std::get<Array>(v_);
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, std::string source)
      : text_(text), source_(std::move(source)) {}

  Value::Table run() {
    Value::Table root;
    Value::Table* current = &root;
    skip_space();
    while (!eof()) {
      if (peek() == '[') {
        current = header(root);
      } else {
        key_value(*current);
      }
      skip_space();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << source_ << ":" << line_ << ": " << msg;
    throw ScenarioError(os.str());
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char take() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  // Whitespace, newlines, and # comments are all insignificant between
  // constructs in this subset.
  void skip_space() {
    while (!eof()) {
      const char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        return;
      }
    }
  }

  void expect(char c) {
    if (eof() || peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    take();
  }

  static bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string key() {
    skip_space();
    if (eof()) fail("expected a key");
    if (peek() == '"') return string_literal();
    std::string k;
    while (!eof() && is_bare_char(peek())) k.push_back(take());
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::string string_literal() {
    expect('"');
    std::string s;
    while (true) {
      if (eof()) fail("unterminated string");
      char c = take();
      if (c == '"') break;
      if (c == '\\') {
        if (eof()) fail("unterminated escape");
        const char e = take();
        switch (e) {
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          default: fail("unsupported string escape");
        }
      }
      s.push_back(c);
    }
    return s;
  }

  // Walks a dotted path from the root, creating tables as needed. When an
  // intermediate step is an array of tables, descend into its last entry
  // (standard TOML header resolution).
  Value::Table* descend(Value::Table& root, const std::vector<std::string>& path,
                        std::size_t upto) {
    Value::Table* t = &root;
    for (std::size_t i = 0; i < upto; ++i) {
      auto [it, inserted] = t->try_emplace(path[i], Value::Table{});
      Value& v = it->second;
      if (v.is_array()) {
        Value::Array& arr = v.array();
        if (arr.empty() || !arr.back().is_table()) {
          fail("'" + path[i] + "' is not a table");
        }
        t = &arr.back().table();
      } else if (v.is_table()) {
        t = &v.table();
      } else {
        fail("'" + path[i] + "' is not a table");
      }
    }
    return t;
  }

  std::vector<std::string> dotted_key() {
    std::vector<std::string> path{key()};
    skip_space();
    while (!eof() && peek() == '.') {
      take();
      path.push_back(key());
      skip_space();
    }
    return path;
  }

  Value::Table* header(Value::Table& root) {
    expect('[');
    const bool array_header = !eof() && peek() == '[';
    if (array_header) take();
    const std::vector<std::string> path = dotted_key();
    expect(']');
    if (array_header) expect(']');

    Value::Table* parent = descend(root, path, path.size() - 1);
    const std::string& leaf = path.back();
    if (array_header) {
      auto [it, inserted] = parent->try_emplace(leaf, Value::Array{});
      if (!it->second.is_array()) fail("'" + leaf + "' is not an array");
      Value::Array& arr = it->second.array();
      arr.emplace_back(Value::Table{});
      return &arr.back().table();
    }
    auto [it, inserted] = parent->try_emplace(leaf, Value::Table{});
    if (!it->second.is_table()) fail("'" + leaf + "' is not a table");
    if (!inserted) fail("duplicate table header '" + leaf + "'");
    return &it->second.table();
  }

  void key_value(Value::Table& current) {
    const std::vector<std::string> path = dotted_key();
    skip_space();
    expect('=');
    skip_space();
    Value v = value();
    Value::Table* t = descend(current, path, path.size() - 1);
    if (!t->emplace(path.back(), std::move(v)).second) {
      fail("duplicate key '" + path.back() + "'");
    }
  }

  Value value() {
    skip_space();
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') return Value(string_literal());
    if (c == '[') return array();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string word;
      while (!eof() && is_bare_char(peek())) word.push_back(take());
      if (word == "true") return Value(true);
      if (word == "false") return Value(false);
      fail("unknown literal '" + word + "'");
    }
    return number();
  }

  Value array() {
    expect('[');
    Value::Array arr;
    skip_space();
    while (!eof() && peek() != ']') {
      arr.push_back(value());
      skip_space();
      if (!eof() && peek() == ',') {
        take();
        skip_space();
      }
    }
    expect(']');
    return Value(std::move(arr));
  }

  Value number() {
    std::string num;
    while (!eof()) {
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' ||
          c == '-' || c == '.' || c == 'e' || c == 'E' || c == '_') {
        if (c != '_') num.push_back(c);
        take();
      } else {
        break;
      }
    }
    if (num.empty()) fail("expected a value");
    char* end = nullptr;
    const double d = std::strtod(num.c_str(), &end);
    if (end != num.c_str() + num.size()) fail("malformed number '" + num + "'");
    return Value(d);
  }

  const std::string& text_;
  std::string source_;
  std::size_t pos_{0};
  int line_{1};
};

}  // namespace

Value::Table parse(const std::string& text, const std::string& source_name) {
  return Parser(text, source_name).run();
}

Value::Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const Value* find(const Value::Table& table, const std::string& key) {
  const auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

double require_number(const Value::Table& t, const std::string& key,
                      const std::string& context) {
  const Value* v = find(t, key);
  if (!v) throw ScenarioError(context + ": missing key '" + key + "'");
  return v->as_number(context + "." + key);
}

double get_number(const Value::Table& t, const std::string& key,
                  double fallback) {
  const Value* v = find(t, key);
  return v ? v->as_number(key) : fallback;
}

bool get_bool(const Value::Table& t, const std::string& key, bool fallback) {
  const Value* v = find(t, key);
  return v ? v->as_bool(key) : fallback;
}

std::string get_string(const Value::Table& t, const std::string& key,
                       const std::string& fallback) {
  const Value* v = find(t, key);
  return v ? v->as_string(key) : fallback;
}

std::string require_string(const Value::Table& t, const std::string& key,
                           const std::string& context) {
  const Value* v = find(t, key);
  if (!v) throw ScenarioError(context + ": missing key '" + key + "'");
  return v->as_string(context + "." + key);
}

const Value::Array& require_array(const Value::Table& t, const std::string& key,
                                  const std::string& context) {
  const Value* v = find(t, key);
  if (!v) throw ScenarioError(context + ": missing key '" + key + "'");
  return v->as_array(context + "." + key);
}

}  // namespace cbf2d::toml
