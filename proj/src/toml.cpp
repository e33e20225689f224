#include "foodwise/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "foodwise/error.hpp"

namespace foodwise::toml {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  json document() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (done()) break;
      if (peek() == '[') {
        table = &table_header(root);
      } else {
        key_value(*table);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::BadConfig, "config line " + std::to_string(line_) + ": " + what);
  }

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  char take() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_spaces() {
    while (!done() && (peek() == ' ' || peek() == '\t')) take();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!done() && peek() != '\n') take();
    }
  }

  void skip_blank_lines() {
    while (!done()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') take();
      if (peek() == '\n') {
        take();
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') take();
    if (done()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "'");
    take();
  }

  json& table_header(json& root) {
    take();  // [
    if (peek() == '[') fail("arrays of tables are not supported");
    skip_spaces();
    const std::vector<std::string> path = key();
    skip_spaces();
    if (peek() != ']') fail("expected ']'");
    take();
    json* node = &root;
    for (const std::string& part : path) {
      json& next = (*node)[part];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("'" + part + "' is not a table");
      node = &next;
    }
    return *node;
  }

  void key_value(json& table) {
    const std::vector<std::string> path = key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key");
    take();
    skip_spaces();
    json value = this->value();
    json* node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& next = (*node)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("'" + path[i] + "' is not a table");
      node = &next;
    }
    if (node->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*node)[path.back()] = std::move(value);
  }

  std::vector<std::string> key() {
    std::vector<std::string> parts;
    while (true) {
      skip_spaces();
      if (peek() == '"' || peek() == '\'') {
        parts.push_back(string());
      } else {
        std::string bare;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) {
          bare += take();
        }
        if (bare.empty()) fail("expected a key");
        parts.push_back(std::move(bare));
      }
      skip_spaces();
      if (peek() != '.') break;
      take();
    }
    return parts;
  }

  json value() {
    const char c = peek();
    if (c == '"' || c == '\'') return string();
    if (c == '[') return array();
    if (c == 't' || c == 'f') return boolean();
    return number();
  }

  std::string string() {
    const char quote = take();
    if (text_.substr(pos_, 2) == std::string(2, quote)) fail("multi-line strings are not supported");
    std::string out;
    while (true) {
      if (done() || peek() == '\n') fail("unterminated string");
      const char c = take();
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (done()) fail("unterminated escape");
        const char e = take();
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case 'u': out += unicode(4); break;
          case 'U': out += unicode(8); break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string unicode(int digits) {
    if (pos_ + static_cast<std::size_t>(digits) > text_.size()) fail("short unicode escape");
    const std::string hex(text_.substr(pos_, static_cast<std::size_t>(digits)));
    for (char h : hex) {
      if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
    }
    pos_ += static_cast<std::size_t>(digits);
    const auto cp = static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16));
    std::string out;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp <= 0x10FFFF) {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      fail("unicode escape out of range");
    }
    return out;
  }

  json array() {
    take();  // [
    json out = json::array();
    while (true) {
      skip_blank_lines();
      if (peek() == ']') {
        take();
        return out;
      }
      out.push_back(value());
      skip_blank_lines();
      if (peek() == ',') {
        take();
        continue;
      }
      skip_blank_lines();
      if (peek() != ']') fail("expected ',' or ']' in array");
    }
  }

  json boolean() {
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    fail("expected a value");
  }

  json number() {
    std::string token;
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                       peek() == '-' || peek() == '.' || peek() == '_')) {
      const char c = take();
      if (c != '_') token += c;
    }
    if (token.empty()) fail("expected a value");
    // Bare local dates (2023-03-20) come through as "YYYY-MM-DD" strings.
    if (token.size() == 10 && token[4] == '-' && token[7] == '-') return token;
    const bool is_float = token.find_first_of(".eE") != std::string::npos ||
                          token == "inf" || token == "+inf" || token == "-inf" || token == "nan";
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(token, &used);
        if (used == token.size()) return v;
      } else {
        const long long v = std::stoll(token, &used, 10);
        if (used == token.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("bad value '" + token + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

nlohmann::json parse(std::string_view text) { return Parser(text).document(); }

nlohmann::json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadConfig, "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace foodwise::toml
