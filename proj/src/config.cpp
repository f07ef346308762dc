#include "aoi/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aoi/errors.hpp"

namespace aoi {

namespace {

using nlohmann::json;

struct Token {
  enum Kind { kIdent, kNumber, kString, kSymbol, kEnd } kind;
  std::string text;   // ident / string body / symbol character
  double num = 0.0;   // valid for kNumber
  bool is_int = false;
  long long inum = 0;
  int line = 0;
};

class Lexer {
 public:
  Lexer(const std::string& text, const std::string& origin)
      : text_(text), origin_(origin) {}

  Token next() {
    skip_blank();
    Token t;
    t.line = line_;
    if (pos_ >= text_.size()) {
      t.kind = Token::kEnd;
      return t;
    }
    const char c = text_[pos_];
    if (c == '=' || c == ',' || c == '[' || c == ']' || c == '{' || c == '}') {
      ++pos_;
      t.kind = Token::kSymbol;
      t.text = std::string(1, c);
      return t;
    }
    if (c == '"') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
        ++pos_;
      }
      if (pos_ >= text_.size() || text_[pos_] != '"') {
        fail(line_, "unterminated string");
      }
      t.kind = Token::kString;
      t.text = text_.substr(start, pos_ - start);
      ++pos_;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      t.kind = Token::kIdent;
      t.text = text_.substr(start, pos_ - start);
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      if (end == begin || errno == ERANGE) fail(line_, "malformed number");
      const std::size_t len = static_cast<std::size_t>(end - begin);
      t.kind = Token::kNumber;
      t.text = text_.substr(pos_, len);
      t.num = v;
      t.is_int = t.text.find_first_of(".eE") == std::string::npos;
      if (t.is_int) t.inum = std::strtoll(t.text.c_str(), nullptr, 10);
      pos_ += len;
      return t;
    }
    fail(line_, std::string("unexpected character '") + c + "'");
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << message;
    throw ConfigError(os.str());
  }

 private:
  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::string origin_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const std::string& origin)
      : lex_(text, origin) {
    advance();
  }

  json parse_file() {
    json obj = json::object();
    while (cur_.kind != Token::kEnd) {
      parse_entry(obj, /*top_level=*/true);
    }
    return obj;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  bool is_symbol(const char* s) const {
    return cur_.kind == Token::kSymbol && cur_.text == s;
  }

  void expect_symbol(const char* s, const char* context) {
    if (!is_symbol(s)) {
      lex_.fail(cur_.line, std::string("expected '") + s + "' " + context);
    }
    advance();
  }

  void parse_entry(json& obj, bool top_level) {
    if (cur_.kind != Token::kIdent) {
      lex_.fail(cur_.line, top_level ? "expected a key at top level"
                                     : "expected a key inside { }");
    }
    const std::string key = cur_.text;
    const int line = cur_.line;
    advance();
    expect_symbol("=", ("after key '" + key + "'").c_str());
    if (obj.contains(key)) {
      lex_.fail(line, "duplicate key '" + key + "'");
    }
    obj[key] = parse_value();
  }

  json parse_value() {
    switch (cur_.kind) {
      case Token::kNumber: {
        json v = cur_.is_int ? json(cur_.inum) : json(cur_.num);
        advance();
        return v;
      }
      case Token::kString:
      case Token::kIdent: {
        json v = cur_.text;
        advance();
        return v;
      }
      case Token::kSymbol:
        if (cur_.text == "[") return parse_array();
        if (cur_.text == "{") return parse_table();
        break;
      case Token::kEnd:
        break;
    }
    lex_.fail(cur_.line, "expected a value");
  }

  json parse_array() {
    advance();  // consume '['
    json arr = json::array();
    if (is_symbol("]")) {
      advance();
      return arr;
    }
    while (true) {
      arr.push_back(parse_value());
      if (is_symbol(",")) {
        advance();
        continue;
      }
      expect_symbol("]", "to close the array");
      return arr;
    }
  }

  json parse_table() {
    advance();  // consume '{'
    json obj = json::object();
    if (is_symbol("}")) {
      advance();
      return obj;
    }
    while (true) {
      parse_entry(obj, /*top_level=*/false);
      if (is_symbol(",")) {
        advance();
        continue;
      }
      expect_symbol("}", "to close the table");
      return obj;
    }
  }

  Lexer lex_;
  Token cur_;
};

double field_number(const json& j, const char* object_name, const char* field) {
  if (!j.contains(field)) {
    throw ConfigError(std::string(object_name) + " is missing field '" + field +
                      "'");
  }
  const json& v = j.at(field);
  if (!v.is_number()) {
    throw ConfigError(std::string(object_name) + "." + field +
                      " must be a number");
  }
  return v.get<double>();
}

std::vector<double> field_number_array(const json& j, const char* object_name,
                                       const char* field) {
  if (!j.contains(field)) {
    throw ConfigError(std::string(object_name) + " is missing field '" + field +
                      "'");
  }
  const json& v = j.at(field);
  if (!v.is_array() || v.empty()) {
    throw ConfigError(std::string(object_name) + "." + field +
                      " must be a nonempty array of numbers");
  }
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) {
      throw ConfigError(std::string(object_name) + "." + field +
                        " must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

void reject_unknown_fields(const json& j, const char* object_name,
                           std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (item.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError(std::string("unknown field '") + item.key() + "' in " +
                        object_name);
    }
  }
}

}  // namespace

json parse_config_text(const std::string& text, const std::string& origin) {
  Parser parser(text, origin);
  return parser.parse_file();
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

ServiceDistribution service_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ConfigError(
        "service must be a table with a string field 'kind', e.g. "
        "{ kind = \"exponential\", rate = 1.0 }");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "exponential") {
      reject_unknown_fields(j, "service", {"kind", "rate"});
      return Exponential(field_number(j, "service", "rate"));
    }
    if (kind == "gamma") {
      reject_unknown_fields(j, "service", {"kind", "shape", "rate"});
      return Gamma(field_number(j, "service", "shape"),
                   field_number(j, "service", "rate"));
    }
    if (kind == "hyperexponential") {
      reject_unknown_fields(j, "service", {"kind", "probs", "rates"});
      return HyperExponential(field_number_array(j, "service", "probs"),
                              field_number_array(j, "service", "rates"));
    }
    if (kind == "lognormal") {
      reject_unknown_fields(j, "service", {"kind", "location", "scale"});
      return LogNormal(field_number(j, "service", "location"),
                       field_number(j, "service", "scale"));
    }
    if (kind == "pareto") {
      reject_unknown_fields(j, "service", {"kind", "scale", "shape"});
      return Pareto(field_number(j, "service", "scale"),
                    field_number(j, "service", "shape"));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    // Parameter validation inside the distribution constructors.
    throw ConfigError(std::string("invalid service parameters: ") + e.what());
  }
  throw ConfigError("unknown service kind '" + kind +
                    "' (expected exponential, gamma, hyperexponential, "
                    "lognormal, or pareto)");
}

json service_to_json(const ServiceDistribution& dist) {
  json j;
  j["kind"] = kind_name(dist);
  std::visit(
      [&](const auto& d) {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Exponential>) {
          j["rate"] = d.rate;
        } else if constexpr (std::is_same_v<D, Gamma>) {
          j["shape"] = d.shape;
          j["rate"] = d.rate;
        } else if constexpr (std::is_same_v<D, HyperExponential>) {
          j["probs"] = d.probs;
          j["rates"] = d.rates;
        } else if constexpr (std::is_same_v<D, LogNormal>) {
          j["location"] = d.location;
          j["scale"] = d.scale;
        } else {
          j["scale"] = d.scale;
          j["shape"] = d.shape;
        }
      },
      dist);
  return j;
}

}  // namespace aoi
