#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sq2lt/errors.hpp"
#include "sq2lt/scenario.hpp"

namespace sq2lt {

// Scenario config grammar (one document per scenario):
//
//   document   := { assignment }
//   assignment := key '=' value
//   value      := number | string | list | table
//   list       := '[' [ value { ',' value } ] ']'
//   table      := '{' [ assignment { ',' assignment } ] '}'
//
// '#' starts a comment running to end of line; newlines are ordinary
// whitespace. Recognized top-level keys: capacities, distribution, d,
// lambda_grid, runs, busy_periods_per_run, seed. Unknown keys anywhere are
// hard errors.

namespace detail {

struct ConfigValue {
  enum class Kind { number, string, list, table };
  Kind kind = Kind::number;
  double number = 0.0;
  bool integral = false;
  std::uint64_t uint_value = 0;
  std::string text;
  std::vector<ConfigValue> items;
  std::vector<std::pair<std::string, ConfigValue>> entries;
  int line = 0;
  int column = 0;
};

class ConfigLexer {
 public:
  explicit ConfigLexer(std::string_view src) : src_(src) {}

  struct Token {
    enum class Kind { ident, number, string, equals, lbracket, rbracket, lbrace, rbrace, comma, end };
    Kind kind;
    std::string text;
    int line;
    int column;
  };

  Token next() {
    skip_space();
    Token tok{Token::Kind::end, "", line_, column_};
    if (pos_ >= src_.size()) return tok;
    const char c = src_[pos_];
    if (c == '=' || c == '[' || c == ']' || c == '{' || c == '}' || c == ',') {
      advance();
      tok.text = std::string(1, c);
      switch (c) {
        case '=': tok.kind = Token::Kind::equals; break;
        case '[': tok.kind = Token::Kind::lbracket; break;
        case ']': tok.kind = Token::Kind::rbracket; break;
        case '{': tok.kind = Token::Kind::lbrace; break;
        case '}': tok.kind = Token::Kind::rbrace; break;
        default: tok.kind = Token::Kind::comma; break;
      }
      return tok;
    }
    if (c == '"') {
      advance();
      std::string text;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\n') throw ParseError(tok.line, tok.column, "unterminated string");
        text.push_back(src_[pos_]);
        advance();
      }
      if (pos_ >= src_.size()) throw ParseError(tok.line, tok.column, "unterminated string");
      advance();
      tok.kind = Token::Kind::string;
      tok.text = std::move(text);
      return tok;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string text;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        text.push_back(src_[pos_]);
        advance();
      }
      tok.kind = Token::Kind::ident;
      tok.text = std::move(text);
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::string text;
      while (pos_ < src_.size()) {
        const char d = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.' || d == 'e' || d == 'E' ||
            d == '-' || d == '+') {
          // Sign characters only at the start or right after an exponent.
          if ((d == '-' || d == '+') && !text.empty() && text.back() != 'e' && text.back() != 'E')
            break;
          text.push_back(d);
          advance();
        } else {
          break;
        }
      }
      tok.kind = Token::Kind::number;
      tok.text = std::move(text);
      return tok;
    }
    throw ParseError(line_, column_, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class ConfigParser {
 public:
  explicit ConfigParser(std::string_view src) : lexer_(src) { shift(); }

  std::vector<std::pair<std::string, ConfigValue>> parse_document() {
    std::vector<std::pair<std::string, ConfigValue>> entries;
    while (current_.kind != ConfigLexer::Token::Kind::end) {
      entries.push_back(parse_assignment());
    }
    return entries;
  }

 private:
  using Token = ConfigLexer::Token;

  std::pair<std::string, ConfigValue> parse_assignment() {
    expect(Token::Kind::ident, "key");
    std::string key = current_.text;
    shift();
    expect(Token::Kind::equals, "'='");
    shift();
    return {std::move(key), parse_value()};
  }

  ConfigValue parse_value() {
    ConfigValue v;
    v.line = current_.line;
    v.column = current_.column;
    switch (current_.kind) {
      case Token::Kind::number: {
        v.kind = ConfigValue::Kind::number;
        v.text = current_.text;
        const auto* begin = v.text.data();
        const auto* end = begin + v.text.size();
        auto rc = std::from_chars(begin, end, v.number);
        if (rc.ec != std::errc{} || rc.ptr != end) {
          throw ParseError(v.line, v.column, "malformed number '" + v.text + "'");
        }
        if (v.text.find_first_of(".eE") == std::string::npos && v.text[0] != '-') {
          auto ru = std::from_chars(begin, end, v.uint_value);
          v.integral = ru.ec == std::errc{} && ru.ptr == end;
        }
        shift();
        return v;
      }
      case Token::Kind::string:
        v.kind = ConfigValue::Kind::string;
        v.text = current_.text;
        shift();
        return v;
      case Token::Kind::lbracket: {
        v.kind = ConfigValue::Kind::list;
        shift();
        if (current_.kind != Token::Kind::rbracket) {
          v.items.push_back(parse_value());
          while (current_.kind == Token::Kind::comma) {
            shift();
            v.items.push_back(parse_value());
          }
        }
        expect(Token::Kind::rbracket, "']'");
        shift();
        return v;
      }
      case Token::Kind::lbrace: {
        v.kind = ConfigValue::Kind::table;
        shift();
        if (current_.kind != Token::Kind::rbrace) {
          v.entries.push_back(parse_assignment());
          while (current_.kind == Token::Kind::comma) {
            shift();
            v.entries.push_back(parse_assignment());
          }
        }
        expect(Token::Kind::rbrace, "'}'");
        shift();
        return v;
      }
      default:
        throw ParseError(current_.line, current_.column, "expected a value");
    }
  }

  void expect(Token::Kind kind, const char* what) {
    if (current_.kind != kind) {
      throw ParseError(current_.line, current_.column,
                       std::string("expected ") + what + ", got '" + current_.text + "'");
    }
  }

  void shift() { current_ = lexer_.next(); }

  ConfigLexer lexer_;
  Token current_{Token::Kind::end, "", 1, 1};
};

inline double as_number(const ConfigValue& v, const char* what) {
  if (v.kind != ConfigValue::Kind::number) {
    throw ParseError(v.line, v.column, std::string(what) + " must be a number");
  }
  return v.number;
}

inline std::uint64_t as_uint(const ConfigValue& v, const char* what) {
  if (v.kind != ConfigValue::Kind::number || !v.integral) {
    throw ParseError(v.line, v.column, std::string(what) + " must be a nonnegative integer");
  }
  return v.uint_value;
}

inline std::vector<double> as_number_list(const ConfigValue& v, const char* what) {
  if (v.kind != ConfigValue::Kind::list) {
    throw ParseError(v.line, v.column, std::string(what) + " must be a list");
  }
  std::vector<double> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(as_number(item, what));
  return out;
}

inline ServiceDistribution parse_distribution(const ConfigValue& v) {
  if (v.kind != ConfigValue::Kind::table) {
    throw ParseError(v.line, v.column, "distribution must be a table { family = ..., ... }");
  }
  std::string family;
  std::optional<double> rate, value, shape, scale;
  std::vector<double> weights, rates;
  for (const auto& [key, val] : v.entries) {
    if (key == "family") {
      if (val.kind != ConfigValue::Kind::string) {
        throw ParseError(val.line, val.column, "family must be a string");
      }
      family = val.text;
    } else if (key == "rate") {
      rate = as_number(val, "rate");
    } else if (key == "value") {
      value = as_number(val, "value");
    } else if (key == "shape") {
      shape = as_number(val, "shape");
    } else if (key == "scale") {
      scale = as_number(val, "scale");
    } else if (key == "weights") {
      weights = as_number_list(val, "weights");
    } else if (key == "rates") {
      rates = as_number_list(val, "rates");
    } else {
      throw ParseError(val.line, val.column, "unknown distribution key '" + key + "'");
    }
  }
  const auto need = [&](const std::optional<double>& p, const char* what) {
    if (!p) {
      throw ParseError(v.line, v.column,
                       family + " distribution requires parameter '" + std::string(what) + "'");
    }
    return *p;
  };
  if (family == "exponential") return ServiceDistribution::exponential(need(rate, "rate"));
  if (family == "deterministic") return ServiceDistribution::deterministic(need(value, "value"));
  if (family == "weibull") {
    return ServiceDistribution::weibull(need(shape, "shape"), need(scale, "scale"));
  }
  if (family == "hyperexponential") {
    if (weights.empty() || rates.empty()) {
      throw ParseError(v.line, v.column, "hyperexponential requires 'weights' and 'rates'");
    }
    return ServiceDistribution::hyperexponential(std::move(weights), std::move(rates));
  }
  throw ParseError(v.line, v.column, "unknown distribution family '" + family + "'");
}

inline void format_double(std::string& out, double x) {
  char buf[40];
  auto rc = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, rc.ptr);
}

}  // namespace detail

inline ScenarioConfig parse_config_text(std::string_view text) {
  detail::ConfigParser parser(text);
  ScenarioSpec spec;
  for (const auto& [key, value] : parser.parse_document()) {
    if (key == "capacities") {
      spec.capacities = detail::as_number_list(value, "capacities");
    } else if (key == "distribution") {
      spec.distribution = detail::parse_distribution(value);
    } else if (key == "d") {
      spec.d = static_cast<int>(detail::as_uint(value, "d"));
    } else if (key == "lambda_grid") {
      spec.lambda_grid = detail::as_number_list(value, "lambda_grid");
    } else if (key == "runs") {
      spec.runs = static_cast<int>(detail::as_uint(value, "runs"));
    } else if (key == "busy_periods_per_run") {
      spec.busy_periods_per_run = static_cast<long long>(detail::as_uint(value, "busy_periods_per_run"));
    } else if (key == "seed") {
      spec.seed = detail::as_uint(value, "seed");
    } else {
      throw ParseError(value.line, value.column, "unknown key '" + key + "'");
    }
  }
  return validate_scenario(spec);
}

inline ScenarioConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::file_not_found, path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

// Canonical serialization; parse_config_text(emit_config(c)) reproduces c
// exactly (shortest round-trip number formatting).
inline std::string emit_config(const ScenarioConfig& scn) {
  std::string out;
  const auto list = [&](const std::vector<double>& xs) {
    out += "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ", ";
      detail::format_double(out, xs[i]);
    }
    out += "]";
  };
  out += "capacities = ";
  list(scn.capacities.values());
  out += "\ndistribution = { family = \"";
  out += family_name(scn.distribution.family());
  out += "\"";
  switch (scn.distribution.family()) {
    case DistFamily::exponential:
      out += ", rate = ";
      detail::format_double(out, scn.distribution.rates()[0]);
      break;
    case DistFamily::deterministic:
      out += ", value = ";
      detail::format_double(out, scn.distribution.scale());
      break;
    case DistFamily::weibull:
      out += ", shape = ";
      detail::format_double(out, scn.distribution.shape());
      out += ", scale = ";
      detail::format_double(out, scn.distribution.scale());
      break;
    case DistFamily::hyperexponential:
      out += ", weights = ";
      list(scn.distribution.weights());
      out += ", rates = ";
      list(scn.distribution.rates());
      break;
  }
  out += " }\nd = " + std::to_string(scn.d);
  out += "\nlambda_grid = ";
  list(scn.lambda_grid);
  out += "\nruns = " + std::to_string(scn.runs);
  out += "\nbusy_periods_per_run = " + std::to_string(scn.busy_periods_per_run);
  out += "\nseed = " + std::to_string(scn.seed);
  out += "\n";
  return out;
}

}  // namespace sq2lt
