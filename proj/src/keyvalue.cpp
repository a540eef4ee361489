#include "polyrep/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

#include "polyrep/errors.hpp"

namespace polyrep::kv {

namespace {

enum class Tok { Ident, Number, String, Equals, LBrace, RBrace, LBracket, RBracket, Comma, Slash, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    if (pos_ >= src_.size()) return {Tok::End, "", line_};
    const char c = src_[pos_];
    switch (c) {
      case '=': ++pos_; return {Tok::Equals, "=", line_};
      case '{': ++pos_; return {Tok::LBrace, "{", line_};
      case '}': ++pos_; return {Tok::RBrace, "}", line_};
      case '[': ++pos_; return {Tok::LBracket, "[", line_};
      case ']': ++pos_; return {Tok::RBracket, "]", line_};
      case ',': ++pos_; return {Tok::Comma, ",", line_};
      case '/': ++pos_; return {Tok::Slash, "/", line_};
      case '"': return string();
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')
      return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    throw ParseError("document", line_, std::string("unexpected character '") + c + "'");
  }

 private:
  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c)) || c == ';') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  Token string() {
    const int line = line_;
    ++pos_;
    std::string out;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\n') throw ParseError("document", line, "unterminated string");
      if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) ++pos_;
      out += src_[pos_++];
    }
    if (pos_ >= src_.size()) throw ParseError("document", line, "unterminated string");
    ++pos_;
    return {Tok::String, out, line};
  }

  Token number() {
    const std::size_t start = pos_;
    if (src_[pos_] == '-' || src_[pos_] == '+') ++pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      const bool exp_sign = (c == '-' || c == '+') &&
                            (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' ||
          c == 'E' || exp_sign) {
        ++pos_;
      } else {
        break;
      }
    }
    return {Tok::Number, std::string(src_.substr(start, pos_ - start)), line_};
  }

  Token ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')
        ++pos_;
      else
        break;
    }
    return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), line_};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

double parse_double(const std::string& text, int line) {
  double x = 0.0;
  const char* first = text.data();
  if (!text.empty() && text[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("document", line, "malformed number '" + text + "'");
  return x;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { advance(); }

  std::vector<Entry> entries(bool nested) {
    std::vector<Entry> out;
    while (true) {
      if (cur_.kind == Tok::End) {
        if (nested) throw ParseError("document", cur_.line, "missing '}'");
        return out;
      }
      if (cur_.kind == Tok::RBrace) {
        if (!nested) throw ParseError("document", cur_.line, "unmatched '}'");
        advance();
        return out;
      }
      if (cur_.kind != Tok::Ident)
        throw ParseError("document", cur_.line, "expected a key, got '" + cur_.text + "'");
      Entry e;
      e.key = cur_.text;
      e.line = cur_.line;
      advance();
      if (cur_.kind == Tok::Equals) {
        advance();
        e.value = value();
      } else if (cur_.kind == Tok::LBrace) {
        advance();
        e.is_block = true;
        e.children = entries(true);
      } else {
        throw ParseError(e.key, e.line, "expected '=' or '{' after key");
      }
      out.push_back(std::move(e));
    }
  }

 private:
  void advance() { cur_ = lex_.next(); }

  Value value() {
    Value v;
    v.line = cur_.line;
    switch (cur_.kind) {
      case Tok::Number: {
        v.kind = Value::Kind::Number;
        v.text = cur_.text;
        v.number = parse_double(cur_.text, cur_.line);
        advance();
        if (cur_.kind == Tok::Slash) {
          advance();
          if (cur_.kind != Tok::Number)
            throw ParseError("document", cur_.line, "fraction needs a denominator");
          const double den = parse_double(cur_.text, cur_.line);
          if (den == 0.0) throw ParseError("document", cur_.line, "zero denominator");
          v.text += "/" + cur_.text;
          v.number /= den;
          advance();
        }
        return v;
      }
      case Tok::Ident:
      case Tok::String:
        v.kind = Value::Kind::Word;
        v.text = cur_.text;
        advance();
        return v;
      case Tok::LBracket: {
        v.kind = Value::Kind::List;
        advance();
        if (cur_.kind == Tok::RBracket) {
          advance();
          return v;
        }
        while (true) {
          v.items.push_back(value());
          if (cur_.kind == Tok::Comma) {
            advance();
          } else if (cur_.kind == Tok::RBracket) {
            advance();
            return v;
          } else {
            throw ParseError("document", cur_.line, "expected ',' or ']' in list");
          }
        }
      }
      default:
        throw ParseError("document", cur_.line, "expected a value, got '" + cur_.text + "'");
    }
  }

  Lexer lex_;
  Token cur_{Tok::End, "", 1};
};

}  // namespace

Document parse(std::string_view text) {
  Parser p(text);
  return Document{p.entries(false)};
}

Node::Node(std::string path, const std::vector<Entry>* entries, int line)
    : path_(std::move(path)), entries_(entries), used_(entries->size(), false), line_(line) {}

std::string Node::qualified(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

const Entry* Node::find(std::string_view key, bool block) const {
  const Entry* hit = nullptr;
  for (const auto& e : *entries_) {
    if (e.key != key) continue;
    if (e.is_block != block)
      throw ParseError(qualified(key), e.line,
                       block ? "expected a block '{ ... }'" : "expected '= value'");
    if (hit && !block) throw ParseError(qualified(key), e.line, "duplicate key");
    if (!hit) hit = &e;
  }
  return hit;
}

bool Node::has(std::string_view key) const {
  for (const auto& e : *entries_)
    if (e.key == key) return true;
  return false;
}

bool Node::has_block(std::string_view key) const {
  for (const auto& e : *entries_)
    if (e.key == key && e.is_block) return true;
  return false;
}

const Value* Node::find_value(std::string_view key) {
  const Entry* e = find(key, false);
  if (!e) return nullptr;
  used_[static_cast<std::size_t>(e - entries_->data())] = true;
  return &e->value;
}

const Value& Node::value(std::string_view key) {
  const Value* v = find_value(key);
  if (!v) throw ParseError(qualified(key), line_, "missing required key");
  return *v;
}

std::vector<Node> Node::blocks(std::string_view key) {
  find(key, true);  // type check
  std::vector<Node> out;
  for (std::size_t i = 0; i < entries_->size(); ++i) {
    const auto& e = (*entries_)[i];
    if (e.key != key) continue;
    used_[i] = true;
    out.emplace_back(qualified(key), &e.children, e.line);
  }
  return out;
}

Node Node::block(std::string_view key) {
  auto all = blocks(key);
  if (all.empty()) throw ParseError(qualified(key), line_, "missing required block");
  if (all.size() > 1) throw ParseError(qualified(key), all[1].line(), "duplicate block");
  return all.front();
}

double Node::number(std::string_view key) {
  return to_number(value(key), qualified(key));
}

double Node::number_or(std::string_view key, double fallback) {
  const Value* v = find_value(key);
  return v ? to_number(*v, qualified(key)) : fallback;
}

std::int64_t Node::integer(std::string_view key) {
  const Value& v = value(key);
  std::int64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
  if (!v.is_number() || ec != std::errc() || ptr != v.text.data() + v.text.size())
    throw ParseError(qualified(key), v.line, "expected an integer");
  return x;
}

std::uint64_t Node::unsigned_integer(std::string_view key) {
  const Value& v = value(key);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
  if (!v.is_number() || ec != std::errc() || ptr != v.text.data() + v.text.size())
    throw ParseError(qualified(key), v.line, "expected a non-negative integer");
  return x;
}

std::string Node::word(std::string_view key) {
  const Value& v = value(key);
  if (!v.is_word()) throw ParseError(qualified(key), v.line, "expected a word or string");
  return v.text;
}

bool Node::boolean_or(std::string_view key, bool fallback) {
  const Value* v = find_value(key);
  if (!v) return fallback;
  if (v->is_word() && v->text == "true") return true;
  if (v->is_word() && v->text == "false") return false;
  throw ParseError(qualified(key), v->line, "expected true or false");
}

void Node::finish() const {
  for (std::size_t i = 0; i < entries_->size(); ++i) {
    if (!used_[i]) {
      const auto& e = (*entries_)[i];
      throw ParseError(qualified(e.key), e.line, "unknown key");
    }
  }
}

double to_number(const Value& v, const std::string& field) {
  if (!v.is_number()) throw ParseError(field, v.line, "expected a number");
  if (!std::isfinite(v.number)) throw ParseError(field, v.line, "number is not finite");
  return v.number;
}

std::vector<double> to_numbers(const Value& v, const std::string& field) {
  if (v.is_number()) return {to_number(v, field)};
  if (!v.is_list()) throw ParseError(field, v.line, "expected a number or a list");
  std::vector<double> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(to_number(item, field));
  return out;
}

std::string format_number(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace polyrep::kv
