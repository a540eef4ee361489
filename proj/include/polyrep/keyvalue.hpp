#pragma once

// Nested key/value documents used for scenario files.
//
//   document := entry*
//   entry    := KEY '=' value | KEY '{' entry* '}'
//   value    := scalar | '[' [value (',' value)*] ']'
//   scalar   := NUMBER ['/' NUMBER] | IDENT | "quoted string"
//
// Entries are separated by whitespace, newlines or ';'. '#' starts a comment
// running to the end of the line. NUMBER '/' NUMBER denotes a fraction.
// A key may repeat; repeated blocks form lists (e.g. one `atom { }` per atom).

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace polyrep::kv {

struct Value {
  enum class Kind { Number, Word, List };

  Kind kind = Kind::Word;
  double number = 0.0;
  std::string text;  // raw token for numbers, content for words/strings
  std::vector<Value> items;
  int line = 0;

  bool is_number() const { return kind == Kind::Number; }
  bool is_word() const { return kind == Kind::Word; }
  bool is_list() const { return kind == Kind::List; }
};

struct Node;

struct Entry {
  std::string key;
  int line = 0;
  bool is_block = false;
  Value value;                 // when !is_block
  std::vector<Entry> children; // when is_block
};

/// A block's entries with typed accessors. Every accessor marks the key as
/// consumed; `finish()` rejects keys nobody asked for.
class Node {
 public:
  Node(std::string path, const std::vector<Entry>* entries, int line);

  const std::string& path() const { return path_; }
  int line() const { return line_; }

  bool has(std::string_view key) const;

  const Value* find_value(std::string_view key);
  const Value& value(std::string_view key);
  std::vector<Node> blocks(std::string_view key);
  Node block(std::string_view key);
  bool has_block(std::string_view key) const;

  double number(std::string_view key);
  double number_or(std::string_view key, double fallback);
  std::int64_t integer(std::string_view key);
  std::uint64_t unsigned_integer(std::string_view key);
  std::string word(std::string_view key);
  bool boolean_or(std::string_view key, bool fallback);

  /// Throws ParseError naming the first unconsumed key.
  void finish() const;

 private:
  const Entry* find(std::string_view key, bool block) const;
  std::string qualified(std::string_view key) const;

  std::string path_;
  const std::vector<Entry>* entries_;
  std::vector<bool> used_;
  int line_;
};

struct Document {
  std::vector<Entry> entries;
  Node root() const { return Node("", &entries, 1); }
};

/// Throws ParseError with line information on malformed input.
Document parse(std::string_view text);

double to_number(const Value& v, const std::string& field);
std::vector<double> to_numbers(const Value& v, const std::string& field);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

}  // namespace polyrep::kv
