#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "digits/core/error.hpp"

namespace digits::sketch {

/// Syntax or semantic error in sketch or postcondition text, with a 1-based
/// source position.
class SketchError : public ConfigError {
 public:
  SketchError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct Token {
  enum class Kind { identifier, number, punct, end };
  Kind kind = Kind::end;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;

  bool is(std::string_view punct) const { return kind == Kind::punct && text == punct; }
  bool is_word(std::string_view word) const { return kind == Kind::identifier && text == word; }
};

/// C-style tokens: identifiers, decimal numbers, `//` and `/* */` comments,
/// and the punctuators ?? ( ) { } [ ] , ; = == != < <= > >= && || ! + - * /
/// ++ +=. The result always ends with an `end` token.
std::vector<Token> tokenize(std::string_view source);

}  // namespace digits::sketch
