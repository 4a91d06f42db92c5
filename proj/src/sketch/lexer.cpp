#include "digits/sketch/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace digits::sketch {

SketchError::SketchError(const std::string& message, int line, int column)
    : ConfigError(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

constexpr std::array<std::string_view, 11> kTwoCharPuncts = {"??", "==", "!=", "<=", ">=", "&&",
                                                              "||", "++", "+=", "-=", "--"};
constexpr std::string_view kOneCharPuncts = "(){}[],;=<>!+-*/";

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  int line = 1;
  int col = 1;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const int start_line = line, start_col = col;
      advance(2);
      while (i < src.size() && src.substr(i, 2) != "*/") advance(1);
      if (i >= src.size()) throw SketchError("unterminated comment", start_line, start_col);
      advance(2);
      continue;
    }

    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      tok.kind = Token::Kind::identifier;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      tokens.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tok.kind = Token::Kind::number;
      tok.text = std::string(src.substr(i, j - i));
      const auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
      if (res.ec != std::errc() || res.ptr != tok.text.data() + tok.text.size()) {
        throw SketchError("malformed number '" + tok.text + "'", line, col);
      }
      advance(j - i);
      tokens.push_back(std::move(tok));
      continue;
    }
    bool matched = false;
    for (auto p : kTwoCharPuncts) {
      if (src.substr(i, 2) == p) {
        tok.kind = Token::Kind::punct;
        tok.text = std::string(p);
        advance(2);
        matched = true;
        break;
      }
    }
    if (!matched && kOneCharPuncts.find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::punct;
      tok.text = std::string(1, c);
      advance(1);
      matched = true;
    }
    if (!matched) throw SketchError(std::string("unexpected character '") + c + "'", line, col);
    tokens.push_back(std::move(tok));
  }
  Token end;
  end.kind = Token::Kind::end;
  end.line = line;
  end.column = col;
  tokens.push_back(end);
  return tokens;
}

}  // namespace digits::sketch
