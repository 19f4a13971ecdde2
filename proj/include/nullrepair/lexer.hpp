#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "nullrepair/core.hpp"

namespace nullrepair {

struct Token {
  enum class Kind { Identifier, Keyword, Number, String, Char, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  Span span;
  int line = 1;
  int col = 1;

  bool is(std::string_view t) const { return text == t; }
};

inline const std::unordered_set<std::string>& javaKeywords() {
  static const std::unordered_set<std::string> kw = {
      "abstract", "assert",     "boolean",  "break",      "byte",   "case",
      "catch",    "char",       "class",    "const",      "continue", "default",
      "do",       "double",     "else",     "enum",       "extends", "final",
      "finally",  "float",      "for",      "goto",       "if",      "implements",
      "import",   "instanceof", "int",      "interface",  "long",    "native",
      "new",      "package",    "private",  "protected",  "public",  "return",
      "short",    "static",     "strictfp", "super",      "switch",  "synchronized",
      "this",     "throw",      "throws",   "transient",  "try",     "void",
      "volatile", "while",      "null",     "true",       "false"};
  return kw;
}

inline bool isPrimitiveOrVoidName(std::string_view name) {
  static const std::unordered_set<std::string> prims = {
      "void", "boolean", "byte", "short", "int", "long", "char", "float", "double"};
  return prims.count(std::string(name)) > 0;
}

/// Tokenizes the supported source subset. Comments and whitespace are trivia
/// and do not appear in the output.
class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    while (true) {
      skipTrivia();
      if (pos_ >= text_.size()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = Token::Kind::End;
    end.span = {pos_, pos_};
    auto lc = lineColAt(text_, pos_);
    end.line = lc.line;
    end.col = lc.col;
    out.push_back(end);
    return out;
  }

 private:
  void skipTrivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        std::size_t close = text_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) {
          auto lc = lineColAt(text_, pos_);
          throw SyntaxError("unterminated block comment", lc.line, lc.col);
        }
        pos_ = close + 2;
      } else {
        break;
      }
    }
  }

  Token next() {
    char c = text_[pos_];
    std::size_t start = pos_;
    auto lc = lineColAt(text_, start);
    Token tok;
    tok.line = lc.line;
    tok.col = lc.col;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
              text_[pos_] == '$')) {
        ++pos_;
      }
      tok.text = std::string(text_.substr(start, pos_ - start));
      tok.kind = javaKeywords().count(tok.text) ? Token::Kind::Keyword : Token::Kind::Identifier;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        // Do not swallow a '.' that is not followed by a digit (member access
        // on a literal is not in the subset, but `1.5` is).
        if (text_[pos_] == '.' &&
            !(pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
          break;
        }
        ++pos_;
      }
      tok.text = std::string(text_.substr(start, pos_ - start));
      tok.kind = Token::Kind::Number;
    } else if (c == '"') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        if (text_[pos_] == '\n') throw SyntaxError("unterminated string literal", tok.line, tok.col);
        ++pos_;
      }
      if (pos_ >= text_.size()) throw SyntaxError("unterminated string literal", tok.line, tok.col);
      ++pos_;  // closing quote
      tok.text = std::string(text_.substr(start, pos_ - start));
      tok.kind = Token::Kind::String;
    } else if (c == '\'') {
      ++pos_;
      while (pos_ < text_.size() && text_[pos_] != '\'') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        ++pos_;
      }
      if (pos_ >= text_.size()) throw SyntaxError("unterminated char literal", tok.line, tok.col);
      ++pos_;
      tok.text = std::string(text_.substr(start, pos_ - start));
      tok.kind = Token::Kind::Char;
    } else {
      static const std::array<std::string_view, 10> multi = {
          "==", "!=", "<=", ">=", "&&", "||", "->", "::", "++", "--"};
      tok.kind = Token::Kind::Punct;
      std::string_view rest = text_.substr(pos_);
      for (std::string_view m : multi) {
        if (rest.substr(0, m.size()) == m) {
          tok.text = std::string(m);
          pos_ += m.size();
          break;
        }
      }
      if (tok.text.empty()) {
        static const std::string single = "(){}[];,.?:=<>+-*/%!@&|~^";
        if (single.find(c) == std::string::npos) {
          throw SyntaxError(std::string("unexpected character '") + c + "'", tok.line, tok.col);
        }
        tok.text = std::string(1, c);
        ++pos_;
      }
    }
    tok.span = {start, pos_};
    return tok;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

/// Token texts only — the whitespace-normalized view used for round-trip and
/// "token-identical" comparisons.
inline std::vector<std::string> tokenTexts(std::string_view text) {
  Lexer lexer(text);
  std::vector<std::string> out;
  for (const Token& t : lexer.tokenize()) {
    if (t.kind != Token::Kind::End) out.push_back(t.text);
  }
  return out;
}

inline bool tokenIdentical(std::string_view a, std::string_view b) {
  return tokenTexts(a) == tokenTexts(b);
}

}  // namespace nullrepair
