#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nullrepair {

/// Half-open byte range [begin, end) into a source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  bool contains(std::size_t offset) const { return offset >= begin && offset < end; }
  bool containsSpan(const Span& other) const {
    return other.begin >= begin && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return begin < other.end && other.begin < end;
  }
  friend bool operator==(const Span& a, const Span& b) {
    return a.begin == b.begin && a.end == b.end;
  }
  friend bool operator<(const Span& a, const Span& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end < b.end;
  }
};

struct LineCol {
  int line = 1;  // 1-based
  int col = 1;   // 1-based, in bytes
};

inline LineCol lineColAt(std::string_view text, std::size_t offset) {
  LineCol lc;
  if (offset > text.size()) offset = text.size();
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++lc.line;
      lc.col = 1;
    } else {
      ++lc.col;
    }
  }
  return lc;
}

// ---------------------------------------------------------------------------
// Error types

class ToolError : public std::runtime_error {
 public:
  explicit ToolError(const std::string& msg) : std::runtime_error(msg) {}
};

class SyntaxError : public ToolError {
 public:
  SyntaxError(const std::string& msg, int line, int col)
      : ToolError(msg + " at line " + std::to_string(line) + ", col " + std::to_string(col)),
        line(line),
        col(col) {}
  int line;
  int col;
};

#define NULLREPAIR_DEFINE_ERROR(Name)                  \
  class Name : public ToolError {                      \
   public:                                             \
    using ToolError::ToolError;                        \
  }

NULLREPAIR_DEFINE_ERROR(DuplicateDeclaration);
NULLREPAIR_DEFINE_ERROR(NotInRegion);
NULLREPAIR_DEFINE_ERROR(InvalidTarget);
NULLREPAIR_DEFINE_ERROR(StaleErrors);
NULLREPAIR_DEFINE_ERROR(NoProjectSymbol);
NULLREPAIR_DEFINE_ERROR(StaleSite);
NULLREPAIR_DEFINE_ERROR(StaleSpan);
NULLREPAIR_DEFINE_ERROR(PostEditSyntaxError);
NULLREPAIR_DEFINE_ERROR(BudgetExhausted);
NULLREPAIR_DEFINE_ERROR(RetriesExhausted);
NULLREPAIR_DEFINE_ERROR(SchemaError);
NULLREPAIR_DEFINE_ERROR(TransportError);
NULLREPAIR_DEFINE_ERROR(NoFixtureMatch);
NULLREPAIR_DEFINE_ERROR(ConfigError);

#undef NULLREPAIR_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, used for stable ids and workspace fingerprints)

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string toHex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Small string helpers

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Collapses every run of whitespace to a single space and trims the ends.
inline std::string collapseWhitespace(std::string_view s) {
  std::string out;
  bool inWs = true;  // drop leading whitespace
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      inWs = true;
    } else {
      if (inWs && !out.empty()) out.push_back(' ');
      inWs = false;
      out.push_back(c);
    }
  }
  return out;
}

inline std::vector<std::string> splitLines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      lines.emplace_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) lines.emplace_back(text.substr(start));
  return lines;
}

inline std::string joinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size()) out.push_back('\n');
  }
  return out;
}

inline bool endsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::string replaceAll(std::string text, std::string_view from, std::string_view to) {
  if (from.empty()) return text;
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

}  // namespace nullrepair
