#include "phraseprobe/common.hpp"
#include "phraseprobe/parallel.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace phraseprobe {

namespace {
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

Tokens split_tokens(std::string_view line) {
  Tokens tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  return join_tokens(tokens, 0, tokens.size());
}

std::string format_score(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%g", value);
  return buffer;
}

std::string format_exact(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  (void)ec;
  return std::string(buffer, end);
}

std::string at_line(std::size_t line_number, std::string_view message) {
  if (line_number == 0) return std::string(message);
  return "line " + std::to_string(line_number) + ": " + std::string(message);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PHRASEPROBE_THREADS")) {
    unsigned value = 0;
    std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size() && value > 0) return value;
  }
  return 1;
}

}  // namespace phraseprobe
