#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phraseprobe {

/// Base class for every error the toolkit reports. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (alignment token, mask value, table line).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a record or argument invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

using Tokens = std::vector<std::string>;

/// Splits on runs of ASCII whitespace. Never re-tokenizes beyond that.
Tokens split_tokens(std::string_view line);

/// Joins tokens[begin, end) with single spaces.
std::string join_tokens(std::span<const std::string> tokens, std::size_t begin, std::size_t end);
std::string join_tokens(std::span<const std::string> tokens);

/// printf-style "%g" (6 significant digits), the Moses score convention.
std::string format_score(double value);

/// Shortest representation that round-trips a double.
std::string format_exact(double value);

/// Prefixes a message with "line N: " when N > 0.
std::string at_line(std::size_t line_number, std::string_view message);

}  // namespace phraseprobe
