#include "greenedge/csv.hpp"

#include <charconv>
#include <system_error>

#include "greenedge/errors.hpp"

namespace greenedge {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
    throw NumericError("cannot parse number: " + std::string(token));
  }
  return value;
}

long long parse_int(std::string_view token) {
  long long value = 0;
  const auto result = std::from_chars(token.data(), token.data() + token.size(), value);
  if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
    throw NumericError("cannot parse integer: " + std::string(token));
  }
  return value;
}

}  // namespace greenedge
