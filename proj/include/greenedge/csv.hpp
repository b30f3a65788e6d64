#pragma once

#include <string>
#include <string_view>

namespace greenedge {

/// Shortest decimal form that round-trips to the same double, so CSV
/// artifacts are byte-stable and exactly re-parseable.
std::string format_double(double value);

/// Strict parse of a full token; throws NumericError on trailing garbage.
double parse_double(std::string_view token);

long long parse_int(std::string_view token);

}  // namespace greenedge
