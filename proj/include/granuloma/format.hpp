/**
 * @file format.hpp
 * @brief Round-trippable number formatting and strict parsing.
 */
#pragma once

#include <string>

namespace granuloma {

/// 17 significant digits ("%.17g"); parses back to the identical double.
std::string fmt17(double x);

/// Whole-string parse; throws InvalidArgument naming `what` on failure.
double parse_double(const std::string& s, const std::string& what);
long long parse_int(const std::string& s, const std::string& what);

}  // namespace granuloma
