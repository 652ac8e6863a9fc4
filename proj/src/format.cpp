#include "granuloma/format.hpp"

#include "granuloma/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

namespace granuloma {

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s, const std::string& what)
{
    if (s.empty()) throw InvalidArgument(what + ": empty value");
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw InvalidArgument(what + ": cannot parse '" + s + "' as a number");
    }
    return x;
}

long long parse_int(const std::string& s, const std::string& what)
{
    if (s.empty()) throw InvalidArgument(what + ": empty value");
    char* end = nullptr;
    errno = 0;
    const long long x = std::strtoll(s.c_str(), &end, 10);
    if (end != s.c_str() + s.size() || errno == ERANGE) {
        throw InvalidArgument(what + ": cannot parse '" + s + "' as an integer");
    }
    return x;
}

}  // namespace granuloma
