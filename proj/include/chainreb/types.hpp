#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace chainreb {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using index_t = std::int64_t;

inline Int abs_int(const Int& x) { return x < 0 ? Int(-x) : x; }

} // namespace chainreb
