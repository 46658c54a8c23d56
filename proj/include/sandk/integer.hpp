#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace sandk {

using BigInt = boost::multiprecision::cpp_int;

}  // namespace sandk
