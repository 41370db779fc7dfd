#pragma once

#include <gmpxx.h>

#include <string>

namespace hinf {

// "3/8", "-2", "0.125", "1e-3" are all accepted; decimals are read exactly.
mpq_class parse_rational(const std::string& s);
std::string to_string(const mpq_class& q);

// nearest fraction k/den
mpq_class round_to_grid(double x, long den);

} // namespace hinf
