#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "elladic/errors.hpp"

namespace elladic {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

Int pow_int(const Int& base, long exp);

// v_ell of a nonzero integer; aborts on 0.
long val_int(const Int& x, long ell);

// v_ell of a rational, numerator minus denominator; r must be nonzero.
long val_rat(const Rat& r, long ell);

// x mod m normalized into [0, m).
Int mod_norm(const Int& x, const Int& m);

// inverse of x mod m; x must be a unit mod m.
Int inv_mod(const Int& x, const Int& m);

Int parse_int(const std::string& s);

// "p/q" or "p"; q > 0 after normalization.
Rat parse_rat(const std::string& s);

std::string rat_str(const Rat& r);

} // namespace elladic
