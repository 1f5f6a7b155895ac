#include "elladic/bigint.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace elladic {

Int pow_int(const Int& base, long exp) {
    Int r = 1, b = base;
    long e = exp;
    require(e >= 0, ErrorKind::Validation, "negative exponent in pow_int");
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

long val_int(const Int& x, long ell) {
    require(x != 0, ErrorKind::Validation, "valuation of zero integer");
    Int y = boost::multiprecision::abs(x);
    long v = 0;
    while (y % ell == 0) {
        y /= ell;
        ++v;
    }
    return v;
}

long val_rat(const Rat& r, long ell) {
    require(r != 0, ErrorKind::Validation, "valuation of zero rational");
    return val_int(rat_num(r), ell) - val_int(rat_den(r), ell);
}

Int mod_norm(const Int& x, const Int& m) {
    Int r = x % m;
    if (r < 0) r += m;
    return r;
}

Int inv_mod(const Int& x, const Int& m) {
    // extended Euclid
    Int a = mod_norm(x, m), b = m;
    Int u0 = 1, u1 = 0;
    while (b != 0) {
        Int q = a / b;
        Int t = a - q * b;
        a = b;
        b = t;
        t = u0 - q * u1;
        u0 = u1;
        u1 = t;
    }
    require(a == 1, ErrorKind::NonUnit, "inv_mod of a non-unit");
    return mod_norm(u0, m);
}

Int parse_int(const std::string& s) {
    try {
        return Int(s);
    } catch (const std::exception&) {
        fail(ErrorKind::Validation, "bad integer literal '" + s + "'");
    }
}

Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        require(den != 0, ErrorKind::Validation, "zero denominator in '" + s + "'");
        return Rat(num, den);
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        fail(ErrorKind::Validation, "bad rational literal '" + s + "'");
    }
}

std::string rat_str(const Rat& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

} // namespace elladic
