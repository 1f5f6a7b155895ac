#pragma once

#include <optional>
#include <string>
#include <vector>

#include "elladic/ring_spec.hpp"

namespace elladic {

// Element of E = Frac(O) carried as pi^v * u with u a unit known to a certified
// number of pi-digits.  Three states:
//   - exact zero,
//   - zero at precision: only |x| <= |pi|^{abs} is certified,
//   - nonzero: v, unit digits, cert digits k with 1 <= k <= P.
class PadicScalar {
public:
    PadicScalar() = default;

    static PadicScalar zero(RingPtr ring);
    static PadicScalar zero_at(RingPtr ring, long abs_pi_exponent);
    static PadicScalar from_int(RingPtr ring, const Int& n);
    static PadicScalar from_rat(RingPtr ring, const Rat& r);
    // w = valuation in v_ell units (denominator must divide e), u = digit encoding
    static PadicScalar from_parts(RingPtr ring, const Rat& w, const Int& u, long cert_digits);
    static PadicScalar from_unit_poly(RingPtr ring, long piv, std::vector<Int> unit, long cert_digits);

    const RingPtr& ring() const { return m_ring; }
    bool is_zero() const { return m_zero; }
    bool is_exact_zero() const { return m_zero && m_exact; }

    // pi-valuation; nullopt for any zero
    std::optional<long> pi_valuation() const;
    // valuation in v_ell units
    std::optional<Rat> valuation() const;
    // first uncertified exponent, v_ell units; nullopt = exact
    std::optional<Rat> err() const;
    // first uncertified pi-exponent; LONG-capped for exact values
    long abs_cert() const;

    long cert_digits() const { return m_k; }
    const std::vector<Int>& unit_poly() const { return m_u; }
    Int unit_encoded() const;

    PadicScalar operator+(const PadicScalar& o) const;
    PadicScalar operator-(const PadicScalar& o) const;
    PadicScalar operator-() const;
    PadicScalar operator*(const PadicScalar& o) const;
    PadicScalar inverse() const;
    PadicScalar operator/(const PadicScalar& o) const;
    PadicScalar pow(long n) const;

    // multiply by pi^k (k may be negative)
    PadicScalar shift(long k) const;
    // forget digits at pi-exponent >= abs (weaken the certificate)
    PadicScalar truncate_abs(long abs) const;

    // true when |x - y| <= pi^{min(abs_cert)} holds for the certified digits
    bool same_within_cert(const PadicScalar& o) const;
    // certified |x - y| as a pi-exponent lower bound
    long difference_exponent(const PadicScalar& o) const;

    // residue mod pi (in F_ell)
    long residue() const;

    std::string str() const;
    static PadicScalar parse(RingPtr ring, const std::string& s);

private:
    void normalize();

    RingPtr m_ring;
    bool m_zero = true;
    bool m_exact = true;
    long m_v = 0; // nonzero: pi-valuation; zero-at: certified pi-exponent
    long m_k = 0;
    std::vector<Int> m_u;
};

struct DigitStats {
    long sum;   // s_ell(a)
    long count; // d_ell(a), with d_ell(0) = 0
};

DigitStats digit_stats(long ell, const Int& a);

// v_ell(a!) = sum_i floor(a/ell^i)
Int factorial_valuation(long ell, const Int& a);

// lower bound for v_ell(a_0! ... a_n! / (|a|+n)!), uniform over tuples with the
// same |a| and n: -v_ell(n!) - (n+1) d_ell(|a|+n)
Rat multinomial_valuation_lower_bound(long ell, long n, const Int& total_a);
Rat multinomial_valuation_bound(long ell, const std::vector<Int>& a);
Rat multinomial_valuation_exact(long ell, const std::vector<Int>& a);

// multinomial a_0!...a_n!/(|a|+n)! as an exact rational
Rat multinomial_weight(const std::vector<long>& a);

struct CapResult {
    Rat value;   // sup_{x>=1} (c d_ell(x) - f x)
    Int argmax;  // witness x
};

CapResult cap_N(long ell, const Rat& c, const Rat& f);

// Teichmueller lift of u mod ell as an element of Z_ell^x inside O
PadicScalar teichmuller(RingPtr ring, const Int& u);

// log on units: kills the Teichmueller part, i.e. log(x) = log<x> where
// x = omega(x)<x> and <x> = 1 mod m.  Requires v(x) = 0.
PadicScalar padic_log(const PadicScalar& x);

// root of a^d = u with a = target mod pi; gcd(d, ell) = 1
PadicScalar hensel_root(long d, const PadicScalar& u, const Int& target_residue);

} // namespace elladic
