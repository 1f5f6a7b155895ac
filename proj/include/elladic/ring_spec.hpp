#pragma once

#include <memory>
#include <vector>

#include "elladic/bigint.hpp"

namespace elladic {

// Coefficient ring O: totally ramified extension of Z_ell of degree e,
// presented by an Eisenstein polynomial E(z) = z^e + a_{e-1} z^{e-1} + ... + a_0
// with ell | a_i and ell^2 does not divide a_0.  The uniformizer pi is the class
// of z; v_ell(pi) = 1/e; residue field F_ell.  Working precision is P pi-digits.
//
// Elements are handled as polynomials in pi of degree < e with integer
// coefficients; "canonical at K digits" means coefficient of pi^j is reduced
// mod ell^{ceil((K-j)/e)}.
class RingSpec {
public:
    RingSpec(long ell, int e, long P, std::vector<Int> eisenstein = {});

    long ell() const { return m_ell; }
    int e() const { return m_e; }
    long P() const { return m_P; }
    const std::vector<Int>& eisenstein() const { return m_eis; }

    // number of ell-digits carried by the pi^j coefficient at precision K
    long coeff_digits(long K, int j) const {
        if (K <= j) return 0;
        return (K - j + m_e - 1) / m_e;
    }

    // ell / pi as a pi-polynomial, canonical at precision q_precision()
    const std::vector<Int>& ell_over_pi() const { return m_q; }
    long q_precision() const { return m_qK; }

    bool same(const RingSpec& o) const {
        return m_ell == o.m_ell && m_e == o.m_e && m_P == o.m_P && m_eis == o.m_eis;
    }

private:
    long m_ell;
    int m_e;
    long m_P;
    std::vector<Int> m_eis; // a_0 .. a_{e-1}
    std::vector<Int> m_q;
    long m_qK;
};

using RingPtr = std::shared_ptr<const RingSpec>;

RingPtr make_ring(long ell, int e, long P, std::vector<Int> eisenstein = {});

namespace opoly {

// All functions below operate on pi-polynomials of length ring.e() and keep
// results canonical at K digits.

void canon(const RingSpec& R, std::vector<Int>& c, long K);
std::vector<Int> zero(const RingSpec& R);
std::vector<Int> from_int(const RingSpec& R, const Int& n, long K);
bool is_zero(const std::vector<Int>& c);
std::vector<Int> add(const RingSpec& R, const std::vector<Int>& a, const std::vector<Int>& b, long K);
std::vector<Int> sub(const RingSpec& R, const std::vector<Int>& a, const std::vector<Int>& b, long K);
std::vector<Int> mul(const RingSpec& R, const std::vector<Int>& a, const std::vector<Int>& b, long K);

// pi-valuation of a canonical-at-K polynomial; returns K if it vanishes there.
long val(const RingSpec& R, const std::vector<Int>& c, long K);

std::vector<Int> shift_up(const RingSpec& R, std::vector<Int> c, long k, long K);
std::vector<Int> shift_down(const RingSpec& R, std::vector<Int> c, long k, long K);

// inverse of a unit (val 0), canonical at K
std::vector<Int> invert(const RingSpec& R, const std::vector<Int>& c, long K);

// canonical pi-adic digit expansion, length K, digits in [0, ell)
std::vector<int> digits(const RingSpec& R, std::vector<Int> c, long K);
std::vector<Int> from_digits(const RingSpec& R, const std::vector<int>& d, long K);

// digits <-> integer whose base-ell expansion matches the pi-digit expansion
Int digits_encode(long ell, const std::vector<int>& d);
std::vector<int> digits_decode(long ell, Int u, long K);

} // namespace opoly

} // namespace elladic
