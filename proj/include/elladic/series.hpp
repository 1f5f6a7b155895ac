#pragma once

#include <map>
#include <optional>
#include <vector>

#include "elladic/padic.hpp"

namespace elladic {

using ExpVec = std::vector<int>;

inline long exp_total(const ExpVec& i) {
    long t = 0;
    for (int x : i) t += x;
    return t;
}

// Truncated power series in m variables over O, reduced modulo
// mm^n with mm = (pi, x_1, ..., x_m).  A term pi^c x^i is kept iff c + |i| < n;
// the x^i coefficient is certified to pi-exponent n - |i|.  Coefficients may
// have negative valuation (the class is then an element of E tensor the
// truncated ring); the unknown tail is always integral.
//
// The truncation order n is per-object and shrinks under operations that lose
// resolution (differentiation, integration with carry loss).  Binary
// operations reconcile orders; comparisons are meaningful at the minimum.
class TruncSeries {
public:
    TruncSeries() = default;
    TruncSeries(RingPtr ring, int m, long n);

    static TruncSeries constant(RingPtr ring, int m, long n, const PadicScalar& c);
    static TruncSeries constant_int(RingPtr ring, int m, long n, const Int& c);
    static TruncSeries variable(RingPtr ring, int m, long n, int j);
    static TruncSeries monomial(RingPtr ring, int m, long n, const ExpVec& i, const PadicScalar& c);

    const RingPtr& ring() const { return m_ring; }
    int vars() const { return m_m; }
    long order() const { return m_n; }
    const std::map<ExpVec, PadicScalar>& terms() const { return m_terms; }

    bool is_zero() const { return m_terms.empty(); }
    PadicScalar coeff(const ExpVec& i) const;
    PadicScalar constant_term() const;

    void set_term(const ExpVec& i, const PadicScalar& c);

    TruncSeries operator+(const TruncSeries& o) const;
    TruncSeries operator-(const TruncSeries& o) const;
    TruncSeries operator-() const;
    TruncSeries operator*(const TruncSeries& o) const;
    TruncSeries scale(const PadicScalar& c) const;
    TruncSeries invert() const;

    // f(psi_1, ..., psi_m); every component must lie in mm of the target ring
    TruncSeries substitute(const std::vector<TruncSeries>& comps) const;

    TruncSeries derivative(int j) const;
    // antiderivative in x_j, zero constant term; order accounts for carry loss
    TruncSeries integrate(int j) const;

    // point evaluation inside the open unit polydisk (all v_pi >= 1)
    PadicScalar evaluate(const std::vector<PadicScalar>& pt) const;

    // lower bound for the mm-order of the function (min term weight, capped at n)
    long order_lower() const;

    TruncSeries restrict_order(long n2) const;

    // true when (*this - o) has no certified nonzero term at the shared order
    bool same_within(const TruncSeries& o) const;

    std::string str() const;

private:
    void normalize();
    void check_compat(const TruncSeries& o) const;

    RingPtr m_ring;
    int m_m = 0;
    long m_n = 0;
    std::map<ExpVec, PadicScalar> m_terms;
};

struct GaussNorm {
    Rat log_norm;        // -log_ell of the norm over the stored terms
    Rat radius_exponent; // a, with radius ell^{-a}
    bool tail_limited;   // true when the truncation tail attains the minimum
};

// sup-norm of f on the polydisk of radius ell^{-a}, 0 < a <= 1/e; reported as
// min(v_ell(coeff) + a |i|), floored by the truncation bound a*n.  The floor
// certifies the unknown tail only when that tail is integral; for series with
// negative-valuation coefficients the caller must attach its own tail bound.
GaussNorm gauss_norm(const TruncSeries& f, const Rat& a);

} // namespace elladic
