#pragma once

#include "elladic/series.hpp"

namespace elladic {

// Exterior algebra on the polydisk with TruncSeries coefficients.  Degrees 0-2
// are the public surface; degree 3 exists only so closedness of 2-forms can be
// checked when m >= 3.  Components are stored densely per basis form, in
// lexicographic index order: dx_i (i), dx_i^dx_j (i<j), dx_i^dx_j^dx_k (i<j<k).
class DiffForm {
public:
    DiffForm() = default;
    // zero form of the given degree
    DiffForm(RingPtr ring, int m, long n, int degree);

    static DiffForm from_series(const TruncSeries& f); // degree 0
    static DiffForm one_form(std::vector<TruncSeries> comps);
    static DiffForm two_form(RingPtr ring, int m, long n);

    int degree() const { return m_degree; }
    int vars() const { return m_m; }
    const RingPtr& ring() const { return m_ring; }
    long order() const;
    bool is_zero() const;

    static long comp_count(int m, int degree);
    const TruncSeries& comp(size_t idx) const { return m_comp.at(idx); }
    const std::vector<TruncSeries>& comps() const { return m_comp; }

    // degree-0 payload
    const TruncSeries& series() const;
    // dx_j coefficient of a 1-form
    const TruncSeries& comp1(int j) const;
    // dx_i^dx_j coefficient, i < j required
    const TruncSeries& comp2(int i, int j) const;
    // signed dx_i^dx_j coefficient for arbitrary i != j
    TruncSeries ext2(int i, int j) const;

    void set_comp1(int j, const TruncSeries& f);
    void set_comp2(int i, int j, const TruncSeries& f);
    // unchecked positional write, for the internal degree-3 plumbing
    void set_comp_raw(long idx, const TruncSeries& f);

    DiffForm operator+(const DiffForm& o) const;
    DiffForm operator-(const DiffForm& o) const;
    DiffForm operator-() const;
    DiffForm scale(const PadicScalar& c) const;
    // multiply every component by a function
    DiffForm mul_series(const TruncSeries& f) const;

    bool same_within(const DiffForm& o) const;
    std::string str() const;

    static long pair_index(int m, int i, int j);
    static long triple_index(int m, int i, int j, int k);

private:
    void check_compat(const DiffForm& o) const;

    RingPtr m_ring;
    int m_m = 0;
    long m_n = 0;
    int m_degree = 0;
    std::vector<TruncSeries> m_comp;
};

// m-tuple of TruncSeries, the coefficients of sum X_i d/dx_i
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(std::vector<TruncSeries> comps);
    static VectorField zero(RingPtr ring, int m, long n);

    int vars() const { return m_m; }
    const RingPtr& ring() const { return m_ring; }
    long order() const;
    const TruncSeries& comp(int j) const { return m_comp.at(j); }
    const std::vector<TruncSeries>& comps() const { return m_comp; }

    VectorField operator+(const VectorField& o) const;
    VectorField operator-(const VectorField& o) const;
    VectorField scale(const PadicScalar& c) const;
    // derivation action X(f) = sum X_j df/dx_j
    TruncSeries apply(const TruncSeries& f) const;

    bool same_within(const VectorField& o) const;
    std::string str() const;

private:
    RingPtr m_ring;
    int m_m = 0;
    std::vector<TruncSeries> m_comp;
};

// d on functions and 1-forms; DegreeTooHigh beyond that
DiffForm exterior_d(const TruncSeries& f);
DiffForm exterior_d(const DiffForm& w);

namespace detail {
// d on 2-forms, used solely for closedness checks (vacuous for m <= 2)
DiffForm d_two_form(const DiffForm& w);
} // namespace detail

// f^{-1} df; NonUnit unless f is a unit
DiffForm dlog(const TruncSeries& f);

// alpha ^ beta for 1-forms
DiffForm wedge(const DiffForm& alpha, const DiffForm& beta);

// interior product i_X, one degree down (degrees 1-3 accepted)
DiffForm contract(const VectorField& X, const DiffForm& w);

// F with dF = mu and F(0) = 0 for mu closed at truncation; the reported order
// is the largest one at which dF = mu is certified.  NotClosed carries the
// offending pair and residual.
TruncSeries antiderivative(const DiffForm& mu);

// psi^* w for psi an m-tuple of contracting series (degrees 0-2)
DiffForm pullback(const std::vector<TruncSeries>& psi, const DiffForm& w);

} // namespace elladic
