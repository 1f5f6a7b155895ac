#pragma once

#include <optional>
#include <vector>

#include "elladic/chains.hpp"
#include "elladic/padic.hpp"
#include "elladic/series.hpp"

namespace elladic {

// (s+1)-tuple of d x d matrices over Z/ell^P, the e = 1 chart of O/l^P.
// Depth is the largest b <= P with every g_i - 1 congruent to 0 mod ell^b;
// it is measured from the entries, never asserted by the caller.  Entries
// are identified with their canonical integer lifts throughout, so every
// derived quantity is exact for those lifts.
class MatrixTuple {
public:
    MatrixTuple(RingPtr ring, std::vector<ModMatrix> mats);

    const RingPtr& ring() const { return m_ring; }
    int dim() const { return m_d; }
    int s() const { return (int)m_mats.size() - 1; }
    const ModMatrix& mat(int i) const { return m_mats.at((size_t)i); }
    const std::vector<ModMatrix>& mats() const { return m_mats; }

    // min over i of v_ell(g_i - 1), capped at the modulus exponent P
    long depth() const { return m_depth; }
    bool in_k1() const { return m_depth >= 1; }

private:
    RingPtr m_ring;
    int m_d = 0;
    long m_depth = 0;
    std::vector<ModMatrix> m_mats;
};

// Value of a truncated regulator sum.  The tail beyond the cutoff plus the
// working-modulus rounding is bounded by ell^{-certified_exp}; the scalar is
// already truncated to that certificate (and to the ring precision).
// certified_exp is absent only when the expansion vanishes identically
// (identity tuple), where the value is exactly zero.
struct RegulatorValue {
    PadicScalar value;
    std::optional<Rat> certified_exp;
    long cutoff = 0;
};

// Coefficients of T(X) = (nu^-1 d nu)^s in simplex coordinates with z_s and
// dz_s eliminated; only the volume form dz_0...dz_{s-1} survives, so a single
// matrix sits at each monomial z^beta in z_0..z_{s-1}.  Exponent tuples are
// listed in graded lexicographic order; entries are residues mod ell^W for
// the canonical lifts, with W the working exponent chosen by the engine.
struct TExpansion {
    int d = 0;
    int svars = 0;
    long cutoff = 0;
    long depth = 0;
    Int modulus;
    std::vector<std::vector<int>> expo;
    std::vector<ModMatrix> coeff;
};

// Additive coordinates: x[i] = g_i - 1, every entry in ell*Mat (depth >= 1).
TExpansion t_expansion(const RingPtr& ring, const std::vector<ModMatrix>& x, int s, long cutoff);

RegulatorValue phi_s(const RingPtr& ring, const std::vector<ModMatrix>& x, int s, long cutoff);

// Phi on a K_1 tuple: phi_s of the shifted tuple (g_0 - 1, ..., g_s - 1).
RegulatorValue phi_tilde(const MatrixTuple& g, int s, long cutoff);

// Transfer to GL_d: average of phi_tilde over Teichmueller-lifted residue
// translates.  The ell-part of |GL_d(F_ell)| is divided out exactly.
RegulatorValue psi_transfer(const MatrixTuple& g, int s, long cutoff);

// Linear extension of Psi_3 to degree-3 matrix chains; the bar tuple
// [g1|g2|g3] is evaluated as Psi_3(1, g1, g1 g2, g1 g2 g3).  Tuples lying in
// K_1 use phi_tilde directly (the transfer restricts to it exactly).
RegulatorValue evaluate_chain(const RingPtr& ring, const MatChain& c, long cutoff);

// Certified tail exponent (ell-units) of the Phi_s sum truncated at the
// cutoff for tuples of the given depth (pi-units).  Uses the exact digit-sum
// form of the factorial estimate, so it is much sharper than the coarse
// digit-count bound for small cutoffs.
Rat regulator_tail_exponent(long ell, long e, long depth, int s, long cutoff);

// Smallest cutoff whose tail exponent reaches target_exp.
long min_cutoff_for_error(long ell, long e, long depth, int s, const Rat& target_exp);

// Matrices with truncated-series entries, holding the group tuple g_i; depth
// is the minimal mm-adic order over the entries of g_i - 1.  Only the
// Phi-side operations exist here: the transfer and chain evaluation are
// residue-level constructions.
class SeriesMatrixTuple {
public:
    // mats[i] is d*d row-major; all entries share ring, variable count, order
    explicit SeriesMatrixTuple(std::vector<std::vector<TruncSeries>> mats);

    const RingPtr& ring() const { return m_ring; }
    int dim() const { return m_d; }
    int s() const { return (int)m_mats.size() - 1; }
    int vars() const { return m_vars; }
    long order() const { return m_order; }
    long depth() const { return m_depth; }
    const std::vector<TruncSeries>& mat(int i) const { return m_mats.at((size_t)i); }

private:
    RingPtr m_ring;
    int m_d = 0;
    int m_vars = 0;
    long m_order = 0;
    long m_depth = 0;
    std::vector<std::vector<TruncSeries>> m_mats;
};

struct RegulatorSeriesValue {
    TruncSeries value;
    std::optional<Rat> certified_exp;
    long cutoff = 0;
};

// x[i] = g_i - 1 with entries of mm-order >= 1; d*d row-major each
RegulatorSeriesValue phi_s(const RingPtr& ring, const std::vector<std::vector<TruncSeries>>& x,
                           int s, long cutoff);
RegulatorSeriesValue phi_tilde(const SeriesMatrixTuple& g, int s, long cutoff);

}  // namespace elladic
