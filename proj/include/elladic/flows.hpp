#pragma once

#include "elladic/forms.hpp"

namespace elladic {

// Self-map of the open polydisk, componentwise contracting.  The congruence
// order N is the largest k >= 1 with psi(x) - x = 0 mod mm^k (capped at the
// truncation order), computed once at construction.
class SeriesMap {
public:
    SeriesMap() = default;
    explicit SeriesMap(std::vector<TruncSeries> comps);
    static SeriesMap identity(RingPtr ring, int m, long n);

    int vars() const { return m_m; }
    const RingPtr& ring() const { return m_ring; }
    long order() const;
    const TruncSeries& comp(int j) const { return m_comp.at(j); }
    const std::vector<TruncSeries>& comps() const { return m_comp; }
    long congruence_order() const { return m_N; }

    // this after o, i.e. x -> this(o(x))
    SeriesMap compose(const SeriesMap& o) const;
    // f -> f(psi)
    TruncSeries apply(const TruncSeries& f) const;

    bool same_within(const SeriesMap& o) const;
    std::string str() const;

private:
    RingPtr m_ring;
    int m_m = 0;
    std::vector<TruncSeries> m_comp;
    long m_N = 1;
};

// Region on which interpolated iterates are certified: t with v_ell(t) >=
// time_exponent, x with |x| <= ell^{-radius_exponent}.
struct ConvergenceCertificate {
    Rat radius_exponent;  // a
    Rat time_exponent;    // tau
    long contact_order;   // the N the certificate was issued for
    long ell;
    int e;
    std::string basis;
};

// Certificate factory: tau = 0 when a(N-1) > 1/(ell-1); otherwise the
// quadratic-contact fallback tau = 1/(a(ell-1)).  CongruenceTooWeak for N < 2.
ConvergenceCertificate certify_interpolation(const RingSpec& R, long N, const Rat& a);

// Delta^k applied to the coordinate functions; components are certified to lie
// in mm^{k(N-1)+1}
std::vector<TruncSeries> delta_power(const SeriesMap& psi, long k);

// psi^t = x + sum_k C(t,k) Delta^k(x).  Integer t in range reproduces the
// literal composition power at certified precision.
SeriesMap interpolate_iterate(const SeriesMap& psi, const PadicScalar& t,
                              const ConvergenceCertificate& cert);

struct VectorFieldLog {
    VectorField field;
    Rat radius_exponent;  // a used for the attached norm bound
    Rat log_norm_bound;   // certified: -log_ell ||X|| >= this at that radius
};

// X_psi = sum (-1)^{k-1} Delta^k(x)/k with a Gauss-norm certificate at the
// given radius exponent; CongruenceTooWeak unless psi = id mod mm^2
VectorFieldLog vector_field_log(const SeriesMap& psi, const Rat& a);

// Taylor family of the flow of X: h_t = sum c_s t^s / s!, c_0 = x,
// c_{s+1} = X(c_s).  Stored up to the requested t-degree.
class FlowFamily {
public:
    FlowFamily(VectorField X, long degree);

    const VectorField& field() const { return m_X; }
    long degree() const { return (long)m_coeff.size() - 1; }
    // c_s as a tuple of series
    const std::vector<TruncSeries>& coeff(long s) const { return m_coeff.at(s); }
    // certified growth: c_s = 0 mod mm^{s*g + 1}
    long growth() const { return m_growth; }
    // v_ell(t) must exceed this for evaluation to be certified
    Rat time_valuation_floor() const;

    // sum c_s t^s / s! as a SeriesMap; OutsideRegion if t is not certified
    SeriesMap at_time(const PadicScalar& t) const;

private:
    VectorField m_X;
    std::vector<std::vector<TruncSeries>> m_coeff;
    long m_growth = 0;
};

// flow of X with the norm precondition ||X||_r <= r at r = ell^{-a};
// NormViolation otherwise
FlowFamily flow_from_field(const VectorField& X, const Rat& a, long degree);

// [X, Y]_i = X(Y_i) - Y(X_i)
VectorField field_bracket(const VectorField& X, const VectorField& Y);

// L_X omega = d(i_X omega) + i_X(d omega) for a 2-form; the d omega term uses
// the internal degree-3 machinery and vanishes identically for m <= 2
DiffForm lie_derivative(const VectorField& X, const DiffForm& omega);

// V with dV = i_X omega and V(0) = 0; NotClosed reports the residual, which
// signals a conformally non-trivial input
TruncSeries hamiltonian_potential(const VectorField& X, const DiffForm& omega);

struct CriticalReport {
    bool critical;              // every component certified zero at the point
    long certificate_exponent;  // |X_j(p)| <= pi^this for all j
};

// evaluation-based criticality test at a point of the open polydisk;
// Inconclusive when a component has no certified digits at the point
std::vector<CriticalReport> is_critical(const std::vector<VectorField>& fields,
                                        const std::vector<PadicScalar>& point);

} // namespace elladic
