#include "elladic/flows.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace elladic {

namespace {

long rat_floor(const Rat& r) {
    Int num = rat_num(r), den = rat_den(r);
    Int q = num / den;
    if (num < 0 && num % den != 0) q -= 1;
    return q.convert_to<long>();
}

long rat_ceil(const Rat& r) {
    Int num = rat_num(r), den = rat_den(r);
    Int q = num / den;
    if (num > 0 && num % den != 0) q += 1;
    return q.convert_to<long>();
}

std::vector<TruncSeries> coordinate_tuple(const RingPtr& R, int m, long n) {
    std::vector<TruncSeries> xs;
    xs.reserve((size_t)m);
    for (int j = 0; j < m; ++j) xs.push_back(TruncSeries::variable(R, m, n, j));
    return xs;
}

// Delta(h) = h(psi) - h, componentwise
void delta_step(std::vector<TruncSeries>& D, const SeriesMap& psi) {
    for (auto& h : D) h = h.substitute(psi.comps()) - h;
}

// certified valuation floor in v_ell units: exact for nonzero, the zero-at
// certificate otherwise
Rat scalar_valuation_floor(const PadicScalar& t) {
    if (!t.is_zero()) return *t.valuation();
    return Rat(t.abs_cert(), t.ring()->e());
}

void check_radius(const RingSpec& R, const Rat& a) {
    require(a > 0 && a <= Rat(1, R.e()), ErrorKind::Validation,
            "radius exponent must lie in (0, 1/e]");
}

} // namespace

SeriesMap::SeriesMap(std::vector<TruncSeries> comps) : m_comp(std::move(comps)) {
    require(!m_comp.empty(), ErrorKind::Validation, "map needs at least one component");
    m_ring = m_comp[0].ring();
    m_m = (int)m_comp.size();
    long N = 0;
    bool first = true;
    for (const auto& f : m_comp) {
        require((bool)f.ring() && f.ring()->same(*m_ring), ErrorKind::VarMismatch,
                "map components live over different rings");
        require(f.vars() == m_m, ErrorKind::VarMismatch,
                "component count does not match variable count");
        require(f.order_lower() >= 1, ErrorKind::NotContracting,
                "map component does not send the open polydisk into itself");
    }
    for (int j = 0; j < m_m; ++j) {
        TruncSeries d = m_comp[(size_t)j] - TruncSeries::variable(m_ring, m_m, m_comp[(size_t)j].order(), j);
        long w = d.order_lower();
        if (first || w < N) N = w;
        first = false;
    }
    m_N = std::max(N, 1L);
}

SeriesMap SeriesMap::identity(RingPtr ring, int m, long n) {
    return SeriesMap(coordinate_tuple(ring, m, n));
}

long SeriesMap::order() const {
    long n = m_comp[0].order();
    for (const auto& f : m_comp) n = std::min(n, f.order());
    return n;
}

SeriesMap SeriesMap::compose(const SeriesMap& o) const {
    require(m_m == o.m_m, ErrorKind::VarMismatch, "composition needs matching variable counts");
    std::vector<TruncSeries> out;
    out.reserve(m_comp.size());
    for (const auto& f : m_comp) out.push_back(f.substitute(o.m_comp));
    return SeriesMap(std::move(out));
}

TruncSeries SeriesMap::apply(const TruncSeries& f) const {
    return f.substitute(m_comp);
}

bool SeriesMap::same_within(const SeriesMap& o) const {
    if (m_m != o.m_m) return false;
    for (int j = 0; j < m_m; ++j)
        if (!m_comp[(size_t)j].same_within(o.m_comp[(size_t)j])) return false;
    return true;
}

std::string SeriesMap::str() const {
    std::ostringstream os;
    os << "[";
    for (int j = 0; j < m_m; ++j) {
        if (j) os << ", ";
        os << m_comp[(size_t)j].str();
    }
    os << "]";
    return os.str();
}

ConvergenceCertificate certify_interpolation(const RingSpec& R, long N, const Rat& a) {
    require(N >= 2, ErrorKind::CongruenceTooWeak,
            "interpolation needs agreement with the identity mod mm^2");
    check_radius(R, a);
    ConvergenceCertificate c;
    c.radius_exponent = a;
    c.contact_order = N;
    c.ell = R.ell();
    c.e = R.e();
    if (a * (N - 1) > Rat(1, R.ell() - 1)) {
        c.time_exponent = 0;
        c.basis = "contact order beats the factorial loss: unit time disk";
    } else {
        c.time_exponent = Rat(1) / (a * (R.ell() - 1));
        c.basis = "quadratic contact fallback: time disk shrunk by the radius exponent";
    }
    return c;
}

std::vector<TruncSeries> delta_power(const SeriesMap& psi, long k) {
    require(k >= 0, ErrorKind::Validation, "delta power needs k >= 0");
    std::vector<TruncSeries> D = coordinate_tuple(psi.ring(), psi.vars(), psi.order());
    for (long i = 0; i < k; ++i) delta_step(D, psi);
    long bound = k * (psi.congruence_order() - 1) + 1;
    for (const auto& h : D)
        require(h.order_lower() >= std::min(bound, h.order()), ErrorKind::Validation,
                "contact-order lower bound failed for an iterated difference");
    return D;
}

SeriesMap interpolate_iterate(const SeriesMap& psi, const PadicScalar& t,
                              const ConvergenceCertificate& cert) {
    const RingPtr& R = psi.ring();
    require((bool)t.ring() && t.ring()->same(*R), ErrorKind::VarMismatch,
            "time parameter lives over a different ring");
    require(cert.ell == R->ell() && cert.e == R->e(), ErrorKind::CertificateMismatch,
            "certificate was issued for a different ring");
    long N = psi.congruence_order();
    require(N >= cert.contact_order, ErrorKind::CertificateMismatch,
            "certificate requires a higher contact order than the map provides");

    long n = psi.order();
    if (t.is_exact_zero()) return SeriesMap::identity(R, psi.vars(), n);

    Rat vt = scalar_valuation_floor(t);
    require(vt >= cert.time_exponent, ErrorKind::OutsideRegion,
            "time parameter falls outside the certified disk");
    require(vt >= 0, ErrorKind::Validation, "time parameter must be integral");

    // Tail certificate.  The k-th term C(t,k) Delta^k(x) has weight at least
    // k(N-1) + 1 + e*v(C(t,k)); with tau = floor(v(t)) the binomial obeys
    // v(C(t,k)) >= (k-1) sigma - k/(ell-1), sigma = sum_{s<=tau} ell^{-s}.
    long ell = R->ell();
    int e = R->e();
    long tauf = std::min(rat_floor(vt), 64L);
    Rat sigma = 0;
    for (long s = 1; s <= tauf; ++s) sigma += Rat(1, pow_int(ell, s));
    Rat slope = Rat(N - 1) + Rat(e) * sigma - Rat(e, ell - 1);
    require(slope > 0, ErrorKind::OutsideRegion,
            "truncated model cannot certify the iteration tail at this contact order and ramification");
    long K = std::max(rat_ceil((Rat(n) - 1 + Rat(e) * sigma) / slope), 0L);
    require(K <= 200000, ErrorKind::BudgetExceeded, "interpolation needs too many difference terms");

    std::vector<TruncSeries> acc = coordinate_tuple(R, psi.vars(), n);
    std::vector<TruncSeries> D = acc;
    PadicScalar C = PadicScalar::from_int(R, 1);
    for (long k = 1; k <= K; ++k) {
        delta_step(D, psi);
        C = C * (t - PadicScalar::from_int(R, k - 1)) / PadicScalar::from_int(R, k);
        if (C.is_exact_zero()) break; // integer t < k: all later binomials vanish
        long pv = C.is_zero() ? C.abs_cert() : *C.pi_valuation();
        for (size_t j = 0; j < acc.size(); ++j) {
            TruncSeries term = D[j].scale(C);
            if (term.is_zero()) {
                // a truncation zero still obeys the contact lower bound
                long w = std::min(n, k * (N - 1) + 1 + pv);
                if (w > term.order()) term = TruncSeries(R, psi.vars(), w);
            }
            acc[j] = acc[j] + term;
        }
    }
    return SeriesMap(std::move(acc));
}

VectorFieldLog vector_field_log(const SeriesMap& psi, const Rat& a) {
    const RingPtr& R = psi.ring();
    long N = psi.congruence_order();
    require(N >= 2, ErrorKind::CongruenceTooWeak,
            "logarithm needs agreement with the identity mod mm^2");
    check_radius(*R, a);

    long n = psi.order();
    long ell = R->ell();
    int e = R->e();
    // beyond K every Delta^k/k term has weight >= k(N-1)+1 - e*v(k) >= n,
    // since v(k) <= log_ell(k) <= 40 on any reachable range
    long K = (n + 40L * e) / (N - 1) + 8;

    std::vector<TruncSeries> comps((size_t)psi.vars(), TruncSeries(R, psi.vars(), n));
    std::vector<TruncSeries> D = coordinate_tuple(R, psi.vars(), n);
    for (long k = 1; k <= K; ++k) {
        delta_step(D, psi);
        long w = k * (N - 1) + 1 - e * val_int(Int(k), ell);
        if (w >= n) continue; // certified below the working order
        PadicScalar c = PadicScalar::from_rat(R, Rat(k % 2 ? 1 : -1, k));
        for (size_t j = 0; j < comps.size(); ++j) comps[j] = comps[j] + D[j].scale(c);
    }

    VectorFieldLog out{VectorField(std::move(comps)), a,
                       Rat(1) + a - cap_N(ell, 1, a * (N - 1)).value};
    return out;
}

FlowFamily::FlowFamily(VectorField X, long degree) : m_X(std::move(X)) {
    require(degree >= 0, ErrorKind::Validation, "flow family needs degree >= 0");
    const RingPtr& R = m_X.ring();
    require((bool)R, ErrorKind::Validation, "flow family needs a nonempty field");
    int m = m_X.vars();
    long q = m_X.comp(0).order_lower();
    for (int j = 1; j < m; ++j) q = std::min(q, m_X.comp(j).order_lower());
    m_growth = q - 1;

    m_coeff.push_back(coordinate_tuple(R, m, m_X.order()));
    for (long s = 1; s <= degree; ++s) {
        std::vector<TruncSeries> next;
        next.reserve((size_t)m);
        for (int j = 0; j < m; ++j) next.push_back(m_X.apply(m_coeff.back()[(size_t)j]));
        m_coeff.push_back(std::move(next));
    }
}

Rat FlowFamily::time_valuation_floor() const {
    return Rat(1, m_X.ring()->ell() - 1) - Rat(m_growth, m_X.ring()->e());
}

SeriesMap FlowFamily::at_time(const PadicScalar& t) const {
    const RingPtr& R = m_X.ring();
    require((bool)t.ring() && t.ring()->same(*R), ErrorKind::VarMismatch,
            "time parameter lives over a different ring");
    long n = m_coeff[0][0].order();
    if (t.is_exact_zero()) return SeriesMap::identity(R, m_X.vars(), n);

    Rat vt = scalar_valuation_floor(t);
    require(vt >= 0, ErrorKind::Validation, "time parameter must be integral");
    // dropped terms c_s t^s / s! carry weight >= s(g + e v(t) - e/(ell-1)) + 1
    Rat slope = Rat(m_growth) + Rat(R->e()) * (vt - Rat(1, R->ell() - 1));
    require(slope > 0, ErrorKind::OutsideRegion,
            "time parameter falls outside the certified flow disk");
    long S = std::max(rat_ceil((Rat(n) - 1) / slope), 0L);
    if (S > degree()) {
        std::ostringstream os;
        os << "flow family stored to t-degree " << degree() << " but this time needs " << S;
        fail(ErrorKind::Validation, os.str());
    }

    std::vector<TruncSeries> acc = m_coeff[0];
    PadicScalar scal = PadicScalar::from_int(R, 1);
    for (long s = 1; s <= S; ++s) {
        scal = scal * t / PadicScalar::from_int(R, s);
        if (scal.is_exact_zero()) break;
        long pv = scal.is_zero() ? scal.abs_cert() : *scal.pi_valuation();
        for (size_t j = 0; j < acc.size(); ++j) {
            TruncSeries term = m_coeff[(size_t)s][j].scale(scal);
            if (term.is_zero()) {
                // a truncation zero still obeys the growth lower bound
                long w = std::min(n, s * m_growth + 1 + pv);
                if (w > term.order()) term = TruncSeries(R, m_X.vars(), w);
            }
            acc[j] = acc[j] + term;
        }
    }
    return SeriesMap(std::move(acc));
}

FlowFamily flow_from_field(const VectorField& X, const Rat& a, long degree) {
    const RingPtr& R = X.ring();
    require((bool)R, ErrorKind::Validation, "flow needs a nonempty field");
    check_radius(*R, a);
    for (int j = 0; j < X.vars(); ++j) {
        GaussNorm g = gauss_norm(X.comp(j), a);
        require(g.log_norm >= a, ErrorKind::NormViolation,
                "field norm exceeds the radius on the requested polydisk");
    }
    return FlowFamily(X, degree);
}

VectorField field_bracket(const VectorField& X, const VectorField& Y) {
    require(X.vars() == Y.vars(), ErrorKind::VarMismatch,
            "bracket needs matching variable counts");
    require((bool)X.ring() && X.ring()->same(*Y.ring()), ErrorKind::VarMismatch,
            "bracket needs matching rings");
    std::vector<TruncSeries> comps;
    comps.reserve((size_t)X.vars());
    for (int j = 0; j < X.vars(); ++j)
        comps.push_back(X.apply(Y.comp(j)) - Y.apply(X.comp(j)));
    return VectorField(std::move(comps));
}

DiffForm lie_derivative(const VectorField& X, const DiffForm& omega) {
    require(omega.degree() == 2, ErrorKind::Validation, "lie derivative expects a 2-form");
    DiffForm out = exterior_d(contract(X, omega));
    if (omega.vars() >= 3) out = out + contract(X, detail::d_two_form(omega));
    return out;
}

TruncSeries hamiltonian_potential(const VectorField& X, const DiffForm& omega) {
    require(omega.degree() == 2, ErrorKind::Validation, "potential expects a 2-form");
    return antiderivative(contract(X, omega));
}

std::vector<CriticalReport> is_critical(const std::vector<VectorField>& fields,
                                        const std::vector<PadicScalar>& point) {
    require(!fields.empty(), ErrorKind::Validation, "criticality test needs at least one field");
    std::vector<CriticalReport> out;
    out.reserve(fields.size());
    for (const auto& X : fields) {
        require(X.vars() == (int)point.size(), ErrorKind::VarMismatch,
                "point dimension does not match the field");
        bool inconclusive = false;
        bool nonzero = false;
        long cert = PadicScalar::zero(X.ring()).abs_cert();
        for (int j = 0; j < X.vars(); ++j) {
            PadicScalar v = X.comp(j).evaluate(point);
            if (!v.is_zero()) {
                out.push_back({false, *v.pi_valuation()});
                nonzero = true;
                break;
            }
            if (!v.is_exact_zero() && v.abs_cert() <= 0) inconclusive = true;
            cert = std::min(cert, v.abs_cert());
        }
        if (nonzero) continue;
        if (inconclusive)
            fail(ErrorKind::Inconclusive,
                 "a component vanishes to working precision but carries no certified digits at the point");
        out.push_back({true, cert});
    }
    return out;
}

} // namespace elladic
