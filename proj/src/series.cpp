#include "elladic/series.hpp"

#include <algorithm>
#include <sstream>

namespace elladic {

namespace {
constexpr long INF_EXP = (1L << 48);
}

TruncSeries::TruncSeries(RingPtr ring, int m, long n) : m_ring(std::move(ring)), m_m(m), m_n(n) {
    require(m >= 1, ErrorKind::Validation, "need at least one variable");
    require(n >= 0, ErrorKind::Validation, "truncation order must be >= 0");
}

TruncSeries TruncSeries::constant(RingPtr ring, int m, long n, const PadicScalar& c) {
    TruncSeries f(std::move(ring), m, n);
    f.set_term(ExpVec(m, 0), c);
    return f;
}

TruncSeries TruncSeries::constant_int(RingPtr ring, int m, long n, const Int& c) {
    PadicScalar s = PadicScalar::from_int(ring, c);
    return constant(std::move(ring), m, n, s);
}

TruncSeries TruncSeries::variable(RingPtr ring, int m, long n, int j) {
    require(j >= 0 && j < m, ErrorKind::Validation, "variable index out of range");
    ExpVec i(m, 0);
    i[j] = 1;
    PadicScalar one = PadicScalar::from_int(ring, 1);
    return monomial(std::move(ring), m, n, i, one);
}

TruncSeries TruncSeries::monomial(RingPtr ring, int m, long n, const ExpVec& i, const PadicScalar& c) {
    TruncSeries f(std::move(ring), m, n);
    f.set_term(i, c);
    return f;
}

PadicScalar TruncSeries::coeff(const ExpVec& i) const {
    auto it = m_terms.find(i);
    if (it != m_terms.end()) return it->second;
    // past the degree window the claim can be weaker than integral: the
    // unknown tail is only bounded in weight, so the certificate goes negative
    return PadicScalar::zero_at(m_ring, m_n - exp_total(i));
}

PadicScalar TruncSeries::constant_term() const { return coeff(ExpVec(m_m, 0)); }

void TruncSeries::set_term(const ExpVec& i, const PadicScalar& c) {
    require((int)i.size() == m_m, ErrorKind::VarMismatch, "exponent arity mismatch");
    for (int x : i) require(x >= 0, ErrorKind::Validation, "negative exponent");
    m_terms[i] = c;
    normalize();
}

void TruncSeries::normalize() {
    for (;;) {
        long eff = m_n;
        for (const auto& [i, c] : m_terms) {
            if (c.is_exact_zero()) continue;
            long w = c.abs_cert() + exp_total(i);
            eff = std::min(eff, w);
        }
        bool shrunk = eff < m_n;
        m_n = eff;
        bool dropped = false;
        for (auto it = m_terms.begin(); it != m_terms.end();) {
            long tot = exp_total(it->first);
            long resolution = m_n - tot;
            if (resolution <= 0) {
                // a certified nonzero coefficient of negative valuation can hold
                // content strictly below the current order; forgetting it caps the
                // order at the weight where that content starts
                if (!it->second.is_zero()) {
                    long w = std::max(*it->second.pi_valuation() + tot, 0L);
                    if (w < m_n) m_n = w;
                }
                it = m_terms.erase(it);
                dropped = true;
                continue;
            }
            PadicScalar c = it->second.truncate_abs(resolution);
            if (c.is_zero() && (c.is_exact_zero() || c.abs_cert() >= resolution)) {
                it = m_terms.erase(it);
                dropped = true;
                continue;
            }
            // a zero with a weak certificate stays: the eff pass above will
            // pull the order down to its certificate next time around
            it->second = c;
            ++it;
        }
        if (!shrunk && !dropped) break;
    }
}

void TruncSeries::check_compat(const TruncSeries& o) const {
    require(m_ring && o.m_ring && m_ring->same(*o.m_ring), ErrorKind::VarMismatch,
            "series rings differ");
    require(m_m == o.m_m, ErrorKind::VarMismatch, "series variable counts differ");
}

TruncSeries TruncSeries::operator+(const TruncSeries& o) const {
    check_compat(o);
    TruncSeries r(m_ring, m_m, std::min(m_n, o.m_n));
    r.m_terms = m_terms;
    for (const auto& [i, c] : o.m_terms) {
        auto it = r.m_terms.find(i);
        if (it == r.m_terms.end())
            r.m_terms.emplace(i, c);
        else
            it->second = it->second + c;
    }
    r.normalize();
    return r;
}

TruncSeries TruncSeries::operator-() const {
    TruncSeries r = *this;
    for (auto& [i, c] : r.m_terms) c = -c;
    r.normalize();
    return r;
}

TruncSeries TruncSeries::operator-(const TruncSeries& o) const { return *this + (-o); }

long TruncSeries::order_lower() const {
    long w = m_n;
    for (const auto& [i, c] : m_terms) {
        if (c.is_zero()) continue;
        w = std::min(w, *c.pi_valuation() + exp_total(i));
    }
    return w;
}

TruncSeries TruncSeries::operator*(const TruncSeries& o) const {
    check_compat(o);
    // the unknown tail of one factor meets the other factor's leading order,
    // which can be negative when coefficients are non-integral
    long orda = order_lower();
    long ordb = o.order_lower();
    long n = std::min(m_n + ordb, o.m_n + orda);
    long skipped = INF_EXP;
    TruncSeries r(m_ring, m_m, n);
    for (const auto& [i, c] : m_terms) {
        long wi = exp_total(i);
        long vc = c.is_zero() ? c.abs_cert() : *c.pi_valuation();
        for (const auto& [j, d] : o.m_terms) {
            long wj = exp_total(j);
            if (wi + wj >= n) {
                // a cross term past the degree cut can still carry weight
                // below n when the coefficient product has negative valuation
                long vd = d.is_zero() ? d.abs_cert() : *d.pi_valuation();
                skipped = std::min(skipped, vc + vd + wi + wj);
                continue;
            }
            ExpVec k(m_m);
            for (int t = 0; t < m_m; ++t) k[t] = i[t] + j[t];
            PadicScalar prod = c * d;
            auto it = r.m_terms.find(k);
            if (it == r.m_terms.end())
                r.m_terms.emplace(std::move(k), prod);
            else
                it->second = it->second + prod;
        }
    }
    if (skipped < r.m_n) r.m_n = std::max(skipped, 0L);
    r.normalize();
    return r;
}

TruncSeries TruncSeries::scale(const PadicScalar& c) const {
    if (c.is_exact_zero()) return TruncSeries(m_ring, m_m, m_n);
    TruncSeries r = *this;
    for (auto& [i, v] : r.m_terms) v = v * c;
    // scaling by pi^w shifts the certified window by w, in both directions
    long w = c.is_zero() ? c.abs_cert() : *c.pi_valuation();
    r.m_n = std::max(m_n + std::min(w, INF_EXP - m_n), 0L);
    r.normalize();
    return r;
}

TruncSeries TruncSeries::invert() const {
    PadicScalar c0 = constant_term();
    require(!c0.is_zero() && *c0.pi_valuation() == 0, ErrorKind::NonUnit,
            "inverting a series whose constant term is not a unit");
    TruncSeries h = *this - constant(m_ring, m_m, m_n, c0);
    require(h.order_lower() >= 1, ErrorKind::NonUnit,
            "inverting a series whose nonconstant part is not topologically nilpotent");
    // Newton: x -> x(2 - f x), doubling the contact order with f^{-1}
    TruncSeries two = constant_int(m_ring, m_m, m_n, 2);
    TruncSeries x = constant(m_ring, m_m, m_n, c0.inverse());
    long contact = 1;
    while (contact < m_n) {
        x = x * (two - (*this) * x);
        contact *= 2;
    }
    return x;
}

TruncSeries TruncSeries::substitute(const std::vector<TruncSeries>& comps) const {
    require((int)comps.size() == m_m, ErrorKind::VarMismatch,
            "substitution needs one series per variable");
    const TruncSeries& c0 = comps[0];
    require(m_ring && m_ring->same(*c0.ring()), ErrorKind::VarMismatch, "series rings differ");
    for (const auto& g : comps) {
        c0.check_compat(g);
        require(g.order_lower() >= 1, ErrorKind::NotContracting,
                "substituted component does not map mm into mm");
    }
    // component error delta enters as (d f) * delta: terms of weight w with
    // |i| >= 1 amplify it to weight >= w - 1 + ord(delta); constant terms add
    // no error at all.  Only non-integral f makes the fudge negative.
    long ncl = m_n;
    for (const auto& [i, c] : m_terms) {
        if (c.is_zero() || exp_total(i) == 0) continue;
        ncl = std::min(ncl, *c.pi_valuation() + exp_total(i));
    }
    long fudge = std::min(ncl - 1, 0L);
    long n = m_n;
    for (const auto& g : comps) n = std::min(n, g.order() + fudge);
    n = std::max(n, 0L);
    // graded evaluation: cache powers of each component
    TruncSeries acc(c0.ring(), c0.vars(), n);
    std::vector<std::vector<TruncSeries>> pows(m_m);
    for (int j = 0; j < m_m; ++j) pows[j].push_back(TruncSeries::constant_int(c0.ring(), c0.vars(), n, 1));
    auto power = [&](int j, int k) -> const TruncSeries& {
        while ((int)pows[j].size() <= k) {
            const TruncSeries& prev = pows[j].back();
            pows[j].push_back(prev * comps[j].restrict_order(n));
        }
        return pows[j][k];
    };
    for (const auto& [i, c] : m_terms) {
        TruncSeries term = TruncSeries::constant(c0.ring(), c0.vars(), n, c);
        for (int j = 0; j < m_m; ++j)
            if (i[j] > 0) term = term * power(j, i[j]);
        acc = acc + term;
    }
    return acc;
}

TruncSeries TruncSeries::derivative(int j) const {
    require(j >= 0 && j < m_m, ErrorKind::Validation, "variable index out of range");
    TruncSeries r(m_ring, m_m, std::max(m_n - 1, 0L));
    for (const auto& [i, c] : m_terms) {
        if (i[j] == 0) continue;
        ExpVec k = i;
        k[j] -= 1;
        PadicScalar nc = c * PadicScalar::from_int(m_ring, i[j]);
        auto it = r.m_terms.find(k);
        if (it == r.m_terms.end())
            r.m_terms.emplace(std::move(k), nc);
        else
            it->second = it->second + nc;
    }
    r.normalize();
    return r;
}

namespace {

// min over I >= n of I + 1 - e*floor(log_ell(I+1)): certified weight of the
// integrated truncation tail
long integrate_tail_order(const RingSpec& R, long n) {
    long best = INF_EXP;
    Int lt = 1; // ell^t, bounding indices with v_ell = t
    for (long t = 0; t <= 200; ++t) {
        Int imin = lt - 1 > n ? lt - 1 : Int(n);
        Int v = imin + 1 - Int(R.e()) * t;
        long vl = v > INF_EXP ? INF_EXP : (long)v;
        best = std::min(best, vl);
        if (lt - 1 >= n && (lt) * (R.ell() - 1) > R.e()) break;
        lt *= R.ell();
    }
    return best;
}

} // namespace

TruncSeries TruncSeries::integrate(int j) const {
    require(j >= 0 && j < m_m, ErrorKind::Validation, "variable index out of range");
    long tail = integrate_tail_order(*m_ring, m_n);
    TruncSeries r(m_ring, m_m, std::max(std::min(m_n + 1, tail), 0L));
    for (const auto& [i, c] : m_terms) {
        ExpVec k = i;
        k[j] += 1;
        PadicScalar nc = c / PadicScalar::from_int(m_ring, i[j] + 1);
        r.m_terms.emplace(std::move(k), nc);
    }
    r.normalize();
    return r;
}

PadicScalar TruncSeries::evaluate(const std::vector<PadicScalar>& pt) const {
    require((int)pt.size() == m_m, ErrorKind::VarMismatch, "point arity mismatch");
    for (const auto& x : pt) {
        require(x.ring()->same(*m_ring), ErrorKind::VarMismatch, "point ring mismatch");
        require(x.is_zero() || *x.pi_valuation() >= 1, ErrorKind::Validation,
                "evaluation point must lie in the open unit polydisk");
    }
    PadicScalar acc = PadicScalar::zero_at(m_ring, m_n);
    for (const auto& [i, c] : m_terms) {
        PadicScalar t = c;
        for (int v = 0; v < m_m; ++v)
            for (int rep = 0; rep < i[v]; ++rep) t = t * pt[v];
        acc = acc + t;
    }
    return acc;
}

TruncSeries TruncSeries::restrict_order(long n2) const {
    if (n2 >= m_n) return *this;
    TruncSeries r = *this;
    r.m_n = n2;
    r.normalize();
    return r;
}

bool TruncSeries::same_within(const TruncSeries& o) const {
    check_compat(o);
    TruncSeries d = *this - o;
    return d.is_zero();
}

std::string TruncSeries::str() const {
    std::ostringstream os;
    os << "O(mm^" << m_n << ")";
    if (m_terms.empty()) return "0 + " + os.str();
    std::ostringstream out;
    bool first = true;
    for (const auto& [i, c] : m_terms) {
        if (!first) out << " + ";
        first = false;
        out << "(" << c.str() << ")";
        for (int j = 0; j < m_m; ++j)
            if (i[j] > 0) {
                out << "*x" << (j + 1);
                if (i[j] > 1) out << "^" << i[j];
            }
    }
    out << " + " << os.str();
    return out.str();
}

GaussNorm gauss_norm(const TruncSeries& f, const Rat& a) {
    require(a > 0 && a <= Rat(1, f.ring()->e()), ErrorKind::Validation,
            "radius exponent must lie in (0, 1/e]");
    Rat tailfloor = a * f.order();
    Rat best = tailfloor;
    bool tail = true;
    for (const auto& [i, c] : f.terms()) {
        if (c.is_zero()) continue;
        Rat v = *c.valuation() + a * exp_total(i);
        if (v < best) {
            best = v;
            tail = false;
        }
    }
    return GaussNorm{best, a, tail};
}

} // namespace elladic
