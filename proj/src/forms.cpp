#include "elladic/forms.hpp"

#include <algorithm>
#include <sstream>

namespace elladic {

long DiffForm::comp_count(int m, int degree) {
    switch (degree) {
        case 0: return 1;
        case 1: return m;
        case 2: return (long)m * (m - 1) / 2;
        case 3: return (long)m * (m - 1) * (m - 2) / 6;
        default: return -1;
    }
}

long DiffForm::pair_index(int m, int i, int j) {
    require(0 <= i && i < j && j < m, ErrorKind::Validation, "bad 2-form index pair");
    return (long)i * m - (long)i * (i + 1) / 2 + (j - i - 1);
}

long DiffForm::triple_index(int m, int i, int j, int k) {
    require(0 <= i && i < j && j < k && k < m, ErrorKind::Validation, "bad 3-form index triple");
    long idx = 0;
    for (int a = 0; a < i; ++a) idx += (long)(m - 1 - a) * (m - 2 - a) / 2;
    for (int b = i + 1; b < j; ++b) idx += m - 1 - b;
    return idx + (k - j - 1);
}

DiffForm::DiffForm(RingPtr ring, int m, long n, int degree)
    : m_ring(std::move(ring)), m_m(m), m_n(n), m_degree(degree) {
    require(degree >= 0 && degree <= 3, ErrorKind::DegreeTooHigh, "form degree out of range");
    long c = comp_count(m, degree);
    m_comp.assign((size_t)c, TruncSeries(m_ring, m, n));
}

DiffForm DiffForm::from_series(const TruncSeries& f) {
    DiffForm w(f.ring(), f.vars(), f.order(), 0);
    w.m_comp[0] = f;
    return w;
}

DiffForm DiffForm::one_form(std::vector<TruncSeries> comps) {
    require(!comps.empty(), ErrorKind::Validation, "1-form needs components");
    int m = comps[0].vars();
    require((int)comps.size() == m, ErrorKind::VarMismatch, "1-form needs one component per variable");
    long n = comps[0].order();
    for (const auto& f : comps) {
        require(f.ring()->same(*comps[0].ring()) && f.vars() == m, ErrorKind::VarMismatch,
                "1-form components live in different rings");
        n = std::min(n, f.order());
    }
    DiffForm w(comps[0].ring(), m, n, 1);
    w.m_comp = std::move(comps);
    return w;
}

DiffForm DiffForm::two_form(RingPtr ring, int m, long n) { return DiffForm(std::move(ring), m, n, 2); }

long DiffForm::order() const {
    if (m_comp.empty()) return m_n;
    long n = m_comp[0].order();
    for (const auto& f : m_comp) n = std::min(n, f.order());
    return n;
}

bool DiffForm::is_zero() const {
    for (const auto& f : m_comp)
        if (!f.is_zero()) return false;
    return true;
}

const TruncSeries& DiffForm::series() const {
    require(m_degree == 0, ErrorKind::Validation, "not a 0-form");
    return m_comp[0];
}

const TruncSeries& DiffForm::comp1(int j) const {
    require(m_degree == 1, ErrorKind::Validation, "not a 1-form");
    require(j >= 0 && j < m_m, ErrorKind::Validation, "component index out of range");
    return m_comp[j];
}

const TruncSeries& DiffForm::comp2(int i, int j) const {
    require(m_degree == 2, ErrorKind::Validation, "not a 2-form");
    return m_comp[pair_index(m_m, i, j)];
}

TruncSeries DiffForm::ext2(int i, int j) const {
    require(m_degree == 2, ErrorKind::Validation, "not a 2-form");
    if (i == j) return TruncSeries(m_ring, m_m, order());
    if (i < j) return m_comp[pair_index(m_m, i, j)];
    return -m_comp[pair_index(m_m, j, i)];
}

void DiffForm::set_comp1(int j, const TruncSeries& f) {
    require(m_degree == 1, ErrorKind::Validation, "not a 1-form");
    require(j >= 0 && j < m_m, ErrorKind::Validation, "component index out of range");
    require(f.ring()->same(*m_ring) && f.vars() == m_m, ErrorKind::VarMismatch, "component ring mismatch");
    m_comp[j] = f;
}

void DiffForm::set_comp2(int i, int j, const TruncSeries& f) {
    require(m_degree == 2, ErrorKind::Validation, "not a 2-form");
    require(f.ring()->same(*m_ring) && f.vars() == m_m, ErrorKind::VarMismatch, "component ring mismatch");
    m_comp[pair_index(m_m, i, j)] = f;
}

void DiffForm::set_comp_raw(long idx, const TruncSeries& f) {
    require(idx >= 0 && (size_t)idx < m_comp.size(), ErrorKind::Validation, "component index out of range");
    m_comp[(size_t)idx] = f;
}

void DiffForm::check_compat(const DiffForm& o) const {
    require(m_ring && o.m_ring && m_ring->same(*o.m_ring), ErrorKind::VarMismatch, "form rings differ");
    require(m_m == o.m_m, ErrorKind::VarMismatch, "form variable counts differ");
    require(m_degree == o.m_degree, ErrorKind::VarMismatch, "form degrees differ");
}

DiffForm DiffForm::operator+(const DiffForm& o) const {
    check_compat(o);
    DiffForm r = *this;
    r.m_n = std::min(m_n, o.m_n);
    for (size_t t = 0; t < m_comp.size(); ++t) r.m_comp[t] = m_comp[t] + o.m_comp[t];
    return r;
}

DiffForm DiffForm::operator-() const {
    DiffForm r = *this;
    for (auto& f : r.m_comp) f = -f;
    return r;
}

DiffForm DiffForm::operator-(const DiffForm& o) const { return *this + (-o); }

DiffForm DiffForm::scale(const PadicScalar& c) const {
    DiffForm r = *this;
    for (auto& f : r.m_comp) f = f.scale(c);
    return r;
}

DiffForm DiffForm::mul_series(const TruncSeries& f) const {
    DiffForm r = *this;
    for (auto& g : r.m_comp) g = g * f;
    return r;
}

bool DiffForm::same_within(const DiffForm& o) const {
    check_compat(o);
    for (size_t t = 0; t < m_comp.size(); ++t)
        if (!m_comp[t].same_within(o.m_comp[t])) return false;
    return true;
}

std::string DiffForm::str() const {
    if (m_degree == 0) return m_comp[0].str();
    std::ostringstream os;
    bool first = true;
    auto emit = [&](const TruncSeries& f, const std::string& basis) {
        if (f.is_zero()) return;
        if (!first) os << " + ";
        first = false;
        os << "(" << f.str() << ")" << basis;
    };
    if (m_degree == 1) {
        for (int j = 0; j < m_m; ++j) emit(m_comp[j], "dx" + std::to_string(j + 1));
    } else if (m_degree == 2) {
        for (int i = 0; i < m_m; ++i)
            for (int j = i + 1; j < m_m; ++j)
                emit(m_comp[pair_index(m_m, i, j)],
                     "dx" + std::to_string(i + 1) + "^dx" + std::to_string(j + 1));
    } else {
        for (int i = 0; i < m_m; ++i)
            for (int j = i + 1; j < m_m; ++j)
                for (int k = j + 1; k < m_m; ++k)
                    emit(m_comp[triple_index(m_m, i, j, k)], "dx" + std::to_string(i + 1) +
                                                                 "^dx" + std::to_string(j + 1) +
                                                                 "^dx" + std::to_string(k + 1));
    }
    if (first) os << "0";
    os << " + O(mm^" << order() << ")";
    return os.str();
}

VectorField::VectorField(std::vector<TruncSeries> comps) {
    require(!comps.empty(), ErrorKind::Validation, "vector field needs components");
    m_m = comps[0].vars();
    require((int)comps.size() == m_m, ErrorKind::VarMismatch,
            "vector field needs one component per variable");
    m_ring = comps[0].ring();
    for (const auto& f : comps)
        require(f.ring()->same(*m_ring) && f.vars() == m_m, ErrorKind::VarMismatch,
                "vector field components live in different rings");
    m_comp = std::move(comps);
}

VectorField VectorField::zero(RingPtr ring, int m, long n) {
    return VectorField(std::vector<TruncSeries>((size_t)m, TruncSeries(std::move(ring), m, n)));
}

long VectorField::order() const {
    long n = m_comp[0].order();
    for (const auto& f : m_comp) n = std::min(n, f.order());
    return n;
}

VectorField VectorField::operator+(const VectorField& o) const {
    require(m_m == o.m_m && m_ring->same(*o.m_ring), ErrorKind::VarMismatch, "field shapes differ");
    std::vector<TruncSeries> c;
    for (int j = 0; j < m_m; ++j) c.push_back(m_comp[j] + o.m_comp[j]);
    return VectorField(std::move(c));
}

VectorField VectorField::operator-(const VectorField& o) const {
    require(m_m == o.m_m && m_ring->same(*o.m_ring), ErrorKind::VarMismatch, "field shapes differ");
    std::vector<TruncSeries> c;
    for (int j = 0; j < m_m; ++j) c.push_back(m_comp[j] - o.m_comp[j]);
    return VectorField(std::move(c));
}

VectorField VectorField::scale(const PadicScalar& c) const {
    std::vector<TruncSeries> v;
    for (const auto& f : m_comp) v.push_back(f.scale(c));
    return VectorField(std::move(v));
}

TruncSeries VectorField::apply(const TruncSeries& f) const {
    require(f.vars() == m_m && f.ring()->same(*m_ring), ErrorKind::VarMismatch,
            "field acts on a series with different shape");
    TruncSeries acc = m_comp[0] * f.derivative(0);
    for (int j = 1; j < m_m; ++j) acc = acc + m_comp[j] * f.derivative(j);
    return acc;
}

bool VectorField::same_within(const VectorField& o) const {
    require(m_m == o.m_m && m_ring->same(*o.m_ring), ErrorKind::VarMismatch, "field shapes differ");
    for (int j = 0; j < m_m; ++j)
        if (!m_comp[j].same_within(o.m_comp[j])) return false;
    return true;
}

std::string VectorField::str() const {
    std::ostringstream os;
    bool first = true;
    for (int j = 0; j < m_m; ++j) {
        if (m_comp[j].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << m_comp[j].str() << ")d/dx" << (j + 1);
    }
    if (first) os << "0";
    return os.str();
}

DiffForm exterior_d(const TruncSeries& f) {
    std::vector<TruncSeries> comps;
    for (int j = 0; j < f.vars(); ++j) comps.push_back(f.derivative(j));
    return DiffForm::one_form(std::move(comps));
}

DiffForm exterior_d(const DiffForm& w) {
    if (w.degree() == 0) return exterior_d(w.series());
    require(w.degree() == 1, ErrorKind::DegreeTooHigh, "d is public on degrees 0 and 1 only");
    int m = w.vars();
    DiffForm r(w.ring(), m, w.order(), 2);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            r.set_comp2(i, j, w.comp1(j).derivative(i) - w.comp1(i).derivative(j));
    return r;
}

namespace detail {

DiffForm d_two_form(const DiffForm& w) {
    require(w.degree() == 2, ErrorKind::Validation, "expected a 2-form");
    int m = w.vars();
    DiffForm r(w.ring(), m, std::max(w.order() - 1, 0L), 3);
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = b + 1; c < m; ++c)
                r.set_comp_raw(DiffForm::triple_index(m, a, b, c),
                               w.comp2(b, c).derivative(a) - w.comp2(a, c).derivative(b) +
                                   w.comp2(a, b).derivative(c));
    return r;
}

} // namespace detail

DiffForm dlog(const TruncSeries& f) {
    TruncSeries g = f.invert();
    std::vector<TruncSeries> comps;
    for (int j = 0; j < f.vars(); ++j) comps.push_back(g * f.derivative(j));
    return DiffForm::one_form(std::move(comps));
}

DiffForm wedge(const DiffForm& alpha, const DiffForm& beta) {
    require(alpha.degree() == 1 && beta.degree() == 1, ErrorKind::Validation,
            "wedge takes two 1-forms");
    require(alpha.ring()->same(*beta.ring()) && alpha.vars() == beta.vars(), ErrorKind::VarMismatch,
            "wedge operands live in different rings");
    int m = alpha.vars();
    DiffForm r(alpha.ring(), m, std::min(alpha.order(), beta.order()), 2);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            r.set_comp2(i, j, alpha.comp1(i) * beta.comp1(j) - alpha.comp1(j) * beta.comp1(i));
    return r;
}

DiffForm contract(const VectorField& X, const DiffForm& w) {
    require(X.vars() == w.vars() && X.ring()->same(*w.ring()), ErrorKind::VarMismatch,
            "field and form shapes differ");
    int m = w.vars();
    if (w.degree() == 1) {
        TruncSeries acc = X.comp(0) * w.comp1(0);
        for (int j = 1; j < m; ++j) acc = acc + X.comp(j) * w.comp1(j);
        return DiffForm::from_series(acc);
    }
    if (w.degree() == 2) {
        std::vector<TruncSeries> comps;
        for (int j = 0; j < m; ++j) {
            TruncSeries acc(w.ring(), m, w.order());
            for (int i = 0; i < m; ++i) {
                if (i == j) continue;
                acc = acc + X.comp(i) * w.ext2(i, j);
            }
            comps.push_back(acc);
        }
        return DiffForm::one_form(std::move(comps));
    }
    if (w.degree() == 3) {
        DiffForm r(w.ring(), m, w.order(), 2);
        for (int j = 0; j < m; ++j)
            for (int k = j + 1; k < m; ++k) {
                TruncSeries acc(w.ring(), m, w.order());
                for (int i = 0; i < m; ++i) {
                    if (i == j || i == k) continue;
                    // signed coefficient h_{ijk} from the sorted storage
                    int a = i, b = j, c = k;
                    int sign = 1;
                    if (a > b) { std::swap(a, b); sign = -sign; }
                    if (b > c) { std::swap(b, c); sign = -sign; }
                    if (a > b) { std::swap(a, b); sign = -sign; }
                    TruncSeries h = w.comp(DiffForm::triple_index(m, a, b, c));
                    acc = acc + (sign > 0 ? X.comp(i) * h : -(X.comp(i) * h));
                }
                r.set_comp2(j, k, acc);
            }
        return r;
    }
    fail(ErrorKind::Validation, "contraction needs a form of degree 1, 2, or 3");
}

namespace {

// certified weight of the radial-scaling tail: dropped integral terms of
// weight >= n are divided by their total degree k <= weight
long radial_tail_order(const RingSpec& R, long n) {
    long best = n;
    Int lt = 1;
    for (long t = 0; t <= 200; ++t) {
        Int wmin = lt > n ? lt : Int(n);
        Int v = wmin - Int(R.e()) * t;
        if (v < best) best = (long)v;
        if (lt >= n && lt * (R.ell() - 1) > R.e()) break;
        lt *= R.ell();
    }
    return std::max(best, 0L);
}

} // namespace

TruncSeries antiderivative(const DiffForm& mu) {
    require(mu.degree() == 1, ErrorKind::Validation, "antiderivative takes a 1-form");
    int m = mu.vars();
    const RingPtr& R = mu.ring();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            TruncSeries r = mu.comp1(j).derivative(i) - mu.comp1(i).derivative(j);
            if (!r.is_zero())
                fail(ErrorKind::NotClosed, "1-form is not closed: d-coefficient at (" +
                                               std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                               ") is " + r.str());
        }
    // radial homotopy: each monomial of sum x_j mu_j is divided by its degree
    TruncSeries h(R, m, mu.order() + 1);
    for (int j = 0; j < m; ++j) h = h + TruncSeries::variable(R, m, mu.comp1(j).order() + 1, j) * mu.comp1(j);
    long n = std::min(h.order(), radial_tail_order(*R, h.order()));
    TruncSeries F(R, m, n);
    for (const auto& [i, c] : h.terms()) {
        long k = exp_total(i);
        if (k == 0) continue;
        F.set_term(i, c / PadicScalar::from_int(R, k));
    }
    // self-check: cap the order so that dF = mu is certified at order - 1
    long cap = F.order();
    for (int j = 0; j < m; ++j) {
        TruncSeries delta = F.derivative(j) - mu.comp1(j);
        for (const auto& [i, c] : delta.terms()) {
            if (c.is_zero()) continue;
            cap = std::min(cap, *c.pi_valuation() + exp_total(i));
        }
    }
    return F.restrict_order(cap);
}

DiffForm pullback(const std::vector<TruncSeries>& psi, const DiffForm& w) {
    require((int)psi.size() == w.vars(), ErrorKind::VarMismatch,
            "pullback needs one component per form variable");
    require(w.degree() <= 2, ErrorKind::DegreeTooHigh, "pullback is public on degrees 0-2");
    if (w.degree() == 0) return DiffForm::from_series(w.series().substitute(psi));
    int m = w.vars();
    int mm = psi[0].vars();
    std::vector<std::vector<TruncSeries>> dpsi(m); // dpsi[k][i] = d psi_k / dx_i
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < mm; ++i) dpsi[k].push_back(psi[k].derivative(i));
    if (w.degree() == 1) {
        std::vector<TruncSeries> comps;
        std::vector<TruncSeries> pulled;
        for (int k = 0; k < m; ++k) pulled.push_back(w.comp1(k).substitute(psi));
        for (int i = 0; i < mm; ++i) {
            TruncSeries acc = pulled[0] * dpsi[0][i];
            for (int k = 1; k < m; ++k) acc = acc + pulled[k] * dpsi[k][i];
            comps.push_back(acc);
        }
        return DiffForm::one_form(std::move(comps));
    }
    DiffForm r(psi[0].ring(), mm, w.order(), 2);
    for (int i = 0; i < mm; ++i)
        for (int j = i + 1; j < mm; ++j) {
            TruncSeries acc(psi[0].ring(), mm, w.order());
            for (int k = 0; k < m; ++k)
                for (int l = k + 1; l < m; ++l) {
                    TruncSeries g = w.comp2(k, l).substitute(psi);
                    acc = acc + g * (dpsi[k][i] * dpsi[l][j] - dpsi[k][j] * dpsi[l][i]);
                }
            r.set_comp2(i, j, acc);
        }
    return r;
}

} // namespace elladic
