#include "elladic/padic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace elladic {

namespace {

constexpr long INF_EXP = (1L << 48);

// exact lower bound for min_{j > k} (j*w - e*v_ell(j)), w >= 1
long series_tail_exponent(const RingSpec& R, long w, long k) {
    long j0 = k + 1;
    long best = INF_EXP;
    Int lm = 1; // ell^m
    for (long m = 0; m <= 200; ++m) {
        Int jmin = lm > j0 ? lm : Int(j0);
        Int v = jmin * w - Int(R.e()) * m;
        long vl = v > INF_EXP ? INF_EXP : (long)v;
        best = std::min(best, vl);
        // per-m value grows once ell^m w (ell-1) > e and ell^m has passed j0
        if (lm >= j0 && lm * w * (R.ell() - 1) > R.e()) break;
        lm *= R.ell();
    }
    return best;
}

} // namespace

PadicScalar PadicScalar::zero(RingPtr ring) {
    PadicScalar x;
    x.m_ring = std::move(ring);
    x.m_zero = true;
    x.m_exact = true;
    return x;
}

PadicScalar PadicScalar::zero_at(RingPtr ring, long abs_pi_exponent) {
    PadicScalar x;
    x.m_ring = std::move(ring);
    x.m_zero = true;
    x.m_exact = false;
    x.m_v = std::min(abs_pi_exponent, INF_EXP);
    return x;
}

PadicScalar PadicScalar::from_unit_poly(RingPtr ring, long piv, std::vector<Int> unit, long cert_digits) {
    PadicScalar x;
    x.m_ring = std::move(ring);
    x.m_zero = false;
    x.m_exact = false;
    x.m_v = piv;
    x.m_u = std::move(unit);
    x.m_k = cert_digits;
    x.normalize();
    return x;
}

PadicScalar PadicScalar::from_int(RingPtr ring, const Int& n) {
    if (n == 0) return zero(std::move(ring));
    const RingSpec& R = *ring;
    long vl = val_int(n, R.ell());
    long piv = (long)R.e() * vl;
    Int u = n / pow_int(Int(R.ell()), vl);
    std::vector<Int> up = opoly::from_int(R, u, R.P());
    return from_unit_poly(std::move(ring), piv, std::move(up), R.P());
}

PadicScalar PadicScalar::from_rat(RingPtr ring, const Rat& r) {
    if (r == 0) return zero(std::move(ring));
    PadicScalar num = from_int(ring, rat_num(r));
    PadicScalar den = from_int(ring, rat_den(r));
    return num * den.inverse();
}

PadicScalar PadicScalar::from_parts(RingPtr ring, const Rat& w, const Int& u, long cert_digits) {
    const RingSpec& R = *ring;
    Rat piv_rat = w * R.e();
    require(rat_den(piv_rat) == 1, ErrorKind::Validation,
            "valuation denominator must divide the ramification index");
    long piv = (long)rat_num(piv_rat);
    require(u != 0, ErrorKind::Validation, "unit part must be nonzero");
    long k = std::min(cert_digits, R.P());
    require(k >= 1, ErrorKind::Validation, "need at least one certified digit");
    std::vector<int> d = opoly::digits_decode(R.ell(), u, k);
    std::vector<Int> up = opoly::from_digits(R, d, k);
    return from_unit_poly(std::move(ring), piv, std::move(up), k);
}

void PadicScalar::normalize() {
    const RingSpec& R = *m_ring;
    if (m_zero) {
        m_u.clear();
        m_k = 0;
        if (m_exact) m_v = 0;
        return;
    }
    m_k = std::min(m_k, R.P());
    if (m_k <= 0) {
        long abs = m_v + std::max(m_k, 0L);
        *this = zero_at(m_ring, abs);
        return;
    }
    opoly::canon(R, m_u, m_k);
    long v = opoly::val(R, m_u, m_k);
    if (v >= m_k) {
        *this = zero_at(m_ring, m_v + m_k);
        return;
    }
    if (v > 0) {
        m_u = opoly::shift_down(R, m_u, v, m_k - v);
        m_v += v;
        m_k -= v;
    }
}

std::optional<long> PadicScalar::pi_valuation() const {
    if (m_zero) return std::nullopt;
    return m_v;
}

std::optional<Rat> PadicScalar::valuation() const {
    if (m_zero) return std::nullopt;
    return Rat(m_v, m_ring->e());
}

std::optional<Rat> PadicScalar::err() const {
    if (m_zero && m_exact) return std::nullopt;
    if (m_zero) return Rat(m_v, m_ring->e());
    return Rat(m_v + m_k, m_ring->e());
}

long PadicScalar::abs_cert() const {
    if (m_zero && m_exact) return INF_EXP;
    if (m_zero) return m_v;
    return m_v + m_k;
}

Int PadicScalar::unit_encoded() const {
    if (m_zero) return 0;
    return opoly::digits_encode(m_ring->ell(), opoly::digits(*m_ring, m_u, m_k));
}

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
    require(m_ring->same(*o.m_ring), ErrorKind::VarMismatch, "scalar rings differ");
    if (m_zero && m_exact) return o;
    if (o.m_zero && o.m_exact) return *this;
    long A = std::min(abs_cert(), o.abs_cert());
    if (m_zero && o.m_zero) return zero_at(m_ring, A);
    if (m_zero) return o.truncate_abs(A);
    if (o.m_zero) return truncate_abs(A);

    const RingSpec& R = *m_ring;
    long v0 = std::min(m_v, o.m_v);
    long K = A - v0;
    if (K <= 0) return zero_at(m_ring, A);
    std::vector<Int> a = opoly::shift_up(R, m_u, m_v - v0, K);
    std::vector<Int> b = opoly::shift_up(R, o.m_u, o.m_v - v0, K);
    std::vector<Int> s = opoly::add(R, a, b, K);
    PadicScalar r;
    r.m_ring = m_ring;
    r.m_zero = false;
    r.m_exact = false;
    r.m_v = v0;
    r.m_u = std::move(s);
    r.m_k = K;
    r.normalize();
    return r;
}

PadicScalar PadicScalar::operator-() const {
    if (m_zero) return *this;
    PadicScalar r = *this;
    for (auto& c : r.m_u) c = -c;
    r.normalize();
    return r;
}

PadicScalar PadicScalar::operator-(const PadicScalar& o) const { return *this + (-o); }

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
    require(m_ring->same(*o.m_ring), ErrorKind::VarMismatch, "scalar rings differ");
    if ((m_zero && m_exact) || (o.m_zero && o.m_exact)) return zero(m_ring);
    if (m_zero && o.m_zero) return zero_at(m_ring, m_v + o.m_v);
    if (m_zero) return zero_at(m_ring, m_v + o.m_v);
    if (o.m_zero) return zero_at(m_ring, m_v + o.m_v);
    const RingSpec& R = *m_ring;
    long K = std::min(m_k, o.m_k);
    PadicScalar r;
    r.m_ring = m_ring;
    r.m_zero = false;
    r.m_exact = false;
    r.m_v = m_v + o.m_v;
    r.m_u = opoly::mul(R, m_u, o.m_u, K);
    r.m_k = K;
    r.normalize();
    return r;
}

PadicScalar PadicScalar::inverse() const {
    require(!(m_zero && m_exact), ErrorKind::NonUnit, "inverse of zero");
    require(!m_zero, ErrorKind::PrecisionExhausted,
            "inverse of a value with no certified digits");
    PadicScalar r;
    r.m_ring = m_ring;
    r.m_zero = false;
    r.m_exact = false;
    r.m_v = -m_v;
    r.m_u = opoly::invert(*m_ring, m_u, m_k);
    r.m_k = m_k;
    r.normalize();
    return r;
}

PadicScalar PadicScalar::operator/(const PadicScalar& o) const { return *this * o.inverse(); }

PadicScalar PadicScalar::pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    PadicScalar r = from_int(m_ring, 1);
    PadicScalar b = *this;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

PadicScalar PadicScalar::shift(long k) const {
    if (m_zero && m_exact) return *this;
    PadicScalar r = *this;
    r.m_v += k;
    return r;
}

PadicScalar PadicScalar::truncate_abs(long abs) const {
    if (abs >= abs_cert()) return *this;
    if (m_zero || abs <= m_v) return zero_at(m_ring, std::min(abs, abs_cert()));
    PadicScalar r = *this;
    r.m_k = abs - m_v;
    r.normalize();
    return r;
}

bool PadicScalar::same_within_cert(const PadicScalar& o) const {
    return (*this - o).is_zero();
}

long PadicScalar::difference_exponent(const PadicScalar& o) const {
    return (*this - o).abs_cert();
}

long PadicScalar::residue() const {
    if (m_zero) return 0;
    require(m_v >= 0, ErrorKind::Validation, "residue of a non-integral element");
    if (m_v > 0) return 0;
    return (long)mod_norm(m_u[0], Int(m_ring->ell()));
}

std::string PadicScalar::str() const {
    std::ostringstream os;
    if (m_zero && m_exact) {
        os << "w:inf u:0 mod l^0";
    } else if (m_zero) {
        os << "w:" << rat_str(Rat(m_v, m_ring->e())) << " u:0 mod l^0";
    } else {
        os << "w:" << rat_str(Rat(m_v, m_ring->e())) << " u:" << unit_encoded().str()
           << " mod l^" << m_k;
    }
    return os.str();
}

PadicScalar PadicScalar::parse(RingPtr ring, const std::string& s) {
    std::istringstream is(s);
    std::string wtok, utok, modtok, ltok;
    is >> wtok >> utok >> modtok >> ltok;
    require(wtok.rfind("w:", 0) == 0 && utok.rfind("u:", 0) == 0 && modtok == "mod" &&
                ltok.rfind("l^", 0) == 0,
            ErrorKind::Validation, "bad scalar literal '" + s + "'");
    std::string w = wtok.substr(2), u = utok.substr(2), k = ltok.substr(2);
    if (w == "inf") return zero(std::move(ring));
    Rat wr = parse_rat(w);
    Int ui = parse_int(u);
    long kk = std::stol(k);
    if (ui == 0) {
        Rat piv = wr * ring->e();
        require(rat_den(piv) == 1, ErrorKind::Validation, "bad zero certificate in '" + s + "'");
        return zero_at(std::move(ring), (long)rat_num(piv));
    }
    return from_parts(std::move(ring), wr, ui, kk);
}

DigitStats digit_stats(long ell, const Int& a) {
    require(a >= 0, ErrorKind::Validation, "digit_stats needs a >= 0");
    DigitStats st{0, 0};
    Int x = a;
    while (x != 0) {
        st.sum += (long)(x % ell);
        st.count += 1;
        x /= ell;
    }
    return st;
}

Int factorial_valuation(long ell, const Int& a) {
    require(a >= 0, ErrorKind::Validation, "factorial_valuation needs a >= 0");
    Int total = 0, x = a;
    while (x != 0) {
        x /= ell;
        total += x;
    }
    return total;
}

Rat multinomial_valuation_lower_bound(long ell, long n, const Int& total_a) {
    Int vn = factorial_valuation(ell, Int(n));
    DigitStats st = digit_stats(ell, total_a + n);
    return Rat(-vn - Int(n + 1) * st.count);
}

Rat multinomial_valuation_bound(long ell, const std::vector<Int>& a) {
    require(!a.empty(), ErrorKind::Validation, "empty tuple");
    long n = (long)a.size() - 1;
    Int total = 0;
    for (const Int& ai : a) {
        require(ai >= 0, ErrorKind::Validation, "negative entry");
        total += ai;
    }
    return multinomial_valuation_lower_bound(ell, n, total);
}

Rat multinomial_valuation_exact(long ell, const std::vector<Int>& a) {
    require(!a.empty(), ErrorKind::Validation, "empty tuple");
    long n = (long)a.size() - 1;
    Int total = 0, v = 0;
    for (const Int& ai : a) {
        require(ai >= 0, ErrorKind::Validation, "negative entry");
        total += ai;
        v += factorial_valuation(ell, ai);
    }
    v -= factorial_valuation(ell, total + n);
    return Rat(v);
}

Rat multinomial_weight(const std::vector<long>& a) {
    require(!a.empty(), ErrorKind::Validation, "empty tuple");
    long n = (long)a.size() - 1;
    Int num = 1;
    long total = 0;
    for (long ai : a) {
        require(ai >= 0, ErrorKind::Validation, "negative entry");
        total += ai;
        for (long t = 2; t <= ai; ++t) num *= t;
    }
    Int den = 1;
    for (long t = 2; t <= total + n; ++t) den *= t;
    return Rat(num, den);
}

CapResult cap_N(long ell, const Rat& c, const Rat& f) {
    require(f > 0, ErrorKind::Validation, "cap_N needs f > 0");
    if (c <= 0) return CapResult{c - f, Int(1)};
    Rat best;
    Int bestx = 1;
    bool first = true;
    Int x = 1; // ell^j
    for (long j = 0;; ++j) {
        Rat v = c * (j + 1) - f * Rat(x);
        if (first || v > best) {
            best = v;
            bestx = x;
            first = false;
        }
        if (c * (j + 2) < f * Rat(x)) break;
        x *= ell;
    }
    return CapResult{best, bestx};
}

PadicScalar teichmuller(RingPtr ring, const Int& u) {
    const RingSpec& R = *ring;
    Int res = mod_norm(u, Int(R.ell()));
    if (res == 0) return PadicScalar::zero(std::move(ring));
    long D = R.coeff_digits(R.P(), 0) + 1;
    Int m = pow_int(Int(R.ell()), D);
    Int x = res;
    for (long i = 0; i <= D + 1; ++i) {
        Int nx = 1;
        Int b = x;
        long ee = R.ell();
        while (ee > 0) {
            if (ee & 1) nx = mod_norm(nx * b, m);
            b = mod_norm(b * b, m);
            ee >>= 1;
        }
        if (nx == x) break;
        x = nx;
    }
    std::vector<Int> up = opoly::from_int(R, x, R.P());
    return PadicScalar::from_unit_poly(std::move(ring), 0, std::move(up), R.P());
}

PadicScalar padic_log(const PadicScalar& x) {
    require(!x.is_zero(), ErrorKind::NonUnit, "log of zero");
    require(*x.pi_valuation() == 0, ErrorKind::NonUnit, "log needs a unit");
    RingPtr ring = x.ring();
    const RingSpec& R = *ring;
    PadicScalar omega = teichmuller(ring, Int(x.residue()));
    PadicScalar y = x / omega;
    PadicScalar one = PadicScalar::from_int(ring, 1);
    PadicScalar z = y - one;
    if (z.is_exact_zero()) return PadicScalar::zero(ring);
    if (z.is_zero()) return z; // zero within certificate; |log| <= |z|
    long w = *z.pi_valuation();
    long T = z.abs_cert(); // target absolute pi-exponent

    // terms z^k/k; the k-th term has pi-exponent >= k w - e v_ell(k)
    PadicScalar sum = PadicScalar::zero(ring);
    PadicScalar zk = PadicScalar::from_int(ring, 1);
    long k = 0;
    long tail_exp = 0;
    for (;;) {
        ++k;
        zk = zk * z;
        PadicScalar term = zk / PadicScalar::from_int(ring, Int(k));
        if (k % 2 == 0) term = -term;
        sum = sum + term;
        tail_exp = series_tail_exponent(R, w, k);
        if (tail_exp >= T) break;
        require(k < 64 * (T + R.e() + 4), ErrorKind::PrecisionExhausted,
                "log series did not settle within the digit budget");
    }
    PadicScalar out = sum.truncate_abs(std::min(T, tail_exp));
    require(out.abs_cert() > 0, ErrorKind::PrecisionExhausted,
            "log has no certified digits");
    return out;
}

PadicScalar hensel_root(long d, const PadicScalar& u, const Int& target_residue) {
    RingPtr ring = u.ring();
    const RingSpec& R = *ring;
    require(d >= 1, ErrorKind::BadExponent, "exponent must be positive");
    require(d % R.ell() != 0, ErrorKind::BadExponent, "exponent divisible by ell");
    require(!u.is_zero() && *u.pi_valuation() == 0, ErrorKind::NonUnit,
            "hensel_root needs a unit");
    Int t = mod_norm(target_residue, Int(R.ell()));
    require(t != 0, ErrorKind::NoRoot, "target residue must be a unit");
    // check t^d = u mod pi
    long td = 1;
    for (long i = 0; i < d; ++i) td = (td * (long)t) % R.ell();
    require(td == u.residue(), ErrorKind::NoRoot,
            "target residue is not a root of the reduction");

    PadicScalar a = PadicScalar::from_int(ring, t);
    PadicScalar dd = PadicScalar::from_int(ring, Int(d));
    long steps = 2;
    long prec = 1;
    while (prec < R.P() + R.e()) {
        prec *= 2;
        ++steps;
    }
    for (long i = 0; i < steps + 2; ++i) {
        PadicScalar f = a.pow(d) - u;
        if (f.is_zero()) break;
        PadicScalar fp = dd * a.pow(d - 1);
        a = a - f / fp;
    }
    PadicScalar check = a.pow(d) - u;
    require(check.is_zero(), ErrorKind::NoRoot, "newton iteration failed to converge");
    return a;
}

} // namespace elladic
