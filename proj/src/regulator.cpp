#include "elladic/regulator.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "elladic/errors.hpp"

namespace elladic {

namespace {

using u64 = unsigned long long;

long rat_ceil_long(const Rat& r) {
    Int n = rat_num(r), d = rat_den(r);
    Int q = n / d;
    if (q * d < n) q += 1;
    return q.convert_to<long>();
}

// ---------------------------------------------------------------------------
// monomials z^beta in s variables of degree <= D: graded, ascending lex inside
// each degree, so ranks are sorted by degree and products resolve through the
// packed base-(D+1) code table

struct MonoTable {
    int s;
    long D;
    long stride;
    std::vector<std::vector<int>> expo;
    std::vector<long> deg;
    std::vector<long> code;
    std::vector<int> rank_of;
    std::vector<int> unit_rank;

    MonoTable(int s_, long D_) : s(s_), D(D_ < 0 ? 0 : D_), stride(D + 1) {
        Int cells = 1;
        for (int i = 0; i < s; ++i) cells *= stride;
        require(cells <= (Int(1) << 24), ErrorKind::TooLarge,
                "cutoff too deep for the dense expansion table");
        rank_of.assign((size_t)cells.convert_to<long>(), -1);
        std::vector<int> e((size_t)s, 0);
        for (long dg = 0; dg <= D; ++dg) emit(e, 0, dg, dg);
        unit_rank.assign((size_t)s, -1);
        if (D >= 1) {
            long c = 1;
            for (int v = 0; v < s; ++v) {
                unit_rank[(size_t)v] = rank_of[(size_t)c];
                c *= stride;
            }
        }
    }

    void emit(std::vector<int>& e, int pos, long left, long dg) {
        if (pos == s - 1) {
            e[(size_t)pos] = (int)left;
            long c = 0;
            for (int i = s - 1; i >= 0; --i) c = c * stride + e[(size_t)i];
            rank_of[(size_t)c] = (int)expo.size();
            expo.push_back(e);
            deg.push_back(dg);
            code.push_back(c);
            return;
        }
        for (long v = 0; v <= left; ++v) {
            e[(size_t)pos] = (int)v;
            emit(e, pos + 1, left - v, dg);
        }
    }

    size_t count() const { return expo.size(); }
};

// ---------------------------------------------------------------------------
// coefficient rings the expansion runs over; entries stay canonical in [0,mod)

struct LongRing {
    long mod = 0;
    long ell = 0;
    long wexp = 0;
    using Elem = long;
    Elem zero() const { return 0; }
    Elem one() const { return 1; }
    bool is_zero(const Elem& a) const { return a == 0; }
    Elem add(const Elem& a, const Elem& b) const {
        long r = a + b;
        return r >= mod ? r - mod : r;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        long r = a - b;
        return r < 0 ? r + mod : r;
    }
    Elem neg(const Elem& a) const { return a == 0 ? 0 : mod - a; }
    Elem mul(const Elem& a, const Elem& b) const {
        return (long)((u64)a * (u64)b % (u64)mod);
    }
    bool is_unit(const Elem& a) const { return a % ell != 0; }
    bool div_ell(const Elem& a) const { return a % ell == 0; }
    Elem inv(const Elem& a) const { return inv_mod(Int(a), Int(mod)).convert_to<long>(); }
    Int lift(const Elem& a) const { return Int(a); }
    Elem enter(const Int& a) const { return mod_norm(a, Int(mod)).convert_to<long>(); }
};

struct IntRing {
    Int mod;
    long ell = 0;
    long wexp = 0;
    using Elem = Int;
    Elem zero() const { return Int(0); }
    Elem one() const { return Int(1); }
    bool is_zero(const Elem& a) const { return a == 0; }
    Elem add(const Elem& a, const Elem& b) const {
        Int r = a + b;
        return r >= mod ? r - mod : r;
    }
    Elem sub(const Elem& a, const Elem& b) const {
        Int r = a - b;
        return r < 0 ? r + mod : r;
    }
    Elem neg(const Elem& a) const { return a == 0 ? a : mod - a; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b % mod; }
    bool is_unit(const Elem& a) const { return a % ell != 0; }
    bool div_ell(const Elem& a) const { return a % ell == 0; }
    Elem inv(const Elem& a) const { return inv_mod(a, mod); }
    Int lift(const Elem& a) const { return a; }
    Elem enter(const Int& a) const { return mod_norm(a, mod); }
};

struct SeriesRing {
    RingPtr ring;
    int m = 0;
    long n = 0;
    using Elem = TruncSeries;
    Elem zero() const { return TruncSeries::constant_int(ring, m, n, Int(0)); }
    Elem one() const { return TruncSeries::constant_int(ring, m, n, Int(1)); }
    bool is_zero(const Elem& a) const { return a.is_zero(); }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    bool is_unit(const Elem& a) const {
        PadicScalar c = a.constant_term();
        return !c.is_zero() && c.pi_valuation() && *c.pi_valuation() == 0;
    }
    Elem inv(const Elem& a) const { return a.invert(); }
};

// ---------------------------------------------------------------------------
// constant d x d blocks

template <class R>
std::vector<typename R::Elem> cmul(const R& rg, const std::vector<typename R::Elem>& a,
                                   const std::vector<typename R::Elem>& b, int d) {
    std::vector<typename R::Elem> out((size_t)d * d, rg.zero());
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
            const auto& aik = a[(size_t)i * d + k];
            if (rg.is_zero(aik)) continue;
            for (int j = 0; j < d; ++j)
                out[(size_t)i * d + j] =
                    rg.add(out[(size_t)i * d + j], rg.mul(aik, b[(size_t)k * d + j]));
        }
    return out;
}

template <class R>
std::vector<typename R::Elem> mat_inverse(const R& rg, std::vector<typename R::Elem> m, int d) {
    using Elem = typename R::Elem;
    std::vector<Elem> r((size_t)d * d, rg.zero());
    for (int i = 0; i < d; ++i) r[(size_t)i * d + i] = rg.one();
    for (int c = 0; c < d; ++c) {
        int pr = -1;
        for (int i = c; i < d && pr < 0; ++i)
            if (rg.is_unit(m[(size_t)i * d + c])) pr = i;
        require(pr >= 0, ErrorKind::NonUnit, "matrix is not invertible at this modulus");
        if (pr != c)
            for (int j = 0; j < d; ++j) {
                std::swap(m[(size_t)c * d + j], m[(size_t)pr * d + j]);
                std::swap(r[(size_t)c * d + j], r[(size_t)pr * d + j]);
            }
        Elem pi = rg.inv(m[(size_t)c * d + c]);
        for (int j = 0; j < d; ++j) {
            m[(size_t)c * d + j] = rg.mul(m[(size_t)c * d + j], pi);
            r[(size_t)c * d + j] = rg.mul(r[(size_t)c * d + j], pi);
        }
        for (int i = 0; i < d; ++i) {
            if (i == c) continue;
            Elem f = m[(size_t)i * d + c];
            if (rg.is_zero(f)) continue;
            for (int j = 0; j < d; ++j) {
                m[(size_t)i * d + j] =
                    rg.sub(m[(size_t)i * d + j], rg.mul(f, m[(size_t)c * d + j]));
                r[(size_t)i * d + j] =
                    rg.sub(r[(size_t)i * d + j], rg.mul(f, r[(size_t)c * d + j]));
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// matrices with polynomial entries, stored monomial-major over the table

template <class R>
struct TCalc {
    R rg;
    const MonoTable* tab;
    int d;
    bool defer_raw = false;

    using Elem = typename R::Elem;
    using PM = std::vector<Elem>;

    TCalc(R r, const MonoTable* t, int dim) : rg(std::move(r)), tab(t), d(dim) {
        if constexpr (std::is_same_v<R, LongRing>) {
            // raw 64-bit accumulation across the whole table must stay < 2^63
            Int worst = Int(tab->count()) * d * Int(rg.mod - 1) * Int(rg.mod - 1);
            defer_raw = worst < (Int(1) << 63);
        }
    }

    size_t cells() const { return tab->count() * (size_t)(d * d); }
    PM zero_pm() const { return PM(cells(), rg.zero()); }

    bool live(const PM& a, size_t r) const {
        const size_t dd = (size_t)d * d;
        for (size_t i = r * dd; i < (r + 1) * dd; ++i)
            if (!rg.is_zero(a[i])) return true;
        return false;
    }

    // out += a b, products of degree > D dropped
    void mul_acc(const PM& a, const PM& b, PM& out) const {
        const MonoTable& T = *tab;
        const int dd = d * d;
        std::vector<int> la, lb;
        for (size_t r = 0; r < T.count(); ++r)
            if (live(a, r)) la.push_back((int)r);
        for (size_t r = 0; r < T.count(); ++r)
            if (live(b, r)) lb.push_back((int)r);
        if (la.empty() || lb.empty()) return;
        if constexpr (std::is_same_v<R, LongRing>) {
            std::vector<u64> sc(out.size(), 0);
            const u64 md = (u64)rg.mod;
            for (int ra : la) {
                const long da = T.deg[(size_t)ra];
                const long* A = &a[(size_t)ra * dd];
                for (int rb : lb) {
                    if (T.deg[(size_t)rb] > T.D - da) break;
                    const long* B = &b[(size_t)rb * dd];
                    const int rc = T.rank_of[(size_t)(T.code[(size_t)ra] + T.code[(size_t)rb])];
                    u64* O = &sc[(size_t)rc * dd];
                    for (int i = 0; i < d; ++i) {
                        const long* Ai = A + (size_t)i * d;
                        for (int j = 0; j < d; ++j) {
                            u64 t = 0;
                            for (int k = 0; k < d; ++k)
                                t += (u64)Ai[k] * (u64)B[(size_t)k * d + j];
                            if (defer_raw)
                                O[(size_t)i * d + j] += t;
                            else
                                O[(size_t)i * d + j] += t % md;
                        }
                    }
                }
            }
            for (size_t i = 0; i < out.size(); ++i)
                if (sc[i]) out[i] = (long)(((u64)out[i] + sc[i] % md) % md);
        } else {
            for (int ra : la) {
                const long da = T.deg[(size_t)ra];
                const Elem* A = &a[(size_t)ra * dd];
                for (int rb : lb) {
                    if (T.deg[(size_t)rb] > T.D - da) break;
                    const Elem* B = &b[(size_t)rb * dd];
                    const int rc = T.rank_of[(size_t)(T.code[(size_t)ra] + T.code[(size_t)rb])];
                    Elem* O = &out[(size_t)rc * dd];
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j) {
                            Elem acc = O[(size_t)i * d + j];
                            for (int k = 0; k < d; ++k)
                                acc = rg.add(acc, rg.mul(A[(size_t)i * d + k], B[(size_t)k * d + j]));
                            O[(size_t)i * d + j] = std::move(acc);
                        }
                }
            }
        }
    }

    PM mul_const(const PM& a, const std::vector<Elem>& k) const {
        PM out = zero_pm();
        const int dd = d * d;
        for (size_t r = 0; r < tab->count(); ++r) {
            if (!live(a, r)) continue;
            const Elem* A = &a[r * (size_t)dd];
            Elem* O = &out[r * (size_t)dd];
            for (int i = 0; i < d; ++i)
                for (int kk = 0; kk < d; ++kk) {
                    const Elem& aik = A[(size_t)i * d + kk];
                    if (rg.is_zero(aik)) continue;
                    for (int j = 0; j < d; ++j)
                        O[(size_t)i * d + j] =
                            rg.add(O[(size_t)i * d + j], rg.mul(aik, k[(size_t)kk * d + j]));
                }
        }
        return out;
    }
};

// T(X) = (nu^-1 d nu)^s volume-form coefficient in the eliminated chart,
// nu = C + sum_v (X_v - X_s) z_v with C = 1 + X_s.  B carries the sign
// C^-1 (X_s - X_v) so that V = sum_k B^k is the alternating inverse series.
template <class R>
typename TCalc<R>::PM t_pipeline(const TCalc<R>& calc,
                                 const std::vector<std::vector<typename R::Elem>>& x) {
    using PM = typename TCalc<R>::PM;
    using Elem = typename R::Elem;
    const R& rg = calc.rg;
    const MonoTable& T = *calc.tab;
    const int d = calc.d, s = T.s, dd = d * d;

    std::vector<Elem> cmat = x[(size_t)s];
    for (int i = 0; i < d; ++i)
        cmat[(size_t)i * d + i] = rg.add(cmat[(size_t)i * d + i], rg.one());
    auto cinv = mat_inverse(rg, cmat, d);

    PM B = calc.zero_pm();
    bool bzero = true;
    if (T.D >= 1)
        for (int v = 0; v < s; ++v) {
            std::vector<Elem> nv((size_t)dd);
            for (int i = 0; i < dd; ++i)
                nv[(size_t)i] = rg.sub(x[(size_t)s][(size_t)i], x[(size_t)v][(size_t)i]);
            auto slot = cmul(rg, cinv, nv, d);
            size_t base = (size_t)T.unit_rank[(size_t)v] * dd;
            for (int i = 0; i < dd; ++i) {
                if (!rg.is_zero(slot[(size_t)i])) bzero = false;
                B[base + (size_t)i] = std::move(slot[(size_t)i]);
            }
        }

    PM V = calc.zero_pm();
    for (int i = 0; i < d; ++i) V[(size_t)i * d + i] = rg.one();
    if (!bzero) {
        PM cur = V;
        for (long k = 1; k <= T.D; ++k) {
            PM nxt = calc.zero_pm();
            calc.mul_acc(cur, B, nxt);
            cur = std::move(nxt);
            bool any = false;
            for (size_t i = 0; i < V.size(); ++i)
                if (!rg.is_zero(cur[i])) {
                    V[i] = rg.add(V[i], cur[i]);
                    any = true;
                }
            if (!any) break;
        }
    }
    PM nuinv = calc.mul_const(V, cinv);

    std::vector<PM> om((size_t)s), omn((size_t)s);
    for (int v = 0; v < s; ++v) {
        std::vector<Elem> mv((size_t)dd);
        for (int i = 0; i < dd; ++i)
            mv[(size_t)i] = rg.sub(x[(size_t)v][(size_t)i], x[(size_t)s][(size_t)i]);
        om[(size_t)v] = calc.mul_const(nuinv, mv);
        omn[(size_t)v] = om[(size_t)v];
        for (auto& e : omn[(size_t)v]) e = rg.neg(e);
    }

    // comp[mask] is the dz_mask coefficient of omega^popcount(mask); appending
    // omega_i to a sorted mask costs the parity of the entries above i
    const unsigned full = 1u << s;
    std::vector<PM> comp((size_t)full);
    std::vector<char> has((size_t)full, 0);
    for (int v = 0; v < s; ++v) {
        comp[(size_t)(1u << v)] = om[(size_t)v];
        has[(size_t)(1u << v)] = 1;
    }
    for (int level = 1; level < s; ++level) {
        std::vector<PM> nxt((size_t)full);
        std::vector<char> nh((size_t)full, 0);
        for (unsigned mask = 1; mask < full; ++mask) {
            if (!has[(size_t)mask] || __builtin_popcount(mask) != level) continue;
            for (int i = 0; i < s; ++i) {
                if (mask >> i & 1u) continue;
                unsigned tgt = mask | (1u << i);
                int above = __builtin_popcount(mask >> (i + 1));
                const PM& rhs = (above & 1) ? omn[(size_t)i] : om[(size_t)i];
                if (!nh[(size_t)tgt]) {
                    nxt[(size_t)tgt] = calc.zero_pm();
                    nh[(size_t)tgt] = 1;
                }
                calc.mul_acc(comp[(size_t)mask], rhs, nxt[(size_t)tgt]);
            }
        }
        comp = std::move(nxt);
        has = std::move(nh);
    }
    if (!has[(size_t)(full - 1)]) return calc.zero_pm();
    return std::move(comp[(size_t)(full - 1)]);
}

// ---------------------------------------------------------------------------
// factorial weights beta_0! .. beta_{s-1}! 0! / (|beta|+s)! per rank

struct WeightTable {
    std::vector<Rat> mult;
    long maxw = 0;
};

WeightTable weights_for(const MonoTable& tab, long ell) {
    WeightTable w;
    w.mult.reserve(tab.count());
    for (size_t r = 0; r < tab.count(); ++r) {
        std::vector<long> beta(tab.expo[r].begin(), tab.expo[r].end());
        beta.push_back(0);
        Rat m = multinomial_weight(beta);
        w.maxw = std::max(w.maxw, -val_rat(m, ell));
        w.mult.push_back(std::move(m));
    }
    return w;
}

long digit_sum(long ell, long n) {
    long s = 0;
    for (; n > 0; n /= ell) s += n % ell;
    return s;
}

// max of sum_i S_ell(n_i) over s-part compositions of n, grown on demand
struct MaxSums {
    long ell;
    int s;
    std::vector<std::vector<long>> b;

    MaxSums(long ell_, int s_) : ell(ell_), s(s_), b((size_t)s_ + 1) {}

    void extend(long N) {
        auto& s1 = b[1];
        for (long n = (long)s1.size(); n <= N; ++n) s1.push_back(digit_sum(ell, n));
        for (int k = 2; k <= s; ++k) {
            auto& bk = b[(size_t)k];
            const auto& bp = b[(size_t)k - 1];
            for (long n = (long)bk.size(); n <= N; ++n) {
                long m = 0;
                for (long j = 0; j <= n; ++j)
                    m = std::max(m, bp[(size_t)(n - j)] + s1[(size_t)j]);
                bk.push_back(m);
            }
        }
    }

    long at(long n) const { return b[(size_t)s][(size_t)n]; }
};

// ---------------------------------------------------------------------------
// scalar tuple plumbing

struct XInfo {
    long ell = 0;
    long P = 0;
    Int modP;
    int d = 0;
    long depth = 0;
    bool all_zero = true;
};

XInfo check_x_tuple(const RingPtr& ring, const std::vector<ModMatrix>& x, int s, long cutoff) {
    require(ring != nullptr, ErrorKind::Validation, "null ring");
    require(ring->e() == 1, ErrorKind::Validation, "matrix tuples live over e = 1 rings");
    require(s >= 1 && s % 2 == 1, ErrorKind::Validation, "s must be odd");
    require(cutoff >= 0, ErrorKind::Validation, "cutoff must be nonnegative");
    require((long)x.size() == (long)s + 1, ErrorKind::Validation, "tuple must have s + 1 entries");
    XInfo info;
    info.ell = ring->ell();
    info.P = ring->P();
    info.modP = pow_int(Int(info.ell), info.P);
    info.d = x[0].d;
    require(info.d >= 1, ErrorKind::Validation, "empty matrices");
    long best = info.P;
    for (const auto& mat : x) {
        require(mat.d == info.d, ErrorKind::Validation, "mixed matrix sizes");
        require(mat.mod == info.modP, ErrorKind::Validation, "matrix modulus must be ell^P");
        for (const Int& v : mat.a)
            if (v != 0) {
                info.all_zero = false;
                best = std::min(best, val_int(v, info.ell));
            }
    }
    info.depth = info.all_zero ? info.P : std::min(best, info.P);
    return info;
}

template <class R>
typename TCalc<R>::PM expand_x(const TCalc<R>& calc, const std::vector<ModMatrix>& x) {
    std::vector<std::vector<typename R::Elem>> xe(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        xe[i].resize((size_t)calc.d * calc.d);
        for (size_t t = 0; t < xe[i].size(); ++t) xe[i][t] = calc.rg.enter(x[i].a[t]);
    }
    return t_pipeline(calc, xe);
}

// v_ell(T_beta) >= min(depth (|beta|+s), cap) is forced by the filtration; a
// violation means the engine lost digits somewhere
template <class R>
void check_membership(const R& rg, const MonoTable& tab,
                      const typename TCalc<R>::PM& T, int d, long depth, long cap, long ell) {
    const int dd = d * d;
    for (size_t r = 0; r < tab.count(); ++r) {
        long bound = std::min(depth * (tab.deg[r] + (long)tab.s), cap);
        if (bound <= 0) continue;
        Int powb = pow_int(Int(ell), bound);
        for (int i = 0; i < dd; ++i)
            require(mod_norm(rg.lift(T[r * (size_t)dd + (size_t)i]), powb) == 0,
                    ErrorKind::CertificateMismatch,
                    "expansion coefficient escapes its filtration bound");
    }
}

template <class R>
std::vector<Int> trace_lifts(const R& rg, const MonoTable& tab,
                             const typename TCalc<R>::PM& T, int d) {
    std::vector<Int> out(tab.count());
    const int dd = d * d;
    for (size_t r = 0; r < tab.count(); ++r) {
        typename R::Elem tr = rg.zero();
        for (int i = 0; i < d; ++i) tr = rg.add(tr, T[r * (size_t)dd + (size_t)(i * d + i)]);
        out[r] = rg.lift(tr);
    }
    return out;
}

// per-pair accumulation needs d mod^2 < 2^64, see TCalc::mul_acc
bool fits_long(const Int& modW, int d) { return modW <= (Int(1) << 30) && d <= 8; }

std::vector<Int> scalar_traces(const XInfo& info, const MonoTable& tab,
                               const std::vector<ModMatrix>& x, long W) {
    Int modW = pow_int(Int(info.ell), W);
    if (fits_long(modW, info.d)) {
        LongRing rg{modW.convert_to<long>(), info.ell, W};
        TCalc<LongRing> calc(rg, &tab, info.d);
        auto T = expand_x(calc, x);
        check_membership(rg, tab, T, info.d, info.depth, W, info.ell);
        return trace_lifts(rg, tab, T, info.d);
    }
    IntRing rg{modW, info.ell, W};
    TCalc<IntRing> calc(rg, &tab, info.d);
    auto T = expand_x(calc, x);
    check_membership(rg, tab, T, info.d, info.depth, W, info.ell);
    return trace_lifts(rg, tab, T, info.d);
}

RegulatorValue assemble_phi(const RingPtr& ring, const std::vector<Int>& traces,
                            const WeightTable& wt, const Rat& combined, long cutoff,
                            const Int& divisor) {
    Rat q = 0;
    for (size_t r = 0; r < traces.size(); ++r)
        if (traces[r] != 0) q += wt.mult[r] * Rat(traces[r]);
    q = -q / Rat(divisor);
    require(rat_den(combined) == 1, ErrorKind::Validation, "certificate must be integral at e = 1");
    PadicScalar val = PadicScalar::from_rat(ring, q).truncate_abs(rat_num(combined).convert_to<long>());
    return {val, combined, cutoff};
}

}  // namespace

Rat regulator_tail_exponent(long ell, long e, long depth, int s, long cutoff) {
    require(ell >= 3 && ell % 2 == 1, ErrorKind::Validation, "ell must be an odd prime");
    require(e >= 1 && s >= 1 && cutoff >= 0, ErrorKind::Validation, "bad tail parameters");
    require(depth >= 1, ErrorKind::DepthZero, "tail bounds need depth >= 1");
    MaxSums ms(ell, s);
    // f(n) = depth (n+s)/e - w_max(n); the envelope replaces w_max by a digit
    // count bound, which makes the scan provably stop
    const Rat big_w(s + (ell - 1) * (long)s * 64 - 1, ell - 1);
    std::optional<Rat> best;
    for (long n = cutoff + 1;; ++n) {
        require(n <= cutoff + 8000000, ErrorKind::BudgetExceeded, "tail scan failed to stabilize");
        ms.extend(n);
        Rat f = Rat(depth * (n + s), e) - Rat(s + ms.at(n) - digit_sum(ell, n + s), ell - 1);
        if (!best || f < *best) best = f;
        if (Rat(depth * (n + s), e) - big_w >= *best) break;
    }
    return *best;
}

long min_cutoff_for_error(long ell, long e, long depth, int s, const Rat& target_exp) {
    for (long c = 0;; ++c) {
        require(c <= 1000000, ErrorKind::BudgetExceeded, "no cutoff reaches the target");
        if (regulator_tail_exponent(ell, e, depth, s, c) >= target_exp) return c;
    }
}

TExpansion t_expansion(const RingPtr& ring, const std::vector<ModMatrix>& x, int s, long cutoff) {
    XInfo info = check_x_tuple(ring, x, s, cutoff);
    require(info.all_zero || info.depth >= 1, ErrorKind::DepthZero,
            "tuple entries must vanish mod ell");
    MonoTable tab(s, cutoff);
    TExpansion out;
    out.d = info.d;
    out.svars = s;
    out.cutoff = cutoff;
    out.depth = info.depth;
    out.modulus = info.modP;
    out.expo = tab.expo;
    out.coeff.reserve(tab.count());
    const int dd = info.d * info.d;
    auto slice = [&](const auto& rg, const auto& T) {
        for (size_t r = 0; r < tab.count(); ++r) {
            ModMatrix m = ModMatrix::zero(info.d, info.modP);
            for (int i = 0; i < dd; ++i)
                m.a[(size_t)i] = rg.lift(T[r * (size_t)dd + (size_t)i]);
            out.coeff.push_back(std::move(m));
        }
    };
    if (fits_long(info.modP, info.d)) {
        LongRing rg{info.modP.convert_to<long>(), info.ell, info.P};
        TCalc<LongRing> calc(rg, &tab, info.d);
        auto T = expand_x(calc, x);
        check_membership(rg, tab, T, info.d, info.depth, info.P, info.ell);
        slice(rg, T);
    } else {
        IntRing rg{info.modP, info.ell, info.P};
        TCalc<IntRing> calc(rg, &tab, info.d);
        auto T = expand_x(calc, x);
        check_membership(rg, tab, T, info.d, info.depth, info.P, info.ell);
        slice(rg, T);
    }
    return out;
}

RegulatorValue phi_s(const RingPtr& ring, const std::vector<ModMatrix>& x, int s, long cutoff) {
    XInfo info = check_x_tuple(ring, x, s, cutoff);
    if (info.all_zero) return {PadicScalar::zero(ring), std::nullopt, cutoff};
    require(info.depth >= 1, ErrorKind::DepthZero, "tuple entries must vanish mod ell");
    Rat tail = regulator_tail_exponent(info.ell, 1, info.depth, s, cutoff);
    Rat combined = std::min(tail, Rat(info.P));
    require(combined > 0, ErrorKind::PrecisionExhausted, "no certified digits at this precision");
    MonoTable tab(s, cutoff);
    WeightTable wt = weights_for(tab, info.ell);
    long W = std::min(info.P, rat_ceil_long(tail)) + wt.maxw;
    std::vector<Int> tr = scalar_traces(info, tab, x, W);
    return assemble_phi(ring, tr, wt, combined, cutoff, Int(1));
}

MatrixTuple::MatrixTuple(RingPtr ring, std::vector<ModMatrix> mats)
    : m_ring(std::move(ring)), m_mats(std::move(mats)) {
    require(m_ring != nullptr, ErrorKind::Validation, "null ring");
    require(m_ring->e() == 1, ErrorKind::Validation, "matrix tuples live over e = 1 rings");
    require(!m_mats.empty(), ErrorKind::Validation, "empty tuple");
    const long ell = m_ring->ell();
    Int modP = pow_int(Int(ell), m_ring->P());
    m_d = m_mats[0].d;
    require(m_d >= 1, ErrorKind::Validation, "empty matrices");
    long best = m_ring->P();
    for (const auto& g : m_mats) {
        require(g.d == m_d, ErrorKind::Validation, "mixed matrix sizes");
        require(g.mod == modP, ErrorKind::Validation, "matrix modulus must be ell^P");
        require(mod_norm(g.det(), Int(ell)) != 0, ErrorKind::NonUnit,
                "tuple entries must be invertible");
        for (int i = 0; i < m_d; ++i)
            for (int j = 0; j < m_d; ++j) {
                Int v = mod_norm(g.at(i, j) - (i == j ? 1 : 0), modP);
                if (v != 0) best = std::min(best, val_int(v, ell));
            }
    }
    m_depth = best;
}

RegulatorValue phi_tilde(const MatrixTuple& g, int s, long cutoff) {
    require(g.in_k1(), ErrorKind::NotInK1, "tuple must be trivial mod ell");
    Int modP = pow_int(Int(g.ring()->ell()), g.ring()->P());
    std::vector<ModMatrix> x;
    x.reserve(g.mats().size());
    for (const auto& m : g.mats()) {
        ModMatrix xm = m;
        for (int i = 0; i < g.dim(); ++i) xm.at(i, i) = mod_norm(xm.at(i, i) - 1, modP);
        x.push_back(std::move(xm));
    }
    return phi_s(g.ring(), x, s, cutoff);
}

namespace {

// ---------------------------------------------------------------------------
// transfer: average over GL_d(F_ell) of Teichmueller-twisted translates

int det_mod(std::vector<int> m, int d, long ell) {
    long det = 1;
    for (int c = 0; c < d; ++c) {
        int pr = -1;
        for (int i = c; i < d && pr < 0; ++i)
            if (m[(size_t)i * d + c] % ell != 0) pr = i;
        if (pr < 0) return 0;
        if (pr != c) {
            for (int j = 0; j < d; ++j) std::swap(m[(size_t)c * d + j], m[(size_t)pr * d + j]);
            det = (ell - det) % ell;
        }
        long piv = m[(size_t)c * d + c] % ell;
        det = det * piv % ell;
        long pinv = 0;
        for (long t = 1; t < ell; ++t)
            if (t * piv % ell == 1) {
                pinv = t;
                break;
            }
        for (int i = c + 1; i < d; ++i) {
            long f = m[(size_t)i * d + c] % ell * pinv % ell;
            if (f == 0) continue;
            for (int j = c; j < d; ++j)
                m[(size_t)i * d + j] =
                    (int)((((long)m[(size_t)i * d + j] - f * m[(size_t)c * d + j]) % ell + ell) % ell);
        }
    }
    return (int)det;
}

std::vector<int> enumerate_gl(long ell, int d) {
    std::vector<int> out;
    std::vector<int> m((size_t)d * d, 0);
    while (true) {
        if (det_mod(m, d, ell) != 0) out.insert(out.end(), m.begin(), m.end());
        int pos = 0;
        while (pos < d * d && ++m[(size_t)pos] == (int)ell) {
            m[(size_t)pos] = 0;
            ++pos;
        }
        if (pos == d * d) break;
    }
    return out;
}

std::vector<Int> teich_table(long ell, const Int& modW) {
    std::vector<Int> t((size_t)ell);
    t[0] = 0;
    for (long r = 1; r < ell; ++r) {
        Int x = r;
        long guard = 0;
        while (true) {
            Int nx = boost::multiprecision::powm(x, Int(ell), modW);
            if (nx == x) break;
            x = std::move(nx);
            require(++guard < 4096, ErrorKind::BudgetExceeded, "Teichmueller iteration stalled");
        }
        t[(size_t)r] = std::move(x);
    }
    return t;
}

long thread_count(size_t jobs) {
    long t = 0;
    if (const char* s = std::getenv("ELLADIC_THREADS")) t = std::strtol(s, nullptr, 10);
    if (t <= 0) t = (long)std::thread::hardware_concurrency();
    if (t <= 0) t = 1;
    t = std::min<long>(t, 16);
    t = std::min<long>(t, (long)((jobs + 63) / 64));
    return std::max<long>(t, 1L);
}

template <class R>
std::vector<Int> transfer_traces(const R& rg, const MonoTable& tab, const MatrixTuple& g,
                                 const std::vector<int>& gl, size_t gln,
                                 const std::vector<Int>& tei, long depth) {
    using Elem = typename R::Elem;
    const int d = g.dim(), dd = d * d, s = tab.s;
    const long ell = rg.ell;

    std::vector<std::vector<Elem>> gW((size_t)s + 1, std::vector<Elem>((size_t)dd));
    std::vector<std::vector<int>> gbar((size_t)s + 1, std::vector<int>((size_t)dd));
    for (int t = 0; t <= s; ++t)
        for (int i = 0; i < dd; ++i) {
            const Int& v = g.mat(t).a[(size_t)i];
            gW[(size_t)t][(size_t)i] = rg.enter(v);
            gbar[(size_t)t][(size_t)i] = mod_norm(v, Int(ell)).template convert_to<int>();
        }

    auto block = [&](size_t lo, size_t hi, std::vector<Elem>& acc) {
        TCalc<R> calc(rg, &tab, d);
        std::vector<std::vector<Elem>> xe((size_t)s + 1);
        for (size_t h = lo; h < hi; ++h) {
            const int* hm = &gl[h * (size_t)dd];
            std::vector<Elem> lh((size_t)dd);
            for (int i = 0; i < dd; ++i) lh[(size_t)i] = rg.enter(tei[(size_t)hm[i]]);
            for (int t = 0; t <= s; ++t) {
                std::vector<Elem> lr((size_t)dd);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) {
                        long v = 0;
                        for (int k = 0; k < d; ++k)
                            v += (long)hm[i * d + k] * gbar[(size_t)t][(size_t)(k * d + j)];
                        lr[(size_t)(i * d + j)] = rg.enter(tei[(size_t)(v % ell)]);
                    }
                auto inv = mat_inverse(rg, lr, d);
                auto u = cmul(rg, cmul(rg, lh, gW[(size_t)t], d), inv, d);
                for (int i = 0; i < d; ++i)
                    u[(size_t)(i * d + i)] = rg.sub(u[(size_t)(i * d + i)], rg.one());
                for (int i = 0; i < dd; ++i)
                    require(rg.div_ell(u[(size_t)i]), ErrorKind::CertificateMismatch,
                            "transfer summand escapes K_1");
                xe[(size_t)t] = std::move(u);
            }
            auto T = t_pipeline(calc, xe);
            for (size_t r = 0; r < tab.count(); ++r) {
                Elem tr = rg.zero();
                for (int i = 0; i < d; ++i)
                    tr = rg.add(tr, T[r * (size_t)dd + (size_t)(i * d + i)]);
                acc[r] = rg.add(acc[r], tr);
            }
        }
    };

    long nt = thread_count(gln);
    std::vector<std::vector<Elem>> accs((size_t)nt,
                                        std::vector<Elem>(tab.count(), rg.zero()));
    if (nt == 1) {
        block(0, gln, accs[0]);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs((size_t)nt);
        size_t step = (gln + (size_t)nt - 1) / (size_t)nt;
        for (long t = 0; t < nt; ++t) {
            size_t lo = (size_t)t * step, hi = std::min(gln, lo + step);
            pool.emplace_back([&, t, lo, hi] {
                try {
                    if (lo < hi) block(lo, hi, accs[(size_t)t]);
                } catch (...) {
                    errs[(size_t)t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }
    std::vector<Elem> acc(tab.count(), rg.zero());
    for (const auto& part : accs)
        for (size_t r = 0; r < tab.count(); ++r) acc[r] = rg.add(acc[r], part[r]);

    // summand traces sit in the depth filtration, so their sum does too
    std::vector<Int> out(tab.count());
    for (size_t r = 0; r < tab.count(); ++r) {
        out[r] = rg.lift(acc[r]);
        long bound = std::min(depth * (tab.deg[r] + (long)s), rg.wexp);
        if (bound > 0)
            require(mod_norm(out[r], pow_int(Int(ell), bound)) == 0,
                    ErrorKind::CertificateMismatch,
                    "transfer trace escapes its filtration bound");
    }
    return out;
}

}  // namespace

RegulatorValue psi_transfer(const MatrixTuple& g, int s, long cutoff) {
    const RingPtr& ring = g.ring();
    require(s == g.s(), ErrorKind::Validation, "tuple length does not match s");
    require(s % 2 == 1, ErrorKind::Validation, "s must be odd");
    require(cutoff >= 0, ErrorKind::Validation, "cutoff must be nonnegative");
    const long ell = ring->ell();
    const int d = g.dim();
    bool small = (ell == 3 && d <= 3) || ((ell == 5 || ell == 7) && d <= 2) ||
                 (d == 1 && ell <= 65536);
    require(small, ErrorKind::TooLarge, "transfer average too large for this ell and d");

    const long P = ring->P();
    long depth = g.in_k1() ? g.depth() : 1;
    Rat tail = regulator_tail_exponent(ell, 1, depth, s, cutoff);
    Rat combined = std::min(tail, Rat(P));
    require(combined > 0, ErrorKind::PrecisionExhausted, "no certified digits at this precision");

    MonoTable tab(s, cutoff);
    WeightTable wt = weights_for(tab, ell);
    long tv = (long)d * (d - 1) / 2;  // v_ell of prod (ell^d - ell^i)
    long W = std::min(P, rat_ceil_long(tail)) + wt.maxw + tv;
    Int modW = pow_int(Int(ell), W);

    std::vector<int> gl = enumerate_gl(ell, d);
    size_t gln = gl.size() / (size_t)(d * d);
    Int expect = 1;
    for (int i = 0; i < d; ++i) expect *= pow_int(Int(ell), d) - pow_int(Int(ell), i);
    require(Int((unsigned long long)gln) == expect, ErrorKind::CertificateMismatch,
            "residue group enumeration mismatch");
    std::vector<Int> tei = teich_table(ell, modW);

    std::vector<Int> tr;
    if (fits_long(modW, d)) {
        LongRing rg{modW.convert_to<long>(), ell, W};
        tr = transfer_traces(rg, tab, g, gl, gln, tei, depth);
    } else {
        IntRing rg{modW, ell, W};
        tr = transfer_traces(rg, tab, g, gl, gln, tei, depth);
    }
    return assemble_phi(ring, tr, wt, combined, cutoff, Int((unsigned long long)gln));
}

RegulatorValue evaluate_chain(const RingPtr& ring, const MatChain& c, long cutoff) {
    require(ring != nullptr && ring->e() == 1, ErrorKind::Validation,
            "chain evaluation needs an e = 1 ring");
    require(c.degree() == 3, ErrorKind::Validation, "chain evaluation is defined in degree 3");
    Int modP = pow_int(Int(ring->ell()), ring->P());
    require(c.modulus() == modP, ErrorKind::Validation, "chain modulus must equal ell^P");
    PadicScalar val = PadicScalar::zero(ring);
    std::optional<Rat> cert;
    for (const auto& [ids, co] : c.terms()) {
        const ModMatrix& g1 = c.pool(ids[0]);
        ModMatrix p1 = g1;
        ModMatrix p2 = p1.mul(c.pool(ids[1]));
        ModMatrix p3 = p2.mul(c.pool(ids[2]));
        MatrixTuple tup(ring, {ModMatrix::identity(g1.d, modP), p1, p2, p3});
        RegulatorValue rv = tup.in_k1() ? phi_tilde(tup, 3, cutoff) : psi_transfer(tup, 3, cutoff);
        val = val + PadicScalar::from_int(ring, co) * rv.value;
        if (rv.certified_exp)
            cert = cert ? std::min(*cert, *rv.certified_exp) : *rv.certified_exp;
    }
    return {val, cert, cutoff};
}

// ---------------------------------------------------------------------------
// series entries

SeriesMatrixTuple::SeriesMatrixTuple(std::vector<std::vector<TruncSeries>> mats)
    : m_mats(std::move(mats)) {
    require(!m_mats.empty(), ErrorKind::Validation, "empty tuple");
    size_t sz = m_mats[0].size();
    require(sz >= 1, ErrorKind::Validation, "empty matrices");
    while ((size_t)m_d * m_d < sz) ++m_d;
    require((size_t)m_d * m_d == sz, ErrorKind::Validation, "entries must form square matrices");
    m_ring = m_mats[0][0].ring();
    m_vars = m_mats[0][0].vars();
    m_order = m_mats[0][0].order();
    TruncSeries one = TruncSeries::constant_int(m_ring, m_vars, m_order, Int(1));
    long best = m_order;
    for (const auto& mt : m_mats) {
        require(mt.size() == sz, ErrorKind::Validation, "mixed matrix sizes");
        for (size_t t = 0; t < sz; ++t) {
            require(mt[t].vars() == m_vars && mt[t].order() == m_order, ErrorKind::Validation,
                    "mixed series shapes");
            size_t i = t / (size_t)m_d, j = t % (size_t)m_d;
            TruncSeries diff = (i == j) ? mt[t] - one : mt[t];
            best = std::min(best, diff.order_lower());
        }
    }
    m_depth = best;
}

RegulatorSeriesValue phi_s(const RingPtr& ring, const std::vector<std::vector<TruncSeries>>& x,
                           int s, long cutoff) {
    require(ring != nullptr, ErrorKind::Validation, "null ring");
    require(s >= 1 && s % 2 == 1, ErrorKind::Validation, "s must be odd");
    require(cutoff >= 0, ErrorKind::Validation, "cutoff must be nonnegative");
    require((long)x.size() == (long)s + 1, ErrorKind::Validation, "tuple must have s + 1 entries");
    size_t sz = x[0].size();
    require(sz >= 1, ErrorKind::Validation, "empty matrices");
    int d = 1;
    while ((size_t)d * d < sz) ++d;
    require((size_t)d * d == sz, ErrorKind::Validation, "entries must form square matrices");
    const int m = x[0][0].vars();
    const long n = x[0][0].order();
    long depth = n;
    bool allz = true;
    for (const auto& mt : x) {
        require(mt.size() == sz, ErrorKind::Validation, "mixed matrix sizes");
        for (const auto& e : mt) {
            require(e.vars() == m && e.order() == n, ErrorKind::Validation, "mixed series shapes");
            if (!e.is_zero()) {
                allz = false;
                depth = std::min(depth, e.order_lower());
            }
        }
    }
    if (allz) return {TruncSeries::constant_int(ring, m, n, Int(0)), std::nullopt, cutoff};
    require(depth >= 1, ErrorKind::DepthZero, "tuple entries must vanish to first order");
    // depth is mm-adic weight here, which is what the pi-unit bound expects
    Rat tail = regulator_tail_exponent(ring->ell(), ring->e(), depth, s, cutoff);
    require(tail > 0, ErrorKind::PrecisionExhausted, "no certified digits at this order");
    MonoTable tab(s, cutoff);
    WeightTable wt = weights_for(tab, ring->ell());
    SeriesRing rg{ring, m, n};
    TCalc<SeriesRing> calc(rg, &tab, d);
    auto T = t_pipeline(calc, x);
    const int dd = d * d;
    TruncSeries acc = TruncSeries::constant_int(ring, m, n, Int(0));
    for (size_t r = 0; r < tab.count(); ++r) {
        long bound = std::min(depth * (tab.deg[r] + (long)s), n);
        for (int i = 0; i < dd; ++i)
            require(T[r * (size_t)dd + (size_t)i].order_lower() >= bound,
                    ErrorKind::CertificateMismatch,
                    "expansion coefficient escapes its filtration bound");
        TruncSeries tr = T[r * (size_t)dd];
        for (int i = 1; i < d; ++i) tr = tr + T[r * (size_t)dd + (size_t)(i * d + i)];
        if (!tr.is_zero()) acc = acc + tr.scale(PadicScalar::from_rat(ring, -wt.mult[r]));
    }
    long n2 = std::min(n, rat_ceil_long(Rat(ring->e()) * tail));
    if (n2 < n) acc = acc.restrict_order(n2);
    return {acc, tail, cutoff};
}

RegulatorSeriesValue phi_tilde(const SeriesMatrixTuple& g, int s, long cutoff) {
    require(g.depth() >= 1, ErrorKind::NotInK1, "tuple must be trivial to first order");
    TruncSeries one = TruncSeries::constant_int(g.ring(), g.vars(), g.order(), Int(1));
    std::vector<std::vector<TruncSeries>> x;
    x.reserve((size_t)g.s() + 1);
    for (int t = 0; t <= g.s(); ++t) {
        std::vector<TruncSeries> xm;
        xm.reserve((size_t)g.dim() * g.dim());
        for (int i = 0; i < g.dim(); ++i)
            for (int j = 0; j < g.dim(); ++j) {
                const TruncSeries& e = g.mat(t)[(size_t)(i * g.dim() + j)];
                xm.push_back(i == j ? e - one : e);
            }
        x.push_back(std::move(xm));
    }
    return phi_s(g.ring(), x, s, cutoff);
}

}  // namespace elladic
