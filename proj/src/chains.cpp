#include "elladic/chains.hpp"

#include <algorithm>
#include <climits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace elladic {

namespace {

void check_group_table(const std::vector<std::vector<int>>& mul) {
    int n = (int)mul.size();
    require(n > 0, ErrorKind::Validation, "group table is empty");
    for (const auto& row : mul) {
        require((int)row.size() == n, ErrorKind::Validation, "group table is not square");
        for (int x : row)
            require(0 <= x && x < n, ErrorKind::Validation, "group table entry out of range");
    }
    for (int a = 0; a < n; ++a) {
        require(mul[0][a] == a && mul[a][0] == a, ErrorKind::Validation,
                "identity is not at index 0");
    }
    // latin square: rows and columns are permutations
    for (int a = 0; a < n; ++a) {
        std::vector<char> seen_r(n, 0), seen_c(n, 0);
        for (int b = 0; b < n; ++b) {
            require(!seen_r[mul[a][b]], ErrorKind::Validation, "group row repeats an element");
            require(!seen_c[mul[b][a]], ErrorKind::Validation, "group column repeats an element");
            seen_r[mul[a][b]] = 1;
            seen_c[mul[b][a]] = 1;
        }
    }
    if (n <= 64) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    require(mul[mul[a][b]][c] == mul[a][mul[b][c]], ErrorKind::Validation,
                            "group table is not associative");
    } else {
        std::mt19937 rng(9176);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int s = 0; s < 20000; ++s) {
            int a = pick(rng), b = pick(rng), c = pick(rng);
            require(mul[mul[a][b]][c] == mul[a][mul[b][c]], ErrorKind::Validation,
                    "group table is not associative");
        }
    }
}

} // namespace

GroupPtr FiniteGroup::from_table(std::vector<std::vector<int>> mul,
                                 std::vector<std::string> labels) {
    check_group_table(mul);
    int n = (int)mul.size();
    if (labels.empty()) {
        labels.reserve(n);
        for (int i = 0; i < n; ++i) labels.push_back("g" + std::to_string(i));
    }
    require((int)labels.size() == n, ErrorKind::Validation, "label count mismatch");
    auto g = std::shared_ptr<FiniteGroup>(new FiniteGroup());
    g->m_mul = std::move(mul);
    g->m_labels = std::move(labels);
    g->m_inv.assign(n, -1);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            if (g->m_mul[a][b] == 0) {
                require(g->m_mul[b][a] == 0, ErrorKind::Validation,
                        "one-sided inverse in group table");
                g->m_inv[a] = b;
                break;
            }
        }
        require(g->m_inv[a] >= 0, ErrorKind::Validation, "group element has no inverse");
    }
    return g;
}

GroupPtr FiniteGroup::cyclic(int n) {
    require(n >= 1, ErrorKind::Validation, "cyclic group needs n >= 1");
    std::vector<std::vector<int>> mul(n, std::vector<int>(n));
    std::vector<std::string> labels(n);
    for (int a = 0; a < n; ++a) {
        labels[a] = std::to_string(a);
        for (int b = 0; b < n; ++b) mul[a][b] = (a + b) % n;
    }
    return from_table(std::move(mul), std::move(labels));
}

GroupPtr FiniteGroup::direct_product(const GroupPtr& a, const GroupPtr& b) {
    require(a && b, ErrorKind::Validation, "direct product of null groups");
    int na = a->order(), nb = b->order();
    int n = na * nb;
    require(n <= 100000, ErrorKind::TooLarge, "product group too large");
    auto idx = [&](int x, int y) { return x + na * y; };
    std::vector<std::vector<int>> mul(n, std::vector<int>(n));
    std::vector<std::string> labels(n);
    for (int y = 0; y < nb; ++y)
        for (int x = 0; x < na; ++x)
            labels[idx(x, y)] = "(" + a->label(x) + "," + b->label(y) + ")";
    for (int y1 = 0; y1 < nb; ++y1)
        for (int x1 = 0; x1 < na; ++x1)
            for (int y2 = 0; y2 < nb; ++y2)
                for (int x2 = 0; x2 < na; ++x2)
                    mul[idx(x1, y1)][idx(x2, y2)] = idx(a->mul(x1, x2), b->mul(y1, y2));
    return from_table(std::move(mul), std::move(labels));
}

GroupPtr FiniteGroup::symmetric(int n) {
    require(1 <= n && n <= 6, ErrorKind::Validation, "symmetric group supported for n <= 6");
    std::vector<int> base(n);
    for (int i = 0; i < n; ++i) base[i] = i;
    std::vector<std::vector<int>> perms;
    std::vector<int> p = base;
    do {
        perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    // lexicographic order puts the identity first
    std::map<std::vector<int>, int> index;
    for (int i = 0; i < (int)perms.size(); ++i) index[perms[i]] = i;
    int m = (int)perms.size();
    std::vector<std::vector<int>> mul(m, std::vector<int>(m));
    std::vector<std::string> labels(m);
    for (int i = 0; i < m; ++i) {
        std::string s;
        for (int x : perms[i]) s += std::to_string(x);
        labels[i] = s;
        for (int j = 0; j < m; ++j) {
            std::vector<int> comp(n);
            for (int x = 0; x < n; ++x) comp[x] = perms[i][perms[j][x]];
            mul[i][j] = index[comp];
        }
    }
    return from_table(std::move(mul), std::move(labels));
}

BarChain::BarChain(GroupPtr g, int degree, long ell, int k)
    : m_group(std::move(g)), m_degree(degree), m_ell(ell), m_k(k) {
    require(m_group != nullptr, ErrorKind::Validation, "chain needs a group");
    require(degree >= 0, ErrorKind::Validation, "chain degree must be >= 0");
    require(ell >= 2, ErrorKind::Validation, "coefficient modulus needs ell >= 2");
    require(k >= 1, ErrorKind::Validation, "coefficient modulus needs k >= 1");
    m_mod = pow_int(Int(ell), k);
}

BarChain BarChain::from_tuple(GroupPtr g, const std::vector<int>& t, long ell, int k,
                              const Int& coeff) {
    BarChain c(std::move(g), (int)t.size(), ell, k);
    c.add_term(t, coeff);
    return c;
}

void BarChain::add_term(const std::vector<int>& t, const Int& c) {
    require((int)t.size() == m_degree, ErrorKind::Validation, "tuple length != chain degree");
    for (int x : t)
        require(0 <= x && x < m_group->order(), ErrorKind::Validation,
                "tuple entry outside the group");
    Int v = mod_norm(m_terms.count(t) ? m_terms[t] + c : c, m_mod);
    if (v == 0)
        m_terms.erase(t);
    else
        m_terms[t] = v;
}

Int BarChain::coeff(const std::vector<int>& t) const {
    auto it = m_terms.find(t);
    return it == m_terms.end() ? Int(0) : it->second;
}

void BarChain::check_compat(const BarChain& o) const {
    require(m_group->same(*o.m_group), ErrorKind::Validation, "chains over different groups");
    require(m_degree == o.m_degree, ErrorKind::Validation, "chains of different degree");
    require(m_ell == o.m_ell && m_k == o.m_k, ErrorKind::Validation,
            "chains over different coefficient rings");
}

BarChain BarChain::operator+(const BarChain& o) const {
    check_compat(o);
    BarChain r = *this;
    for (const auto& [t, c] : o.m_terms) r.add_term(t, c);
    return r;
}

BarChain BarChain::operator-() const {
    BarChain r(m_group, m_degree, m_ell, m_k);
    for (const auto& [t, c] : m_terms) r.add_term(t, m_mod - c);
    return r;
}

BarChain BarChain::operator-(const BarChain& o) const { return *this + (-o); }

BarChain BarChain::scaled(const Int& c) const {
    BarChain r(m_group, m_degree, m_ell, m_k);
    for (const auto& [t, v] : m_terms) r.add_term(t, c * v);
    return r;
}

bool BarChain::operator==(const BarChain& o) const {
    return m_group->same(*o.m_group) && m_degree == o.m_degree && m_ell == o.m_ell &&
           m_k == o.m_k && m_terms == o.m_terms;
}

BarChain BarChain::boundary() const {
    require(m_degree >= 1, ErrorKind::Validation, "boundary needs degree >= 1");
    int n = m_degree;
    BarChain r(m_group, n - 1, m_ell, m_k);
    for (const auto& [t, c] : m_terms) {
        std::vector<int> u(t.begin() + 1, t.end());
        r.add_term(u, c);
        Int s = m_mod - 1; // running sign (-1)^i
        for (int i = 1; i <= n - 1; ++i) {
            u.assign(t.begin(), t.end());
            u[i - 1] = m_group->mul(t[i - 1], t[i]);
            u.erase(u.begin() + i);
            r.add_term(u, s * c);
            s = m_mod - s;
        }
        u.assign(t.begin(), t.end() - 1);
        r.add_term(u, s * c);
    }
    return r;
}

bool BarChain::is_cycle() const { return m_degree == 0 || boundary().is_zero(); }

std::string BarChain::str() const {
    if (m_terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [t, c] : m_terms) {
        if (!first) os << " + ";
        first = false;
        if (c != 1 || t.empty()) os << c << "*";
        os << "[";
        for (size_t i = 0; i < t.size(); ++i) {
            if (i) os << "|";
            os << m_group->label(t[i]);
        }
        os << "]";
    }
    return os.str();
}

BarChain inn_chain(const BarChain& c, int h) {
    const auto& g = c.group();
    require(0 <= h && h < g->order(), ErrorKind::Validation, "conjugator outside the group");
    BarChain r(g, c.degree(), c.ell(), c.prec());
    for (const auto& [t, v] : c.terms()) {
        std::vector<int> u(t.size());
        for (size_t i = 0; i < t.size(); ++i) u[i] = g->conj(h, t[i]);
        r.add_term(u, v);
    }
    return r;
}

BarChain homotopy_F(const BarChain& c, int h) {
    const auto& g = c.group();
    require(0 <= h && h < g->order(), ErrorKind::Validation, "conjugator outside the group");
    int n = c.degree();
    int hi = g->inv(h);
    BarChain r(g, n + 1, c.ell(), c.prec());
    for (const auto& [t, v] : c.terms()) {
        Int s = 1;
        for (int pos = 0; pos <= n; ++pos) {
            std::vector<int> u;
            u.reserve(n + 1);
            for (int j = 0; j < pos; ++j) u.push_back(t[j]);
            u.push_back(hi);
            for (int j = pos; j < n; ++j) u.push_back(g->conj(h, t[j]));
            r.add_term(u, s * v);
            s = c.modulus() - s;
        }
    }
    return r;
}

GroupAutomorphism GroupAutomorphism::from_perm(GroupPtr g, std::vector<int> perm) {
    require(g != nullptr, ErrorKind::Validation, "automorphism needs a group");
    int n = g->order();
    require((int)perm.size() == n, ErrorKind::Validation, "automorphism size mismatch");
    std::vector<char> seen(n, 0);
    for (int x : perm) {
        require(0 <= x && x < n && !seen[x], ErrorKind::Validation,
                "automorphism is not a bijection");
        seen[x] = 1;
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            require(perm[g->mul(a, b)] == g->mul(perm[a], perm[b]), ErrorKind::Validation,
                    "map is not multiplicative");
    return GroupAutomorphism(std::move(g), std::move(perm));
}

GroupAutomorphism GroupAutomorphism::conjugation(GroupPtr g, int h) {
    require(g != nullptr, ErrorKind::Validation, "automorphism needs a group");
    require(0 <= h && h < g->order(), ErrorKind::Validation, "conjugator outside the group");
    std::vector<int> perm(g->order());
    for (int a = 0; a < g->order(); ++a) perm[a] = g->conj(h, a);
    return from_perm(std::move(g), std::move(perm));
}

BarChain GroupAutomorphism::apply(const BarChain& c) const {
    require(m_group->same(*c.group()), ErrorKind::Validation, "chain over a different group");
    BarChain r(c.group(), c.degree(), c.ell(), c.prec());
    for (const auto& [t, v] : c.terms()) {
        std::vector<int> u(t.size());
        for (size_t i = 0; i < t.size(); ++i) u[i] = m_perm[t[i]];
        r.add_term(u, v);
    }
    return r;
}

GroupAutomorphism GroupAutomorphism::compose(const GroupAutomorphism& o) const {
    require(m_group->same(*o.m_group), ErrorKind::Validation,
            "composing automorphisms of different groups");
    std::vector<int> perm(m_perm.size());
    for (size_t a = 0; a < perm.size(); ++a) perm[a] = m_perm[o.m_perm[a]];
    return GroupAutomorphism(m_group, std::move(perm));
}

GroupAutomorphism GroupAutomorphism::inverse() const {
    std::vector<int> perm(m_perm.size());
    for (size_t a = 0; a < perm.size(); ++a) perm[m_perm[a]] = (int)a;
    return GroupAutomorphism(m_group, std::move(perm));
}

bool GroupAutomorphism::is_identity() const {
    for (size_t a = 0; a < m_perm.size(); ++a)
        if (m_perm[a] != (int)a) return false;
    return true;
}

namespace {

constexpr long kTupleBudget = 10000000;

long pow_or_fail(long base, int exp, long cap) {
    long r = 1;
    for (int i = 0; i < exp; ++i) {
        require(r <= cap / base, ErrorKind::TooLarge, "tuple space exceeds the budget");
        r *= base;
    }
    return r;
}

long val_long(long x, long ell, int cap) {
    long v = 0;
    while (v < cap && x % ell == 0) {
        x /= ell;
        ++v;
    }
    return v;
}

// Sparse row echelon over Z/ell^k.  The pivot is the entry of minimal
// valuation in the remaining rows, ties to the lowest column then row; with
// that choice pivot valuations never decrease, so back substitution with
// free variables set to zero decides solvability exactly.
struct Elim {
    long ell;
    int k;
    long mod;
    std::vector<std::map<long, long>> rows;
    std::vector<std::tuple<int, int, long>> ops;
    std::vector<std::pair<int, long>> pivots;
    std::vector<long> pivot_val;
    std::vector<long> ellpow;

    Elim(long ell_, int k_) : ell(ell_), k(k_) {
        mod = 1;
        ellpow.assign(k + 1, 1);
        for (int i = 1; i <= k; ++i) {
            require(mod <= (1L << 31) / ell, ErrorKind::TooLarge,
                    "modulus too large for the linear solver");
            mod *= ell;
            ellpow[i] = mod;
        }
    }

    void run(bool record_ops) {
        int nrows = (int)rows.size();
        std::vector<char> done(nrows, 0), dirty(nrows, 1);
        std::vector<long> best_val(nrows, LONG_MAX), best_col(nrows, -1);
        std::unordered_map<long, std::vector<int>> by_col;
        for (int r = 0; r < nrows; ++r)
            for (const auto& [c, v] : rows[r]) by_col[c].push_back(r);

        auto refresh = [&](int r) {
            best_val[r] = LONG_MAX;
            best_col[r] = -1;
            for (const auto& [c, v] : rows[r]) {
                long w = val_long(v, ell, k);
                if (w < best_val[r]) {
                    best_val[r] = w;
                    best_col[r] = c;
                    if (w == 0) break;
                }
            }
            dirty[r] = 0;
        };

        while (true) {
            long bv = LONG_MAX, bc = -1;
            int br = -1;
            for (int r = 0; r < nrows; ++r) {
                if (done[r] || rows[r].empty()) continue;
                if (dirty[r]) refresh(r);
                if (best_val[r] < bv || (best_val[r] == bv && best_col[r] < bc)) {
                    bv = best_val[r];
                    bc = best_col[r];
                    br = r;
                }
            }
            if (br < 0) break;
            done[br] = 1;
            pivots.emplace_back(br, bc);
            pivot_val.push_back(bv);
            long piv = rows[br].at(bc);
            long puinv = (long)Int(inv_mod(Int(piv / ellpow[bv]), Int(mod)));
            std::vector<int> adj = by_col[bc];
            for (int q : adj) {
                if (done[q] || q == br) continue;
                auto it = rows[q].find(bc);
                if (it == rows[q].end()) continue; // stale adjacency entry
                long m = it->second / ellpow[bv] % mod * puinv % mod;
                if (m == 0) continue;
                for (const auto& [c, pv] : rows[br]) {
                    auto [jt, fresh] = rows[q].try_emplace(c, 0);
                    long nv = (jt->second - m * pv) % mod;
                    if (nv < 0) nv += mod;
                    if (nv == 0) {
                        rows[q].erase(jt);
                    } else {
                        jt->second = nv;
                        if (fresh) by_col[c].push_back(q);
                    }
                }
                if (record_ops) ops.emplace_back(q, br, m);
                dirty[q] = 1;
            }
        }
    }
};

long encode_tuple(const std::vector<int>& t, long order) {
    long code = 0;
    for (size_t i = t.size(); i-- > 0;) code = code * order + t[i];
    return code;
}

// rows of the boundary C_{n+1} -> C_n, indexed by encoded degree-n tuples
void build_boundary_rows(Elim& el, const FiniteGroup& g, int n, long nrows, long ncols) {
    el.rows.assign(nrows, {});
    long order = g.order();
    std::vector<int> t(n + 1);
    for (long col = 0; col < ncols; ++col) {
        long rem = col;
        for (int i = 0; i <= n; ++i) {
            t[i] = (int)(rem % order);
            rem /= order;
        }
        auto touch = [&](long row, long s) {
            long& e = el.rows[row][col];
            e = (e + s) % el.mod;
            if (e < 0) e += el.mod;
            if (e == 0) el.rows[row].erase(col);
        };
        long face = 0;
        for (int i = n; i >= 1; --i) face = face * order + t[i];
        touch(face, 1);
        long s = -1;
        for (int i = 1; i <= n; ++i) {
            face = 0;
            for (int j = n; j >= 0; --j) {
                if (j == i) continue;
                face = face * order + (j == i - 1 ? g.mul(t[i - 1], t[i]) : t[j]);
            }
            touch(face, s);
            s = -s;
        }
        face = 0;
        for (int i = n - 1; i >= 0; --i) face = face * order + t[i];
        touch(face, s);
    }
}

} // namespace

BoundarySolver::BoundarySolver(GroupPtr g, int degree, long ell, int k)
    : m_group(std::move(g)), m_degree(degree), m_ell(ell), m_k(k) {
    require(m_group != nullptr, ErrorKind::Validation, "solver needs a group");
    require(degree >= 0, ErrorKind::Validation, "solver degree must be >= 0");
    long order = m_group->order();
    m_cols = pow_or_fail(order, degree + 1, kTupleBudget);
    long nrows = pow_or_fail(order, degree, kTupleBudget);
    Elim el(ell, k);
    m_mod = el.mod;
    build_boundary_rows(el, *m_group, degree, nrows, m_cols);
    el.run(true);
    m_rows = std::move(el.rows);
    m_ops = std::move(el.ops);
    m_pivots = std::move(el.pivots);
    m_pivot_val = std::move(el.pivot_val);
}

BarChain BoundarySolver::solve(const BarChain& z) const {
    require(m_group->same(*z.group()), ErrorKind::Validation, "chain over a different group");
    require(z.degree() == m_degree, ErrorKind::Validation, "chain degree != solver degree");
    require(z.ell() == m_ell && z.prec() == m_k, ErrorKind::Validation,
            "chain modulus != solver modulus");
    require(z.is_cycle(), ErrorKind::NotACycle, "right-hand side is not closed");

    long order = m_group->order();
    std::vector<long> w(m_rows.size(), 0);
    for (const auto& [t, c] : z.terms()) w[encode_tuple(t, order)] = (long)Int(c % m_mod);
    for (const auto& [tgt, src, m] : m_ops) {
        w[tgt] = (w[tgt] - m * w[src]) % m_mod;
        if (w[tgt] < 0) w[tgt] += m_mod;
    }

    std::vector<char> is_pivot(m_rows.size(), 0);
    for (const auto& [r, c] : m_pivots) is_pivot[r] = 1;
    for (size_t r = 0; r < m_rows.size(); ++r)
        require(is_pivot[r] || w[r] % m_mod == 0, ErrorKind::NoSolution,
                "class is nonzero, no boundary preimage");

    std::map<long, long> x;
    std::vector<long> ellpow(m_k + 1, 1);
    for (int i = 1; i <= m_k; ++i) ellpow[i] = ellpow[i - 1] * m_ell;
    for (size_t i = m_pivots.size(); i-- > 0;) {
        auto [r, pc] = m_pivots[i];
        long a = m_pivot_val[i];
        long rhs = w[r];
        for (const auto& [c, v] : m_rows[r]) {
            if (c == pc) continue;
            auto it = x.find(c);
            if (it == x.end()) continue;
            rhs = (rhs - v * it->second) % m_mod;
            if (rhs < 0) rhs += m_mod;
        }
        require(rhs % ellpow[a] == 0, ErrorKind::NoSolution,
                "class is nonzero, no boundary preimage");
        long pu = m_rows[r].at(pc) / ellpow[a];
        long puinv = (long)Int(inv_mod(Int(pu), Int(m_mod)));
        long xv = rhs / ellpow[a] % m_mod * puinv % ellpow[m_k - a];
        if (xv != 0) x[pc] = xv;
    }

    BarChain d(m_group, m_degree + 1, m_ell, m_k);
    std::vector<int> t(m_degree + 1);
    for (const auto& [col, v] : x) {
        long rem = col;
        for (int i = 0; i <= m_degree; ++i) {
            t[i] = (int)(rem % order);
            rem /= order;
        }
        d.add_term(t, Int(v));
    }
    return d;
}

BarChain solve_boundary(const BarChain& z) {
    BoundarySolver solver(z.group(), z.degree(), z.ell(), z.prec());
    return solver.solve(z);
}

std::vector<Int> homology_divisors(const GroupPtr& g, int degree, long ell, int k) {
    require(g != nullptr, ErrorKind::Validation, "homology needs a group");
    require(degree >= 1, ErrorKind::Validation, "homology degree must be >= 1");
    long order = g->order();
    long ncols = pow_or_fail(order, degree + 1, kTupleBudget);
    long nrows = ncols / order;
    Elim el(ell, k);
    build_boundary_rows(el, *g, degree, nrows, ncols);
    el.run(false);

    // H_j is finite for j >= 1, so the rational rank of each boundary map
    // follows from the chain dimensions alone:
    //   rank d_1 = 0,  rank d_{m+1} = |G|^m - rank d_m
    long rank = 0;
    for (int m = 1; m <= degree; ++m) {
        long dim = 1;
        for (int i = 0; i < m; ++i) dim *= order;
        rank = dim - rank;
    }
    long visible = (long)el.pivots.size();
    require(visible <= rank, ErrorKind::Validation, "homology rank bookkeeping failed");

    std::vector<long> exps;
    for (long a : el.pivot_val)
        if (a > 0) exps.push_back(a);
    // integral divisors with valuation >= k reduce to zero and leave no
    // pivot; they are exactly the missing rank
    for (long i = 0; i < rank - visible; ++i) exps.push_back(k);
    std::sort(exps.begin(), exps.end());
    std::vector<Int> divisors;
    for (long a : exps) divisors.push_back(pow_int(Int(ell), a));
    return divisors;
}

ModMatrix ModMatrix::identity(int d, const Int& mod) {
    ModMatrix m = zero(d, mod);
    for (int i = 0; i < d; ++i) m.at(i, i) = mod_norm(1, mod);
    return m;
}

ModMatrix ModMatrix::zero(int d, const Int& mod) {
    require(d >= 1, ErrorKind::Validation, "matrix dimension must be >= 1");
    require(mod >= 2, ErrorKind::Validation, "matrix modulus must be >= 2");
    ModMatrix m;
    m.d = d;
    m.mod = mod;
    m.a.assign((size_t)d * d, Int(0));
    return m;
}

void ModMatrix::reduce() {
    for (auto& x : a) x = mod_norm(x, mod);
}

ModMatrix ModMatrix::mul(const ModMatrix& o) const {
    require(d == o.d && mod == o.mod, ErrorKind::Validation, "matrix shape mismatch");
    ModMatrix r = zero(d, mod);
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) {
            const Int& x = at(i, l);
            if (x == 0) continue;
            for (int j = 0; j < d; ++j) r.at(i, j) += x * o.at(l, j);
        }
    r.reduce();
    return r;
}

ModMatrix ModMatrix::add(const ModMatrix& o) const {
    require(d == o.d && mod == o.mod, ErrorKind::Validation, "matrix shape mismatch");
    ModMatrix r = *this;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = mod_norm(r.a[i] + o.a[i], mod);
    return r;
}

ModMatrix ModMatrix::sub(const ModMatrix& o) const {
    require(d == o.d && mod == o.mod, ErrorKind::Validation, "matrix shape mismatch");
    ModMatrix r = *this;
    for (size_t i = 0; i < a.size(); ++i) r.a[i] = mod_norm(r.a[i] - o.a[i], mod);
    return r;
}

ModMatrix ModMatrix::scaled(const Int& c) const {
    ModMatrix r = *this;
    for (auto& x : r.a) x = mod_norm(x * c, mod);
    return r;
}

Int ModMatrix::trace() const {
    Int t = 0;
    for (int i = 0; i < d; ++i) t += at(i, i);
    return mod_norm(t, mod);
}

namespace {

Int det_minor(const ModMatrix& m, std::vector<int>& cols, int row) {
    if (row == m.d) return 1;
    Int acc = 0;
    Int sign = 1;
    for (size_t i = 0; i < cols.size(); ++i) {
        int c = cols[i];
        if (c < 0) continue;
        if (m.at(row, c) != 0) {
            cols[i] = -1;
            acc += sign * m.at(row, c) * det_minor(m, cols, row + 1);
            cols[i] = c;
        }
        sign = -sign;
    }
    return acc;
}

} // namespace

Int ModMatrix::det() const {
    std::vector<int> cols(d);
    for (int i = 0; i < d; ++i) cols[i] = i;
    return mod_norm(det_minor(*this, cols, 0), mod);
}

namespace {

Int gcd_int(Int a, Int b) {
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

} // namespace

ModMatrix ModMatrix::inverse() const {
    ModMatrix m = *this;
    ModMatrix r = identity(d, mod);
    for (int c = 0; c < d; ++c) {
        int pr = -1;
        for (int i = c; i < d && pr < 0; ++i)
            if (gcd_int(m.at(i, c), mod) == 1) pr = i;
        require(pr >= 0, ErrorKind::NonUnit, "matrix is not invertible at this modulus");
        if (pr != c)
            for (int j = 0; j < d; ++j) {
                std::swap(m.at(c, j), m.at(pr, j));
                std::swap(r.at(c, j), r.at(pr, j));
            }
        Int pi = inv_mod(m.at(c, c), mod);
        for (int j = 0; j < d; ++j) {
            m.at(c, j) = mod_norm(m.at(c, j) * pi, mod);
            r.at(c, j) = mod_norm(r.at(c, j) * pi, mod);
        }
        for (int i = 0; i < d; ++i) {
            if (i == c || m.at(i, c) == 0) continue;
            Int f = m.at(i, c);
            for (int j = 0; j < d; ++j) {
                m.at(i, j) = mod_norm(m.at(i, j) - f * m.at(c, j), mod);
                r.at(i, j) = mod_norm(r.at(i, j) - f * r.at(c, j), mod);
            }
        }
    }
    return r;
}

std::string ModMatrix::str() const {
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < d; ++i) {
        if (i) os << "; ";
        for (int j = 0; j < d; ++j) {
            if (j) os << ",";
            os << at(i, j);
        }
    }
    os << "]";
    return os.str();
}

MatrixRep::MatrixRep(GroupPtr g, std::vector<ModMatrix> images,
                     std::optional<std::vector<Int>> det_character)
    : m_group(std::move(g)), m_images(std::move(images)) {
    require(m_group != nullptr, ErrorKind::Validation, "representation needs a group");
    int n = m_group->order();
    require((int)m_images.size() == n, ErrorKind::Validation, "one image per element required");
    int d = m_images[0].d;
    const Int& mod = m_images[0].mod;
    for (const auto& m : m_images)
        require(m.d == d && m.mod == mod, ErrorKind::Validation, "image shape mismatch");
    require(m_images[0] == ModMatrix::identity(d, mod), ErrorKind::Validation,
            "identity must map to the identity matrix");
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            require(m_images[a].mul(m_images[b]) == m_images[m_group->mul(a, b)],
                    ErrorKind::Validation, "images are not multiplicative");
    if (det_character) {
        require((int)det_character->size() == n, ErrorKind::Validation,
                "determinant character size mismatch");
        for (int a = 0; a < n; ++a)
            require(mod_norm((*det_character)[a], mod) == m_images[a].det(),
                    ErrorKind::DeterminantMismatch, "determinant character mismatch");
    }
}

MatChain::MatChain(int degree, Int mod) : m_degree(degree), m_mod(std::move(mod)) {
    require(degree >= 0, ErrorKind::Validation, "chain degree must be >= 0");
    require(m_mod >= 2, ErrorKind::Validation, "matrix modulus must be >= 2");
}

int MatChain::intern(const ModMatrix& m) {
    require(m.mod == m_mod, ErrorKind::Validation, "matrix modulus != chain modulus");
    require(m_pool.empty() || m.d == m_pool[0].d, ErrorKind::Validation,
            "matrix dimension mismatch in one chain");
    auto it = m_index.find(m.a);
    if (it != m_index.end()) return it->second;
    int id = (int)m_pool.size();
    m_pool.push_back(m);
    m_index.emplace(m.a, id);
    return id;
}

void MatChain::add_term(const std::vector<int>& ids, const Int& coeff) {
    require((int)ids.size() == m_degree, ErrorKind::Validation, "tuple length != chain degree");
    for (int id : ids)
        require(0 <= id && id < (int)m_pool.size(), ErrorKind::Validation,
                "matrix id not interned");
    Int v = mod_norm(m_terms.count(ids) ? m_terms[ids] + coeff : coeff, m_mod);
    if (v == 0)
        m_terms.erase(ids);
    else
        m_terms[ids] = v;
}

MatChain MatChain::boundary() const {
    require(m_degree >= 1, ErrorKind::Validation, "boundary needs degree >= 1");
    int n = m_degree;
    MatChain r(n - 1, m_mod);
    for (const auto& [t, c] : m_terms) {
        std::vector<int> u;
        u.reserve(n - 1);
        for (int j = 1; j < n; ++j) u.push_back(r.intern(m_pool[t[j]]));
        r.add_term(u, c);
        Int s = m_mod - 1;
        for (int i = 1; i <= n - 1; ++i) {
            u.clear();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                u.push_back(r.intern(j == i - 1 ? m_pool[t[i - 1]].mul(m_pool[t[i]])
                                                : m_pool[t[j]]));
            }
            r.add_term(u, s * c);
            s = m_mod - s;
        }
        u.clear();
        for (int j = 0; j + 1 < n; ++j) u.push_back(r.intern(m_pool[t[j]]));
        r.add_term(u, s * c);
    }
    return r;
}

bool MatChain::same(const MatChain& o) const {
    if (m_degree != o.m_degree || m_mod != o.m_mod || m_terms.size() != o.m_terms.size())
        return false;
    auto canonical = [](const MatChain& c) {
        std::map<std::vector<std::vector<Int>>, Int> m;
        for (const auto& [t, v] : c.m_terms) {
            std::vector<std::vector<Int>> key;
            key.reserve(t.size());
            for (int id : t) key.push_back(c.m_pool[id].a);
            m[key] = v;
        }
        return m;
    };
    return canonical(*this) == canonical(o);
}

MatChain map_chain(const MatrixRep& rho, const BarChain& c) {
    require(rho.group()->same(*c.group()), ErrorKind::Validation,
            "representation of a different group");
    require(rho.modulus() == c.modulus(), ErrorKind::Validation,
            "representation modulus != chain modulus");
    MatChain r(c.degree(), c.modulus());
    for (const auto& [t, v] : c.terms()) {
        std::vector<int> ids;
        ids.reserve(t.size());
        for (int g : t) ids.push_back(r.intern(rho.image(g)));
        r.add_term(ids, v);
    }
    return r;
}

MatChain inn_chain(const MatChain& c, const ModMatrix& h) {
    require(h.mod == c.modulus(), ErrorKind::Validation, "conjugator modulus != chain modulus");
    ModMatrix hi = h.inverse();
    MatChain r(c.degree(), c.modulus());
    for (const auto& [t, v] : c.terms()) {
        std::vector<int> u;
        u.reserve(t.size());
        for (int id : t) u.push_back(r.intern(h.mul(c.pool(id)).mul(hi)));
        r.add_term(u, v);
    }
    return r;
}

MatChain homotopy_F(const MatChain& c, const ModMatrix& h) {
    require(h.mod == c.modulus(), ErrorKind::Validation, "conjugator modulus != chain modulus");
    int n = c.degree();
    ModMatrix hi = h.inverse();
    MatChain r(n + 1, c.modulus());
    for (const auto& [t, v] : c.terms()) {
        Int s = 1;
        for (int pos = 0; pos <= n; ++pos) {
            std::vector<int> u;
            u.reserve((size_t)n + 1);
            for (int j = 0; j < pos; ++j) u.push_back(r.intern(c.pool(t[j])));
            u.push_back(r.intern(hi));
            for (int j = pos; j < n; ++j) u.push_back(r.intern(h.mul(c.pool(t[j])).mul(hi)));
            r.add_term(u, s * v);
            s = c.modulus() - s;
        }
    }
    return r;
}

Int trace_form(const ModMatrix& x, const ModMatrix& y) { return x.mul(y).trace(); }

PadicScalar cup_pair(const MatrixRep& rho0, const std::vector<ModMatrix>& c1,
                     const std::vector<ModMatrix>& c2, const BarChain& fundamental,
                     const RingPtr& ring,
                     const std::function<Int(const ModMatrix&, const ModMatrix&)>& pairing) {
    require(ring != nullptr, ErrorKind::Validation, "cup pairing needs a ring");
    require(fundamental.degree() == 2, ErrorKind::Validation,
            "fundamental chain must have degree 2");
    require(ring->ell() == fundamental.ell(), ErrorKind::Validation,
            "ring prime != chain prime");
    const auto& g = fundamental.group();
    require(rho0.group()->same(*g), ErrorKind::Validation, "representation of a different group");
    require(rho0.modulus() == fundamental.modulus(), ErrorKind::Validation,
            "representation modulus != chain modulus");
    int n = g->order();
    for (const auto* c : {&c1, &c2}) {
        require((int)c->size() == n, ErrorKind::Validation, "one cochain value per element");
        for (const auto& m : *c)
            require(m.d == rho0.dim() && m.mod == rho0.modulus(), ErrorKind::Validation,
                    "cochain value shape mismatch");
        // adjoint cocycle condition c(ab) = rho0(b)^{-1} c(a) rho0(b) + c(b)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                ModMatrix ad = rho0.image(g->inv(b)).mul((*c)[a]).mul(rho0.image(b));
                require((*c)[g->mul(a, b)] == ad.add((*c)[b]), ErrorKind::NotACocycle,
                        "cochain fails the adjoint cocycle condition");
            }
    }
    require(fundamental.is_cycle(), ErrorKind::NotACycle, "fundamental chain is not closed");

    Int total = 0;
    for (const auto& [t, v] : fundamental.terms()) {
        ModMatrix ad = rho0.image(g->inv(t[1])).mul(c1[t[0]]).mul(rho0.image(t[1]));
        total += v * pairing(ad, c2[t[1]]);
    }
    total = mod_norm(total, fundamental.modulus());
    return PadicScalar::from_int(ring, total).truncate_abs((long)fundamental.prec() * ring->e());
}

} // namespace elladic
