#pragma once

#include "elladic/padic.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace elladic {

class FiniteGroup;
using GroupPtr = std::shared_ptr<const FiniteGroup>;

// Finite group given by its multiplication table.  The identity sits at
// index 0 and the axioms are checked on construction: latin-square rows and
// columns, two-sided inverses, and associativity (exhaustive up to order 64,
// deterministically sampled above that).
class FiniteGroup {
public:
    static GroupPtr from_table(std::vector<std::vector<int>> mul,
                               std::vector<std::string> labels = {});
    static GroupPtr cyclic(int n);
    static GroupPtr direct_product(const GroupPtr& a, const GroupPtr& b);
    static GroupPtr symmetric(int n); // permutations of n letters, n <= 6

    int order() const { return (int)m_mul.size(); }
    int mul(int a, int b) const { return m_mul[a][b]; }
    int inv(int a) const { return m_inv[a]; }
    int conj(int h, int a) const { return mul(mul(h, a), inv(h)); }
    const std::string& label(int a) const { return m_labels[a]; }
    bool same(const FiniteGroup& o) const { return this == &o || m_mul == o.m_mul; }

private:
    FiniteGroup() = default;
    std::vector<std::vector<int>> m_mul;
    std::vector<int> m_inv;
    std::vector<std::string> m_labels;
};

// Chain in the unnormalized bar complex of a finite group with coefficients
// in Z/ell^k.  Terms are tuples of element indices; degenerate tuples
// (containing the identity) are kept, the resolution is not normalized.
class BarChain {
public:
    BarChain(GroupPtr g, int degree, long ell, int k);
    static BarChain from_tuple(GroupPtr g, const std::vector<int>& t, long ell, int k,
                               const Int& coeff = Int(1));

    const GroupPtr& group() const { return m_group; }
    int degree() const { return m_degree; }
    long ell() const { return m_ell; }
    int prec() const { return m_k; }
    const Int& modulus() const { return m_mod; }
    const std::map<std::vector<int>, Int>& terms() const { return m_terms; }

    void add_term(const std::vector<int>& t, const Int& c);
    Int coeff(const std::vector<int>& t) const;

    BarChain operator+(const BarChain& o) const;
    BarChain operator-() const;
    BarChain operator-(const BarChain& o) const;
    BarChain scaled(const Int& c) const;
    bool operator==(const BarChain& o) const;
    bool is_zero() const { return m_terms.empty(); }

    // alternating face sum; degree must be >= 1
    BarChain boundary() const;
    bool is_cycle() const;

    std::string str() const;

private:
    void check_compat(const BarChain& o) const;
    GroupPtr m_group;
    int m_degree;
    long m_ell;
    int m_k;
    Int m_mod;
    std::map<std::vector<int>, Int> m_terms;
};

// entrywise conjugation [g_i] -> [h g_i h^{-1}]
BarChain inn_chain(const BarChain& c, int h);

// degree-raising homotopy between inn_h and the identity:
//   F_h([g_1|...|g_n]) = sum_r (-1)^r [g_1|...|g_r|h^{-1}|hg_{r+1}h^{-1}|...]
// satisfying inn_h(c) - c = F_h(boundary c) + boundary(F_h c)
BarChain homotopy_F(const BarChain& c, int h);

class GroupAutomorphism {
public:
    static GroupAutomorphism from_perm(GroupPtr g, std::vector<int> perm);
    static GroupAutomorphism conjugation(GroupPtr g, int h);

    const GroupPtr& group() const { return m_group; }
    int apply(int a) const { return m_perm[a]; }
    BarChain apply(const BarChain& c) const;
    GroupAutomorphism compose(const GroupAutomorphism& o) const; // this after o
    GroupAutomorphism inverse() const;
    bool is_identity() const;

private:
    GroupAutomorphism(GroupPtr g, std::vector<int> p)
        : m_group(std::move(g)), m_perm(std::move(p)) {}
    GroupPtr m_group;
    std::vector<int> m_perm;
};

// Row-echelon factorization of the bar boundary C_{degree+1} -> C_degree
// over Z/ell^k, reusable across right-hand sides.  Pivots take the entry of
// minimal valuation, preferring units; ties break to the lowest column then
// the lowest row, so the solution for a given z is deterministic.
class BoundarySolver {
public:
    BoundarySolver(GroupPtr g, int degree, long ell, int k);

    // d with boundary(d) = z; NoSolution when the class of z is nonzero,
    // NotACycle when z is not closed
    BarChain solve(const BarChain& z) const;

private:
    GroupPtr m_group;
    int m_degree;
    long m_ell;
    int m_k;
    long m_mod; // ell^k, kept below 2^31 so products stay in 64 bits
    long m_cols;
    std::vector<std::map<long, long>> m_rows;         // echelon rows, col -> coeff
    std::vector<std::tuple<int, int, long>> m_ops;    // (target, source, multiplier)
    std::vector<std::pair<int, long>> m_pivots;       // (row, col) in elimination order
    std::vector<long> m_pivot_val;
};

// convenience wrapper building a solver for one right-hand side
BarChain solve_boundary(const BarChain& z);

// Elementary divisors of the ell-torsion of H_degree of the bar complex,
// capped at ell^k: each integral divisor ell^v (v > 0) is reported as
// ell^min(v,k), in ascending order.  Bounded by |G|^(degree+1) <= 10^7.
std::vector<Int> homology_divisors(const GroupPtr& g, int degree, long ell, int k);

// dense d x d matrix with entries reduced into [0, mod)
struct ModMatrix {
    int d = 0;
    Int mod = 0;
    std::vector<Int> a;

    static ModMatrix identity(int d, const Int& mod);
    static ModMatrix zero(int d, const Int& mod);

    Int& at(int i, int j) { return a[(size_t)i * d + j]; }
    const Int& at(int i, int j) const { return a[(size_t)i * d + j]; }
    void reduce();

    ModMatrix mul(const ModMatrix& o) const;
    ModMatrix add(const ModMatrix& o) const;
    ModMatrix sub(const ModMatrix& o) const;
    ModMatrix scaled(const Int& c) const;
    ModMatrix inverse() const; // unit determinant required, mod a prime power
    Int trace() const;
    Int det() const;
    bool operator==(const ModMatrix& o) const { return d == o.d && mod == o.mod && a == o.a; }
    std::string str() const;
};

// representation by explicit images, multiplicativity and the identity image
// checked on construction; a determinant character, when attached, is
// verified against det of every image
class MatrixRep {
public:
    MatrixRep(GroupPtr g, std::vector<ModMatrix> images,
              std::optional<std::vector<Int>> det_character = std::nullopt);

    const GroupPtr& group() const { return m_group; }
    int dim() const { return m_images[0].d; }
    const Int& modulus() const { return m_images[0].mod; }
    const ModMatrix& image(int g) const { return m_images[g]; }

private:
    GroupPtr m_group;
    std::vector<ModMatrix> m_images;
};

// Chain of matrix tuples over Z/ell^k.  Matrices are interned by content so
// tuple entries share storage and comparison is id-based within one chain.
class MatChain {
public:
    MatChain(int degree, Int mod);

    int intern(const ModMatrix& m);
    void add_term(const std::vector<int>& ids, const Int& coeff);

    int degree() const { return m_degree; }
    const Int& modulus() const { return m_mod; }
    const ModMatrix& pool(int id) const { return m_pool[id]; }
    const std::map<std::vector<int>, Int>& terms() const { return m_terms; }

    MatChain boundary() const;
    bool same(const MatChain& o) const; // content comparison, pool ids do not matter
    bool is_zero() const { return m_terms.empty(); }

private:
    int m_degree;
    Int m_mod;
    std::vector<ModMatrix> m_pool;
    std::map<std::vector<Int>, int> m_index;
    std::map<std::vector<int>, Int> m_terms;
};

// tuple-wise image chain; commutes with boundary
MatChain map_chain(const MatrixRep& rho, const BarChain& c);

// entrywise conjugation [g1|...|gn] -> [h g1 h^-1|...|h gn h^-1]
MatChain inn_chain(const MatChain& c, const ModMatrix& h);

/// matrix form of the conjugation homotopy: the same insertion formula as the
// group version, so inn_h - id = F d + d F holds termwise over any modulus
MatChain homotopy_F(const MatChain& c, const ModMatrix& h);

// Tr(x y) mod the common modulus
Int trace_form(const ModMatrix& x, const ModMatrix& y);

// Evaluation of the adjoint cup-product 2-cocycle
//   (c1 cup c2)(g1, g2) = pairing(rho0(g2)^{-1} c1(g1) rho0(g2), c2(g2))
// on a fundamental 2-cycle.  Both cochains are verified against the adjoint
// cocycle condition c(gh) = rho0(h)^{-1} c(g) rho0(h) + c(h).
PadicScalar cup_pair(const MatrixRep& rho0,
                     const std::vector<ModMatrix>& c1,
                     const std::vector<ModMatrix>& c2,
                     const BarChain& fundamental,
                     const RingPtr& ring,
                     const std::function<Int(const ModMatrix&, const ModMatrix&)>& pairing =
                         trace_form);

} // namespace elladic
