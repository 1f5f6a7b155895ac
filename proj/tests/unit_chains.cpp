#include "doctest.h"

#include "elladic/chains.hpp"

#include <random>

using namespace elladic;

namespace {

GroupPtr Z3Z3() {
    return FiniteGroup::direct_product(FiniteGroup::cyclic(3), FiniteGroup::cyclic(3));
}

BarChain random_chain(const GroupPtr& g, int degree, long ell, int k, std::mt19937& rng,
                      int nterms) {
    BarChain c(g, degree, ell, k);
    std::uniform_int_distribution<int> elem(0, g->order() - 1);
    std::uniform_int_distribution<long> coeff(1, 50);
    for (int i = 0; i < nterms; ++i) {
        std::vector<int> t(degree);
        for (auto& x : t) x = elem(rng);
        c.add_term(t, Int(coeff(rng)));
    }
    return c;
}

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

} // namespace

TEST_CASE("group tables are verified on load") {
    auto c6 = FiniteGroup::cyclic(6);
    CHECK(c6->order() == 6);
    CHECK(c6->mul(2, 5) == 1);
    CHECK(c6->inv(1) == 5);
    CHECK(c6->label(4) == "4");

    auto s3 = FiniteGroup::symmetric(3);
    CHECK(s3->order() == 6);
    // lexicographic listing: 012, 021, 102, 120, 201, 210; composition acts
    // left-to-right through the arguments, (p*q)(x) = p(q(x))
    CHECK(s3->label(0) == "012");
    CHECK(s3->mul(1, 2) == 4);
    CHECK(s3->mul(2, 1) == 3);
    CHECK(s3->inv(3) == 4);

    auto g9 = Z3Z3();
    CHECK(g9->order() == 9);
    CHECK(g9->label(1) == "(1,0)");
    CHECK(g9->label(3) == "(0,1)");
    CHECK(g9->mul(1, 3) == 4);
    CHECK(g9->inv(4) == 8);

    // two-sided identity and latin square, but not associative
    std::vector<std::vector<int>> loop = {{0, 1, 2, 3, 4},
                                          {1, 0, 3, 4, 2},
                                          {2, 3, 4, 0, 1},
                                          {3, 4, 1, 2, 0},
                                          {4, 2, 0, 1, 3}};
    try {
        FiniteGroup::from_table(loop);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(kind_is(e, ErrorKind::Validation));
        CHECK(std::string(e.what()).find("not associative") != std::string::npos);
    }

    std::vector<std::vector<int>> shifted = {{1, 0}, {0, 1}};
    CHECK_THROWS_AS(FiniteGroup::from_table(shifted), Error);

    std::vector<std::vector<int>> repeat = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(FiniteGroup::from_table(repeat), Error);
}

TEST_CASE("bar boundary matches the face formula and squares to zero") {
    auto s3 = FiniteGroup::symmetric(3);
    int a = 2, b = 1;
    BarChain c = BarChain::from_tuple(s3, {a, b}, 3, 2);
    BarChain expect(s3, 1, 3, 2);
    expect.add_term({b}, 1);
    expect.add_term({s3->mul(a, b)}, -1);
    expect.add_term({a}, 1);
    CHECK(c.boundary() == expect);

    // the complex is unnormalized: degenerate tuples stay and carry content
    BarChain deg = BarChain::from_tuple(s3, {0, a}, 3, 2);
    CHECK(deg.boundary() == BarChain::from_tuple(s3, {0}, 3, 2));

    BarChain one = BarChain::from_tuple(s3, {a}, 3, 2);
    CHECK(one.boundary().is_zero());
    CHECK(one.is_cycle());

    auto g9 = Z3Z3();
    BarChain z = BarChain::from_tuple(g9, {1, 3}, 3, 2) - BarChain::from_tuple(g9, {3, 1}, 3, 2);
    CHECK(z.is_cycle());
    CHECK((z + (-z)).is_zero());
    CHECK(z.scaled(3).coeff({1, 3}) == 3);

    std::mt19937 rng(5117);
    for (int trial = 0; trial < 5; ++trial) {
        BarChain r3 = random_chain(s3, 3, 3, 3, rng, 6);
        BarChain r4 = random_chain(s3, 4, 3, 3, rng, 6);
        CHECK(r3.boundary().boundary().is_zero());
        CHECK(r4.boundary().boundary().is_zero());
    }
}

TEST_CASE("conjugation homotopy connects inn to the identity") {
    auto s3 = FiniteGroup::symmetric(3);
    int g = 2, h = 3;
    BarChain c = BarChain::from_tuple(s3, {g}, 3, 2);
    BarChain expect(s3, 2, 3, 2);
    expect.add_term({s3->inv(h), s3->conj(h, g)}, 1);
    expect.add_term({g, s3->inv(h)}, -1);
    CHECK(homotopy_F(c, h) == expect);

    // degree 0 seeds the homotopy with the conjugator itself
    BarChain pt(s3, 0, 3, 2);
    pt.add_term({}, 1);
    CHECK(homotopy_F(pt, h) == BarChain::from_tuple(s3, {s3->inv(h)}, 3, 2));
    CHECK(homotopy_F(pt, h).boundary().is_zero());

    for (const auto& grp : {s3, Z3Z3()}) {
        for (int d = 1; d <= 3; ++d) {
            long count = 1;
            for (int i = 0; i < d; ++i) count *= grp->order();
            for (int hh = 0; hh < grp->order(); ++hh) {
                for (long code = 0; code < count; ++code) {
                    std::vector<int> t(d);
                    long rem = code;
                    for (int i = 0; i < d; ++i) {
                        t[i] = (int)(rem % grp->order());
                        rem /= grp->order();
                    }
                    BarChain basis = BarChain::from_tuple(grp, t, 3, 2);
                    BarChain lhs = inn_chain(basis, hh) - basis;
                    BarChain rhs =
                        homotopy_F(basis.boundary(), hh) + homotopy_F(basis, hh).boundary();
                    CHECK(lhs == rhs);
                }
            }
        }
    }
}

TEST_CASE("homotopy composition differs from the composite by a boundary") {
    auto s3 = FiniteGroup::symmetric(3);
    BoundarySolver deg2(s3, 2, 3, 2);
    for (int h = 1; h < 6; ++h) {
        for (int hp = 1; hp < 6; ++hp) {
            for (int g = 0; g < 6; ++g) {
                BarChain c = BarChain::from_tuple(s3, {g}, 3, 2);
                BarChain z = homotopy_F(c, s3->mul(h, hp)) -
                             homotopy_F(inn_chain(c, hp), h) - homotopy_F(c, hp);
                BarChain w = deg2.solve(z);
                CHECK(w.boundary() == z);
            }
        }
    }
    // the difference operator anticommutes with the boundary, so it sends
    // cycles to cycles and only those are certified boundaries; degree-1
    // chains above are all cycles, degree-2 cycles are made as boundaries
    BoundarySolver deg3(s3, 3, 3, 2);
    std::mt19937 rng(2214);
    std::uniform_int_distribution<int> elem(0, 5);
    for (int trial = 0; trial < 6; ++trial) {
        int h = 1 + elem(rng) % 5, hp = 1 + elem(rng) % 5;
        BarChain c = random_chain(s3, 3, 3, 2, rng, 4).boundary();
        CHECK(c.is_cycle());
        BarChain z = homotopy_F(c, s3->mul(h, hp)) - homotopy_F(inn_chain(c, hp), h) -
                     homotopy_F(c, hp);
        CHECK(deg3.solve(z).boundary() == z);
    }
}

TEST_CASE("central conjugators shuffle and act on cycle classes") {
    auto g9 = Z3Z3();
    int a = 1, b = 3;
    for (int h = 0; h < 9; ++h) {
        BarChain c = BarChain::from_tuple(g9, {a, b}, 3, 2);
        BarChain expect(g9, 3, 3, 2);
        int hi = g9->inv(h);
        expect.add_term({hi, a, b}, 1);
        expect.add_term({a, hi, b}, -1);
        expect.add_term({a, b, hi}, 1);
        CHECK(homotopy_F(c, h) == expect);

        BarChain z = c - BarChain::from_tuple(g9, {b, a}, 3, 2);
        CHECK(homotopy_F(z, h).boundary().is_zero());
    }

    // in S3 the 3-cycles centralize their own subgroup
    auto s3 = FiniteGroup::symmetric(3);
    BarChain z(s3, 2, 3, 2);
    z.add_term({3, 4}, 1);
    z.add_term({4, 3}, -1);
    CHECK(z.is_cycle());
    for (int h : {0, 3, 4}) CHECK(homotopy_F(z, h).boundary().is_zero());

    // the class map h -> [F_h(z)] is additive up to boundaries
    auto g9z = BarChain::from_tuple(g9, {a, b}, 3, 2) - BarChain::from_tuple(g9, {b, a}, 3, 2);
    int h1 = 1, h2 = 3;
    BarChain diff = homotopy_F(g9z, g9->mul(h1, h2)) - homotopy_F(g9z, h1) -
                    homotopy_F(g9z, h2);
    BarChain w = solve_boundary(diff);
    CHECK(w.boundary() == diff);
}

TEST_CASE("boundary solving round-trips and certifies obstructions") {
    auto g9 = Z3Z3();
    BarChain z1 = BarChain::from_tuple(g9, {1, 3}, 3, 1) - BarChain::from_tuple(g9, {3, 1}, 3, 1);
    CHECK_THROWS_AS(solve_boundary(z1), Error);
    try {
        solve_boundary(z1);
    } catch (const Error& e) {
        CHECK(kind_is(e, ErrorKind::NoSolution));
    }

    BarChain z2 = BarChain::from_tuple(g9, {1, 3}, 3, 2) - BarChain::from_tuple(g9, {3, 1}, 3, 2);
    CHECK_THROWS_AS(solve_boundary(z2), Error);
    // the class has order 3, so its triple bounds even though it does not
    BarChain d3 = solve_boundary(z2.scaled(3));
    CHECK(d3.boundary() == z2.scaled(3));

    auto s3 = FiniteGroup::symmetric(3);
    std::mt19937 rng(308);
    BoundarySolver deg1(s3, 1, 3, 3);
    BoundarySolver deg2(s3, 2, 3, 3);
    for (int trial = 0; trial < 5; ++trial) {
        BarChain d0 = random_chain(s3, 2, 3, 3, rng, 5);
        BarChain z = d0.boundary();
        CHECK(deg1.solve(z).boundary() == z);
        BarChain d1 = random_chain(s3, 3, 3, 3, rng, 5);
        BarChain zz = d1.boundary();
        CHECK(deg2.solve(zz).boundary() == zz);
    }

    BarChain open = BarChain::from_tuple(g9, {1, 3}, 3, 2);
    try {
        solve_boundary(open);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(kind_is(e, ErrorKind::NotACycle));
    }

    BarChain zero(g9, 2, 3, 2);
    CHECK(solve_boundary(zero).is_zero());
    CHECK(solve_boundary(zero).degree() == 3);

    try {
        BarChain huge(g9, 9, 3, 2);
        solve_boundary(huge);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(kind_is(e, ErrorKind::TooLarge));
    }
}

TEST_CASE("homology torsion divisors with the precision cap") {
    auto div = [](const GroupPtr& g, int n, long ell, int k) {
        return homology_divisors(g, n, ell, k);
    };
    CHECK(div(FiniteGroup::cyclic(3), 2, 3, 2).empty());
    CHECK(div(FiniteGroup::cyclic(1), 2, 3, 2).empty());
    CHECK(div(Z3Z3(), 2, 3, 2) == std::vector<Int>{3});
    CHECK(div(Z3Z3(), 2, 3, 1) == std::vector<Int>{3});
    CHECK(div(FiniteGroup::cyclic(3), 1, 3, 3) == std::vector<Int>{3});
    CHECK(div(FiniteGroup::cyclic(3), 3, 3, 2) == std::vector<Int>{3});
    // torsion prime to ell reduces to units and is dropped
    CHECK(div(FiniteGroup::cyclic(6), 1, 3, 2) == std::vector<Int>{3});
    CHECK(div(FiniteGroup::cyclic(2), 1, 3, 2).empty());
    // a Z/9 summand is invisible mod 9 and only the rank count recovers it
    auto g27 = FiniteGroup::direct_product(FiniteGroup::cyclic(9), FiniteGroup::cyclic(3));
    CHECK(div(g27, 1, 3, 2) == std::vector<Int>({3, 9}));
    CHECK(div(g27, 1, 3, 3) == std::vector<Int>({3, 9}));
}

TEST_CASE("group automorphisms act on chains") {
    auto g9 = Z3Z3();
    std::vector<int> swap_perm(9);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) swap_perm[x + 3 * y] = y + 3 * x;
    auto swap = GroupAutomorphism::from_perm(g9, swap_perm);
    CHECK(!swap.is_identity());
    CHECK(swap.compose(swap).is_identity());
    CHECK(swap.inverse().apply(1) == 3);

    // the coordinate swap negates the fundamental class
    BarChain z = BarChain::from_tuple(g9, {1, 3}, 3, 2) - BarChain::from_tuple(g9, {3, 1}, 3, 2);
    CHECK(swap.apply(z) == -z);

    auto s3 = FiniteGroup::symmetric(3);
    auto conj = GroupAutomorphism::conjugation(s3, 2);
    BarChain c = BarChain::from_tuple(s3, {3, 1}, 3, 2);
    CHECK(conj.apply(c) == inn_chain(c, 2));
    CHECK(conj.compose(conj.inverse()).is_identity());

    std::vector<int> not_mult = {0, 2, 1, 3};
    CHECK_THROWS_AS(GroupAutomorphism::from_perm(FiniteGroup::cyclic(4), not_mult), Error);
    std::vector<int> not_bij = {0, 1, 1, 2};
    CHECK_THROWS_AS(GroupAutomorphism::from_perm(FiniteGroup::cyclic(4), not_bij), Error);
}

TEST_CASE("matrix chains push forward along representations") {
    auto s3 = FiniteGroup::symmetric(3);
    // permutation matrices in the listing order of symmetric(3)
    std::vector<std::vector<int>> perms = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Int mod = 9;
    std::vector<ModMatrix> images;
    std::vector<Int> sign = {1, -1, -1, 1, 1, -1};
    for (const auto& p : perms) {
        ModMatrix m = ModMatrix::zero(3, mod);
        for (int j = 0; j < 3; ++j) m.at(p[j], j) = 1;
        images.push_back(m);
    }
    MatrixRep rho(s3, images, sign);
    CHECK(rho.dim() == 3);
    CHECK(rho.image(5).det() == mod_norm(-1, mod));

    std::vector<Int> bad_sign = {1, 1, 1, 1, 1, 1};
    try {
        MatrixRep broken(s3, images, bad_sign);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DeterminantMismatch);
    }
    auto tampered = images;
    tampered[3] = ModMatrix::identity(3, mod);
    CHECK_THROWS_AS(MatrixRep(s3, tampered), Error);

    std::mt19937 rng(7741);
    for (int trial = 0; trial < 4; ++trial) {
        BarChain c = random_chain(s3, 3, 3, 2, rng, 6);
        CHECK(map_chain(rho, c.boundary()).same(map_chain(rho, c).boundary()));
    }

    // interning is by content, term order does not matter
    MatChain m1(1, mod), m2(1, mod);
    int ida = m1.intern(images[3]);
    int idb = m1.intern(images[4]);
    CHECK(m1.intern(images[3]) == ida);
    m1.add_term({ida}, 2);
    m1.add_term({idb}, 5);
    int jdb = m2.intern(images[4]);
    m2.add_term({jdb}, 5);
    m2.add_term({m2.intern(images[3])}, 2);
    CHECK(m1.same(m2));
    m2.add_term({jdb}, 1);
    CHECK(!m1.same(m2));
}

TEST_CASE("cup product pairing on a fundamental cycle") {
    auto g9 = Z3Z3();
    auto R = make_ring(3, 1, 12);

    // trivial representation mod 3: adjoint cocycles are homomorphisms
    Int mod3 = 3;
    std::vector<ModMatrix> triv;
    for (int i = 0; i < 9; ++i) triv.push_back(ModMatrix::identity(2, mod3));
    MatrixRep rho_triv(g9, triv);
    std::vector<ModMatrix> c1, c2;
    for (int i = 0; i < 9; ++i) {
        ModMatrix m1 = ModMatrix::zero(2, mod3);
        m1.at(0, 1) = i % 3;
        c1.push_back(m1);
        ModMatrix m2 = ModMatrix::zero(2, mod3);
        m2.at(1, 0) = i / 3;
        c2.push_back(m2);
    }
    BarChain z = BarChain::from_tuple(g9, {1, 3}, 3, 1) - BarChain::from_tuple(g9, {3, 1}, 3, 1);
    PadicScalar v12 = cup_pair(rho_triv, c1, c2, z, R);
    PadicScalar v21 = cup_pair(rho_triv, c2, c1, z, R);
    CHECK(v12.same_within_cert(PadicScalar::from_int(R, 1)));
    CHECK(v21.same_within_cert(PadicScalar::from_int(R, -1)));
    CHECK(v12.same_within_cert(-v21));

    std::vector<ModMatrix> zero_c(9, ModMatrix::zero(2, mod3));
    CHECK(cup_pair(rho_triv, zero_c, c2, z, R).is_zero());

    // nontrivial diagonal representation mod 9; coboundaries pair to zero
    Int mod9 = 9;
    std::vector<ModMatrix> diag;
    std::vector<Int> u = {1, 4, 7}; // 4^3 = 64 = 1 mod 9, 7 = 4^{-1}
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
            ModMatrix m = ModMatrix::zero(2, mod9);
            m.at(0, 0) = mod_norm(u[x] * u[(3 - y) % 3], mod9);
            m.at(1, 1) = mod_norm(u[(3 - x) % 3] * u[y], mod9);
            diag.push_back(m);
        }
    MatrixRep rho_d(g9, diag);
    auto coboundary = [&](const ModMatrix& M) {
        std::vector<ModMatrix> c;
        for (int i = 0; i < 9; ++i) {
            ModMatrix ad = rho_d.image(g9->inv(i)).mul(M).mul(rho_d.image(i));
            c.push_back(ad.sub(M));
        }
        return c;
    };
    ModMatrix e12 = ModMatrix::zero(2, mod9);
    e12.at(0, 1) = 1;
    ModMatrix e21 = ModMatrix::zero(2, mod9);
    e21.at(1, 0) = 1;
    auto cb1 = coboundary(e12), cb2 = coboundary(e21);
    CHECK(cb1[1].at(0, 1) != 0); // the coboundary is not the zero cochain
    BarChain z9 = BarChain::from_tuple(g9, {1, 3}, 3, 2) - BarChain::from_tuple(g9, {3, 1}, 3, 2);
    CHECK(cup_pair(rho_d, cb1, cb2, z9, R).is_zero());

    auto broken = c1;
    broken[4] = ModMatrix::identity(2, mod3);
    try {
        cup_pair(rho_triv, broken, c2, z, R);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotACocycle);
    }
    BarChain open = BarChain::from_tuple(g9, {1, 3}, 3, 1);
    try {
        cup_pair(rho_triv, c1, c2, open, R);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotACycle);
    }
}
