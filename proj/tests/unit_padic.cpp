#include "doctest.h"

#include "elladic/padic.hpp"
#include "oracles.hpp"

using namespace elladic;

namespace {
RingPtr z3(long P = 12) { return make_ring(3, 1, P); }
}

TEST_CASE("digit stats") {
    CHECK(digit_stats(3, 10).sum == 2);
    CHECK(digit_stats(3, 10).count == 3);
    CHECK(digit_stats(5, 0).sum == 0);
    CHECK(digit_stats(5, 0).count == 0);
    CHECK(digit_stats(3, 26).sum == 6);
    CHECK(digit_stats(3, 26).count == 3);
    for (long ell : {3L, 5L, 7L}) {
        for (long a = 0; a <= 200; ++a) {
            auto d = oracle::digits_brute(ell, a);
            long s = 0;
            for (long x : d) s += x;
            CHECK(digit_stats(ell, a).sum == s);
            CHECK(digit_stats(ell, a).count == (long)d.size());
        }
    }
}

TEST_CASE("factorial valuation matches brute force and both closed forms") {
    CHECK(factorial_valuation(3, 10) == 4);
    CHECK(factorial_valuation(5, 30) == 7);
    for (long ell : {3L, 5L, 7L}) {
        for (long a = 0; a <= 500; ++a) {
            Int v = factorial_valuation(ell, a);
            CHECK(v == oracle::factorial_valuation_brute(ell, a));
            // (a - s_ell(a)) / (ell - 1)
            auto st = digit_stats(ell, a);
            CHECK(v * (ell - 1) == a - st.sum);
        }
    }
}

TEST_CASE("multinomial valuation bound") {
    std::vector<Int> a = {0, 0, 0, 0};
    Rat bound = multinomial_valuation_bound(3, a);
    Rat exact = multinomial_valuation_exact(3, a);
    CHECK(exact == -1);
    CHECK(bound <= exact);

    // bound stays below the exact valuation on a sweep of tuples
    for (long x = 0; x <= 6; ++x)
        for (long y = 0; y <= 6; ++y)
            for (long z = 0; z <= 6; ++z) {
                std::vector<Int> t = {Int(x), Int(y), Int(z), Int(2)};
                CHECK(multinomial_valuation_bound(3, t) <= multinomial_valuation_exact(3, t));
                CHECK(multinomial_valuation_bound(5, t) <= multinomial_valuation_exact(5, t));
            }

    // the weight itself has the exact valuation
    std::vector<long> w = {2, 0, 1, 3};
    Rat mw = multinomial_weight(w);
    std::vector<Int> wi(w.begin(), w.end());
    CHECK(Rat(val_rat(mw, 3)) == multinomial_valuation_exact(3, wi));
}

TEST_CASE("cap_N") {
    auto r1 = cap_N(3, 1, 1);
    CHECK(r1.value == 0);
    CHECK(r1.argmax == 1);
    auto r2 = cap_N(3, 4, 1);
    CHECK(r2.value == 5);
    CHECK(r2.argmax == 3);
    // against a full scan over a comfortably larger range
    for (long cn = 0; cn <= 6; ++cn)
        for (long fn = 1; fn <= 4; ++fn) {
            Rat c(cn, 2), f(fn, 3);
            auto r = cap_N(3, c, f);
            CHECK(r.value == oracle::cap_brute(3, c, f, 3000));
        }
}

TEST_CASE("teichmuller") {
    auto t3 = teichmuller(make_ring(3, 1, 2), 2);
    CHECK(t3.unit_encoded() == 8);
    auto t5 = teichmuller(make_ring(5, 1, 2), 2);
    CHECK(t5.unit_encoded() == 7);
    for (long ell : {3L, 5L}) {
        long D = 3;
        auto ring = make_ring(ell, 1, D);
        for (long u = 1; u < ell; ++u) {
            Int expect = oracle::teichmuller_brute(ell, u, D);
            auto t = teichmuller(ring, u);
            Int m = pow_int(Int(ell), D);
            CHECK(mod_norm(t.unit_encoded(), m) == expect);
            // (ell-1)-st power is 1
            CHECK((t.pow(ell - 1) - PadicScalar::from_int(ring, 1)).is_zero());
        }
    }
}

TEST_CASE("padic_log known values") {
    auto r81 = z3(4);
    auto l4 = padic_log(PadicScalar::from_int(r81, 4));
    CHECK(!l4.is_zero());
    CHECK(mod_norm(l4.unit_encoded() * pow_int(Int(3), *l4.pi_valuation()), Int(81)) == 48);
    auto l2 = padic_log(PadicScalar::from_int(r81, 2));
    CHECK(mod_norm(l2.unit_encoded() * pow_int(Int(3), *l2.pi_valuation()), Int(81)) == 24);
}

TEST_CASE("padic_log kills the teichmuller part and is additive") {
    auto ring = z3(8);
    for (long a : {2L, 4L, 5L, 7L, 8L}) {
        auto la = padic_log(PadicScalar::from_int(ring, a));
        auto lt = padic_log(teichmuller(ring, a));
        CHECK(lt.is_zero());
        for (long b : {2L, 4L, 5L}) {
            auto lb = padic_log(PadicScalar::from_int(ring, b));
            auto lab = padic_log(PadicScalar::from_int(ring, a * b));
            CHECK((la + lb - lab).is_zero());
        }
    }
    // same for ell = 5, 7
    for (long ell : {5L, 7L}) {
        auto r = make_ring(ell, 1, 6);
        auto l6 = padic_log(PadicScalar::from_int(r, 6));
        auto l36 = padic_log(PadicScalar::from_int(r, 36));
        CHECK((l6 + l6 - l36).is_zero());
    }
}

TEST_CASE("hensel_root") {
    auto r9 = z3(2);
    auto a = hensel_root(2, PadicScalar::from_int(r9, 4), 1);
    CHECK(mod_norm(a.unit_encoded(), Int(9)) == 7);
    auto b = hensel_root(2, PadicScalar::from_int(r9, 1), 2);
    CHECK(mod_norm(b.unit_encoded(), Int(9)) == 8);

    CHECK_THROWS_AS(hensel_root(3, PadicScalar::from_int(z3(), 1), 1), Error);
    CHECK_THROWS_AS(hensel_root(2, PadicScalar::from_int(z3(), 2), 1), Error); // 2 not a square mod 3

    // against exhaustive roots mod 3^4
    auto r = z3(4);
    for (long u : {1L, 4L, 7L, 16L, 22L, 25L}) {
        auto roots = oracle::power_roots_brute(3, 2, u, 4);
        if (roots.empty()) continue;
        for (const Int& rt : roots) {
            if (rt % 3 == 0) continue;
            auto h = hensel_root(2, PadicScalar::from_int(r, u), rt % 3);
            CHECK(mod_norm(h.unit_encoded(), Int(81)) == rt);
        }
    }
}

TEST_CASE("scalar arithmetic and certificates") {
    auto ring = z3(6);
    auto x = PadicScalar::from_int(ring, 10);
    auto y = PadicScalar::from_int(ring, -10);
    CHECK((x + y).is_zero());
    CHECK((x + y).is_exact_zero() == false); // cancellation stops at the certificate
    auto z = PadicScalar::from_rat(ring, Rat(1, 2));
    CHECK((z + z - PadicScalar::from_int(ring, 1)).is_zero());
    auto t = PadicScalar::from_int(ring, 18); // v = 2
    CHECK(*t.pi_valuation() == 2);
    CHECK(*t.valuation() == 2);
    CHECK((t * t.inverse() - PadicScalar::from_int(ring, 1)).is_zero());
    CHECK(*(x * t).pi_valuation() == 2);
    // 1/3 has negative valuation
    auto third = PadicScalar::from_rat(ring, Rat(1, 3));
    CHECK(*third.pi_valuation() == -1);
}

TEST_CASE("scalar string round trip") {
    auto ring = z3(6);
    for (const Int& n : {Int(1), Int(-7), Int(45), Int(10)}) {
        auto x = PadicScalar::from_int(ring, n);
        auto back = PadicScalar::parse(ring, x.str());
        CHECK((x - back).is_zero());
        CHECK(back.str() == x.str());
    }
    auto z = PadicScalar::zero(ring);
    CHECK(PadicScalar::parse(ring, z.str()).is_exact_zero());
    auto za = PadicScalar::zero_at(ring, 4);
    auto zb = PadicScalar::parse(ring, za.str());
    CHECK(zb.is_zero());
    CHECK(zb.abs_cert() == 4);
}

TEST_CASE("ramified ring arithmetic") {
    // O = Z_3[pi], pi^2 = 3 (E(z) = z^2 - 3)
    auto ring = make_ring(3, 2, 8, {Int(-3), Int(0)});
    auto pi = PadicScalar::from_unit_poly(ring, 1, opoly::from_int(*ring, 1, 8), 8);
    auto three = PadicScalar::from_int(ring, 3);
    CHECK((pi * pi - three).is_zero());
    CHECK(*three.pi_valuation() == 2);
    CHECK(*three.valuation() == 1);
    CHECK(*pi.valuation() == Rat(1, 2));
    auto u = PadicScalar::from_int(ring, 2) + pi;
    CHECK((u * u.inverse() - PadicScalar::from_int(ring, 1)).is_zero());
    // log on the ramified ring: log(1 + pi) has valuation 1/2
    auto one = PadicScalar::from_int(ring, 1);
    auto lg = padic_log(one + pi);
    CHECK(*lg.valuation() == Rat(1, 2));
    // additivity still holds
    auto v = one + three * pi;
    auto lv = padic_log(v);
    auto luv = padic_log((one + pi) * v);
    CHECK((lg + lv - luv).is_zero());
}

TEST_CASE("legendre formula oracle across rings") {
    // |a!|_ell >= ell^{-a/(ell-1)}
    for (long ell : {3L, 5L, 7L}) {
        for (long a = 1; a <= 500; ++a) {
            Int v = factorial_valuation(ell, a);
            CHECK(Rat(v) <= Rat(a, ell - 1));
        }
    }
}
