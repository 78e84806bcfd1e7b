#include "speclab/twistlab.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace speclab;

static IntPolynomial P(const char *s) { return parse_polynomial(s); }
static TwistedCurve twist(int n, const char *s, long d) { return make_twist(build_curve(n, P(s)), BigInt(d)); }

TEST(Curve, Genus)
{
    EXPECT_EQ(*build_curve(2, P("T^6+T+1")).genus, 2);
    EXPECT_EQ(*build_curve(2, P("T^5+T+1")).genus, 2);
    EXPECT_EQ(*build_curve(3, P("T^6+T+1")).genus, 4);
    EXPECT_EQ(build_curve(3, P("T^4+2*T^2+1")).genus, std::nullopt);
    EXPECT_THROW(build_curve(2, P("T^4+2*T^2+1")), std::domain_error);
    EXPECT_THROW(make_twist(build_curve(2, P("T^3-2")), BigInt(12)), std::invalid_argument);
}

TEST(Search, Examples)
{
    auto a = search_points(twist(2, "T^3-2", 1), 5);
    bool seen = false;
    for (auto &p : a)
        seen |= p.t == 3 && p.z == 1 && abs(p.y) == 5;
    EXPECT_TRUE(seen);
    EXPECT_TRUE(search_points(twist(2, "-T^2-1", 1), 200).empty());
    EXPECT_TRUE(search_points(twist(2, "T^4+1", 3), 1000).empty());
    for (auto &p : a)
        EXPECT_TRUE(on_curve(twist(2, "T^3-2", 1), p));
}

TEST(Search, AgreesWithBruteForce)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 25; ++i) {
        std::vector<BigInt> c;
        int deg = 2 + int(rng() % 5);
        for (int j = 0; j <= deg; ++j)
            c.push_back(BigInt(long(rng() % 11) - 5));
        if (c.back() == 0)
            c.back() = 1;
        IntPolynomial f(c);
        if (!is_separable(f))
            continue;
        int n = 2 + int(rng() % 2);
        auto tc = make_twist(build_curve(n, f), BigInt(1));
        const int64_t H = 30;
        size_t brute = 0;
        for (int64_t u = -H; u <= H; ++u)
            for (int64_t v = 0; v <= H; ++v) {
                if (std::gcd(u, v) != 1 || (v == 0 && u != 1))
                    continue;
                BigInt val = tc.eval(BigInt(long(u)), BigInt(long(v)));
                if (val != 0 && exact_root(val, n))
                    ++brute;
            }
        size_t nontrivial = 0;
        for (auto &p : search_points(tc, H))
            nontrivial += p.y != 0;
        EXPECT_EQ(std::min<size_t>(nontrivial, 1), std::min<size_t>(brute, 1)) << tc.to_string();
    }
}

TEST(Certificate, Examples)
{
    auto a = obstruction_certificate(twist(2, "T^4+1", 3));
    ASSERT_TRUE(a);
    EXPECT_EQ(a->p, 3);
    EXPECT_EQ(a->v_d, 1);
    EXPECT_FALSE(obstruction_certificate(twist(2, "T^4+1", 1)));
    auto b = obstruction_certificate(twist(2, "T^2-2", 5));
    ASSERT_TRUE(b);
    EXPECT_EQ(b->p, 5);
    EXPECT_THROW(obstruction_certificate(twist(2, "T^3-2", 5)), std::invalid_argument);
    EXPECT_THROW(obstruction_certificate(twist(2, "T^2-1", 5)), std::domain_error);
}

TEST(Local, Examples)
{
    EXPECT_EQ(local_solubility(twist(2, "T^4+1", 3), BigInt(3)).status, Solubility::Insoluble);
    EXPECT_EQ(local_solubility_real(twist(2, "-T^2-1", 1)).status, Solubility::Insoluble);
    EXPECT_EQ(local_solubility_real(twist(2, "-T^2-1", -1)).status, Solubility::Soluble);
    EXPECT_EQ(local_solubility(twist(2, "T^2-2", 5), BigInt(5)).status, Solubility::Insoluble);
    EXPECT_EQ(local_solubility(twist(2, "T^2-2", 5), BigInt(7)).status, Solubility::Soluble);
}

TEST(Local, OddDegreeTwistsSolubleEverywhere)
{
    auto b = build_curve(2, P("T^3-2"));
    for (long d : {-30, -7, -1, 2, 3, 5, 6, 7, 10, 11, 33, 105}) {
        auto r = everywhere_locally_soluble(make_twist(b, BigInt(d)));
        EXPECT_EQ(r.status, Solubility::Soluble) << d;
    }
}

TEST(Local, OddValuationCases)
{
    auto tc = twist(2, "T^2+1", 3);
    EXPECT_EQ(local_solubility(tc, BigInt(3)).status, Solubility::Insoluble);
    EXPECT_EQ(local_solubility(twist(2, "T^2+1", 1), BigInt(3)).status, Solubility::Soluble);
    // y^2 = 7(t^2 + 1) at 7: t^2 + 1 has no root mod 7 so the value has odd valuation
    EXPECT_EQ(local_solubility(twist(2, "T^2+1", 7), BigInt(7)).status, Solubility::Insoluble);
}

TEST(Local, ShortcutAgreesWithSolver)
{
    auto b = build_curve(2, P("T^6+3*T+5"));
    for (uint64_t p : {101, 103, 107, 109, 113})
        for (long d : {1, -1, 2, 3, -5}) {
            BigInt pb((unsigned long)p), db(d);
            auto fast = local_solubility(b, db, pb, -1, true);
            auto slow = local_solubility(b, db, pb, -1, false);
            EXPECT_EQ(fast.status, slow.status) << p << " " << d;
        }
}

TEST(Els, Examples)
{
    EXPECT_EQ(everywhere_locally_soluble(twist(2, "T^3-2", 7)).status, Solubility::Soluble);
    auto r = everywhere_locally_soluble(twist(2, "T^4+1", 3));
    EXPECT_EQ(r.status, Solubility::Insoluble);
    bool at3 = false;
    for (auto &l : r.log)
        at3 |= l.place == "3" && l.status == Solubility::Insoluble;
    EXPECT_TRUE(at3);
    // t = 0 gives y = 1
    EXPECT_EQ(everywhere_locally_soluble(twist(2, "T^8+1", 1)).status, Solubility::Soluble);
}

TEST(MapTwistPoint, Examples)
{
    auto base = build_curve(2, P("T^4+1"));
    // 2^4 = 2 * 2^2 * (1 + 1)
    auto m = map_twist_point(4, 2, BigInt(2), CurvePoint{2, 1, 1}, base);
    EXPECT_EQ(m, (CurvePoint{2, 1, 1}));
    auto z = map_twist_point(4, 2, BigInt(2), CurvePoint{0, 5, 1}, base);
    EXPECT_EQ(z.y, 0);
    EXPECT_THROW(map_twist_point(4, 2, BigInt(2), CurvePoint{3, 1, 1}, base), std::domain_error);
}

TEST(AdmissibleScan, SplittingPrimesOfDegreeEight)
{
    auto cov = quad_cover(P("T^8+1"));
    auto t0 = first_nontrivial_point(cov);
    EXPECT_EQ(t0, ProjectivePoint::make(1, 1));
    auto sc = admissible_prime_scan(cov, t0, 1000);
    EXPECT_EQ(sc.m0, 2);
    // T^8 + 1 splits mod p exactly when p = 1 mod 16
    std::vector<uint64_t> want;
    for (auto p : primes_up_to(1000))
        if (p % 16 == 1)
            want.push_back(uint64_t(p));
    std::vector<uint64_t> got;
    for (auto &t : sc.twists) {
        got.push_back(t.p);
        EXPECT_EQ(t.d, 2 * BigInt((unsigned long)t.p));
        EXPECT_EQ(t.verified, Solubility::Soluble);
    }
    EXPECT_EQ(got, want);
    EXPECT_TRUE(admissible_prime_scan(cov, t0, 16).twists.empty());
    EXPECT_THROW(admissible_prime_scan(quad_cover(P("T^3-2")), t0, 100), std::domain_error);
}

TEST(HasseCandidates, DegreeEight)
{
    auto cov = quad_cover(P("T^8+1"));
    auto c = hasse_failure_candidates(cov, 200, 1000, 2);
    ASSERT_EQ(c.size(), 6u);
    EXPECT_EQ(c[0].d, 34);
    EXPECT_TRUE(c[0].admissible);
    for (auto &h : c) {
        EXPECT_EQ(h.height, 1000);
        auto tc = make_twist(build_curve(2, cov.P), h.d);
        EXPECT_EQ(everywhere_locally_soluble(tc).status, Solubility::Soluble);
        EXPECT_TRUE(search_points(tc, 1000, true).empty());
    }
    EXPECT_TRUE(hasse_failure_candidates(cov, 1, 1000).empty());
    EXPECT_THROW(hasse_failure_candidates(quad_cover(P("T^7+2")), 100, 100), std::domain_error);
}
