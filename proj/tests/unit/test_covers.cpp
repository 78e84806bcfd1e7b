#include "speclab/beckmann.hpp"
#include "speclab/rng.hpp"

#include <gtest/gtest.h>

using namespace speclab;

static IntPolynomial P(const char *s) { return parse_polynomial(s); }
static ProjectivePoint pt(long u, long v) { return ProjectivePoint::make(u, v); }

TEST(QuadCover, BranchOrbits)
{
    auto a = quad_cover(P("T^2-2"));
    EXPECT_EQ(a.r, 2);
    EXPECT_FALSE(a.infinity_branch);
    ASSERT_EQ(a.branch_orbits.size(), 1u);
    EXPECT_EQ(a.branch_orbits[0].hom, HomogPolynomial::from(P("T^2-2"), 2));

    auto b = quad_cover(P("T^3-2"));
    EXPECT_EQ(b.r, 4);
    EXPECT_TRUE(b.infinity_branch);
    ASSERT_EQ(b.branch_orbits.size(), 2u);
    EXPECT_TRUE(b.branch_orbits[1].at_infinity());

    EXPECT_THROW(quad_cover(P("T^4-4*T^2+4")), std::domain_error);
}

TEST(QuadSpecialize, Examples)
{
    auto c = quad_cover(P("T^2-2"));
    auto a = quad_specialize(c, pt(3, 1));
    EXPECT_EQ(a.group, "Z/2");
    EXPECT_EQ(a.m, 7);
    EXPECT_EQ(a.dF, 28);
    EXPECT_EQ(a.ramified, (std::vector<BigInt>{2, 7}));

    auto b = quad_specialize(c, pt(1, 3));
    EXPECT_EQ(b.m, -17);
    EXPECT_EQ(b.dF, -68);

    EXPECT_THROW(quad_specialize(quad_cover(P("T^2-4")), pt(2, 1)), std::domain_error);
    // 49 - 50 = -1
    EXPECT_EQ(quad_specialize(c, pt(7, 5)).m, -1);
}

TEST(QuadSpecialize, OddDegreeUsesV)
{
    // P_hom(u, v) * v for odd degree: t0 = 3/2 on T^3 - 2 gives (27 - 16) * 2
    auto r = quad_specialize(quad_cover(P("T^3-2")), pt(3, 2));
    EXPECT_EQ(r.m, 22);
    EXPECT_EQ(r.dF, 88);
}

TEST(QuadSpecialize, JsonShape)
{
    auto j = to_json(quad_specialize(quad_cover(P("T^2-2")), pt(3, 1)));
    EXPECT_EQ(j["t0"], "3/1");
    EXPECT_EQ(j["m"], "7");
    EXPECT_EQ(j["dF"], "28");
}

TEST(CubicCover, BranchData)
{
    auto c = cubic_cover("Y^3+T*Y+T");
    std::vector<std::pair<HomogPolynomial, int>> got;
    for (auto &o : c.branch_orbits)
        got.push_back({o.hom, o.e});
    ASSERT_EQ(got.size(), 3u);
    // branch points 0, -27/4 and infinity
    EXPECT_EQ(eval_proj(got[0].first, pt(0, 1)), 0);
    EXPECT_EQ(eval_proj(got[1].first, pt(-27, 4)), 0);
    EXPECT_TRUE(c.branch_orbits[2].at_infinity());
}

TEST(CubicSpecialize, Examples)
{
    auto c = cubic_cover("Y^3+T*Y+T");
    auto a = cubic_specialize(c, pt(1, 1));
    EXPECT_EQ(a.group, "S3");
    ASSERT_TRUE(a.dK);
    EXPECT_EQ(*a.dK, -31);
    EXPECT_EQ(abs(a.dF), 29791);
    EXPECT_THROW(cubic_specialize(c, pt(0, 1)), std::domain_error);

    auto k = cubic_specialize(cubic_cover("Y^3-3*Y+1"), pt(5, 1));
    EXPECT_EQ(k.group, "C3");
    EXPECT_EQ(*k.dK, 81);
}

TEST(CubicSpecialize, SexticDiscriminantInvariant)
{
    auto c = cubic_cover("Y^3+T*Y+T");
    for (long t = 1; t <= 30; ++t) {
        auto r = cubic_specialize(c, pt(t, 1));
        if (r.group != "S3")
            continue;
        BigInt dK = *r.dK;
        EXPECT_EQ(abs(r.dF), abs(quadratic_field_discriminant(dK)) * dK * dK) << t;
    }
}

TEST(SurveyPredicates, Examples)
{
    auto a = s3_survey_predicates(parse_bivariate("Y^3+T*Y+T"));
    EXPECT_TRUE(a.galois_S3_over_QT);
    EXPECT_FALSE(a.delta_irreducible);
    EXPECT_FALSE(a.branch_conjugate);

    auto b = s3_survey_predicates(parse_bivariate("Y^3+T^2+T+1"));
    EXPECT_FALSE(b.regular);

    auto c = s3_survey_predicates(parse_bivariate("Y^3+T*Y+1"));
    EXPECT_TRUE(c.delta_irreducible);
}

TEST(ChebotarevSieve, Densities)
{
    auto a = chebotarev_unramified_sieve(P("T^2+1"), 10000);
    for (auto p : a.primes)
        EXPECT_EQ(p % 4, 3u);
    EXPECT_NEAR(a.density, 0.5, 0.02);
    auto b = chebotarev_unramified_sieve(P("T^2-2"), 10000);
    for (auto p : b.primes)
        EXPECT_EQ(legendre(BigInt((unsigned long)2), BigInt((unsigned long)p)), -1);
    // T^4 + T + 1 has group S4
    auto c = chebotarev_unramified_sieve(P("T^4+T+1"), 100000);
    EXPECT_DOUBLE_EQ(c.predicted_sn, 0.375);
    EXPECT_NEAR(c.density / c.predicted_sn, 1.0, 0.05);
}

TEST(VerifyUnramified, QuadraticAndCubic)
{
    auto c = quad_cover(P("T^2+1"));
    auto sieve = unramified_sieve(c, 1000);
    ASSERT_FALSE(sieve.empty());
    std::vector<ProjectivePoint> samples;
    SplitRng rng(17, 0);
    while (samples.size() < 500) {
        int64_t u = rng.uniform(-1000, 1000), v = rng.uniform(1, 1000);
        if (std::gcd(u, v) == 1)
            samples.push_back(ProjectivePoint::make(u, v));
    }
    EXPECT_TRUE(verify_unramified(c, sieve, samples, PrimeSet{2}).empty());

    // infinity is a rational branch point here, so the cover sieve is empty;
    // integer t0 never meets infinity, so the finite locus alone is checked
    auto cub = cubic_cover("Y^3+T*Y+1");
    EXPECT_TRUE(unramified_sieve(cub, 300).empty());
    auto cs = chebotarev_unramified_sieve(P("4*T^3+27"), 300).primes;
    EXPECT_FALSE(cs.empty());
    std::vector<ProjectivePoint> ints;
    for (long t = -40; t <= 40; ++t)
        ints.push_back(pt(t, 1));
    EXPECT_TRUE(verify_unramified(cub, cs, ints, exceptional_superset(cub)).empty());

    EXPECT_TRUE(unramified_sieve(quad_cover(P("T^2-1")), 1000).empty());
}
