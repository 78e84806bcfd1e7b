#include "speclab/census.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace speclab;

static IntPolynomial P(const char *s) { return parse_polynomial(s); }

namespace {

// direct enumeration with the general polynomial routines
std::pair<uint64_t, uint64_t> brute_counts(int n, int N, int64_t H)
{
    uint64_t all = 0, sqf = 0;
    std::vector<int64_t> a(N + 1, -H);
    while (true) {
        if (a[N] != 0) {
            std::vector<BigInt> c;
            for (auto x : a)
                c.push_back(BigInt(long(x)));
            IntPolynomial f(c);
            bool ok = true;
            for (auto &[g, m] : squarefree_decomposition(f))
                if (g.degree() > 0 && m >= n)
                    ok = false;
            if (ok) {
                ++all;
                BigInt ct = content(f);
                if (ct == 1 || is_nfree(ct, 2))
                    ++sqf;
            }
        }
        int i = 0;
        while (i <= N && a[i] == H)
            a[i++] = -H;
        if (i > N)
            break;
        ++a[i];
    }
    return {all, sqf};
}

} // namespace

TEST(Counts, SmallBoxAgainstEnumeration)
{
    auto c = count_poly_sets(2, 2, 2);
    EXPECT_EQ(c.P, 92u);
    EXPECT_EQ(c.P2, 92u);
    EXPECT_EQ(*c.E, 112u);
    for (auto [n, N, H] : std::vector<std::tuple<int, int, int64_t>>{{2, 2, 3}, {2, 3, 2}, {3, 2, 3}, {2, 2, 6}}) {
        auto got = count_poly_sets(n, N, H, false);
        auto want = brute_counts(n, N, H);
        EXPECT_EQ(got.P, want.first) << n << " " << N << " " << H;
        EXPECT_EQ(got.P2, want.second) << n << " " << N << " " << H;
    }
}

TEST(Counts, ExtensionIdentity)
{
    for (int64_t H = 1; H <= 3; ++H) {
        auto two = count_poly_sets(2, 2, H);
        auto one = count_poly_sets(2, 1, H, false);
        EXPECT_EQ(*two.E, two.P2 + one.P2) << H;
    }
    auto three = count_poly_sets(2, 3, 2);
    EXPECT_EQ(three.r, 4);
    EXPECT_EQ(*three.E, count_poly_sets(2, 4, 2, false).P2 + three.P2);
    EXPECT_FALSE(count_poly_sets(3, 2, 2).E);
}

TEST(Counts, SquarefreeContentProportion)
{
    auto c = count_poly_sets(2, 2, 100, false);
    double zeta6 = std::pow(M_PI, 6) / 945;
    EXPECT_NEAR(double(c.P2) / double(c.P) * zeta6, 1.0, 0.02);
}

TEST(FieldCensus, SmallBounds)
{
    EXPECT_EQ(quad_field_census(10), (std::vector<int64_t>{-8, -7, -4, -3, 5, 8}));
    EXPECT_EQ(quad_field_census(4), (std::vector<int64_t>{-4, -3}));
    EXPECT_TRUE(quad_field_census(1).empty());
    EXPECT_EQ(field_kernel(-4), -1);
    EXPECT_EQ(field_kernel(12), 3);
    EXPECT_EQ(field_kernel(-7), -7);
    auto big = quad_field_census(10000);
    EXPECT_NEAR(double(big.size()) / (6 * 10000.0 / (M_PI * M_PI)), 1.0, 0.01);
}

TEST(Twists, NormCriterionForControl)
{
    // odd prime d: d (t^2 - 2 z^2) = y^2 has a point iff d = +-1 mod 8
    auto recs = classify_twists(quad_cover(P("T^2-2")), 60, {10, 100}, 2);
    ASSERT_FALSE(recs.empty());
    for (size_t i = 1; i < recs.size(); ++i)
        EXPECT_LE(std::abs(recs[i - 1].D), std::abs(recs[i].D));
    for (auto &r : recs) {
        BigInt ad = BigInt(long(std::abs(r.d)));
        if (ad == 2 || !is_prime(ad))
            continue;
        long m = ((r.d % 8) + 8) % 8;
        bool want = m == 1 || m == 7;
        EXPECT_EQ(r.status == TwistStatus::Found, want) << r.d;
        EXPECT_NE(r.status, TwistStatus::Unknown) << r.d;
    }
}

TEST(Twists, CsvIsStableAcrossJobs)
{
    auto cov = quad_cover(P("T^6+T+1"));
    std::ostringstream a, b;
    write_twist_csv(a, classify_twists(cov, 200, {10, 100}, 1));
    write_twist_csv(b, classify_twists(cov, 200, {10, 100}, 4));
    EXPECT_EQ(a.str(), b.str());
}

TEST(DensitySeries, PinnedSmallRun)
{
    auto s = twist_density_series(quad_cover(P("T^6+T+1")), {100, 200, 500, 1000}, {10, 100}, 2);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s.denominator, (std::vector<uint64_t>{61, 122, 306, 607}));
    EXPECT_EQ(s.numerator, (std::vector<uint64_t>{4, 5, 6, 13}));
    EXPECT_EQ(s.unknowns, (std::vector<uint64_t>{8, 16, 53, 109}));
    EXPECT_TRUE(twist_density_series(quad_cover(P("T^2-2")), {}, {10}).x.empty());
    EXPECT_THROW(twist_density_series(quad_cover(P("T^2-2")), {100, 50}, {10}), std::invalid_argument);
    std::ostringstream os;
    write_series_csv(os, s);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "x,numerator,denominator,unknowns,lower,upper");
}

TEST(DensitySeries, LocalGlobal)
{
    auto lg = local_global_ratio_series(quad_cover(P("T^8+1")), {100, 1000}, 1000, 2);
    EXPECT_EQ(lg.global.numerator, (std::vector<uint64_t>{1, 2}));
    EXPECT_EQ(lg.local.numerator, (std::vector<uint64_t>{3, 23}));
    EXPECT_EQ(lg.local.unknowns, (std::vector<uint64_t>{0, 0}));
    // odd degree: every twist is locally soluble
    auto odd = local_global_ratio_series(quad_cover(P("T^3-2")), {100}, 100, 2);
    EXPECT_EQ(odd.local.numerator[0], odd.local.denominator[0]);
    EXPECT_TRUE(local_global_ratio_series(quad_cover(P("T^8+1")), {1}, 100).local.numerator == std::vector<uint64_t>{0});
}

TEST(LogFit, SyntheticSeries)
{
    std::vector<int64_t> grid{1000, 3000, 10000, 30000, 100000, 1000000};
    auto a = fit_log_exponent(synthetic_series(grid, [](double x) { return 1 / std::log(x); }));
    EXPECT_NEAR(a.alpha, 1.0, 0.01);
    auto b = fit_log_exponent(synthetic_series(grid, [](double) { return 0.3; }));
    EXPECT_NEAR(b.alpha, 0.0, 0.01);
    auto c = fit_log_exponent(synthetic_series(grid, [](double x) { return std::pow(std::log(x), -0.5); }));
    EXPECT_NEAR(c.alpha, 0.5, 0.01);
    EXPECT_THROW(fit_log_exponent(synthetic_series({10, 100, 1000}, [](double) { return 0.5; })), std::invalid_argument);
}

TEST(Survey, ExhaustiveSmallBox)
{
    auto sv = s3_survey(1, 1, 1000000, 0, 4);
    EXPECT_TRUE(sv.exhaustive);
    EXPECT_EQ(sv.samples, 729u);
    EXPECT_EQ(sv.flag("galois_S3").hits, 566u);
    EXPECT_EQ(sv.flag("delta_irreducible").hits, 342u);
    EXPECT_EQ(sv.flag("leading_form").hits, 270u);
    EXPECT_EQ(sv.flag("branch_conjugate").hits, 210u);
    EXPECT_EQ(sv.flag("regular").hits, 548u);
    EXPECT_EQ(sv.flag("all").hits, 130u);
    EXPECT_THROW(s3_survey(1, 0, 100, 0), std::invalid_argument);
}

TEST(Survey, SampledRunIsSeeded)
{
    auto a = s3_survey(1, 20, 500, 1, 1);
    auto b = s3_survey(1, 20, 500, 1, 4);
    EXPECT_FALSE(a.exhaustive);
    for (auto &f : a.flags)
        EXPECT_EQ(f.hits, b.flag(f.name).hits);
}
