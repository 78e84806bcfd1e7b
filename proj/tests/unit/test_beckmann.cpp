#include "speclab/beckmann.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace speclab;

static IntPolynomial P(const char *s) { return parse_polynomial(s); }
static ProjectivePoint pt(long u, long v) { return ProjectivePoint::make(u, v); }

TEST(IntersectionNumber, Examples)
{
    BranchOrbit o{HomogPolynomial::from(P("T^2-2"), 2), 2};
    EXPECT_EQ(intersection_number(o, pt(3, 1), BigInt(7)), 1);
    EXPECT_EQ(intersection_number(o, pt(1, 1), BigInt(5)), 0);
    BranchOrbit inf{HomogPolynomial::infinity(), 2};
    EXPECT_EQ(intersection_number(inf, pt(5, 1), BigInt(3)), 0);
    EXPECT_EQ(intersection_number(inf, pt(1, 9), BigInt(3)), 2);
}

TEST(ExceptionalSuperset, Examples)
{
    EXPECT_EQ(exceptional_superset(quad_cover(P("T^2-2"))), (PrimeSet{2}));
    auto b = exceptional_superset(quad_cover(P("3*T^2-2")));
    EXPECT_TRUE(b.count(2) && b.count(3));
    auto c = exceptional_superset(cubic_cover("Y^3+T*Y+T"));
    EXPECT_TRUE(c.count(2) && c.count(3));
}

TEST(Predict, Examples)
{
    auto c = quad_cover(P("T^2-2"));
    auto a = predict(c, pt(3, 1));
    EXPECT_EQ(a.predicted_order(BigInt(7)), 2);
    EXPECT_EQ(predict(c, pt(1, 3)).predicted_order(BigInt(17)), 2);
    auto z = predict(c, pt(7, 5));
    for (auto &[p, e] : z.primes)
        EXPECT_TRUE(e.exceptional);
    EXPECT_THROW(predict(quad_cover(P("T^2-1")), pt(1, 1)), std::domain_error);
}

TEST(Predict, InertiaOrderFromIntersection)
{
    // e = 3 at t = 0 on the cubic family; I = 3 kills inertia, I = 1 keeps it
    auto c = cubic_cover("Y^3+T*Y+T");
    EXPECT_EQ(predict(c, pt(125, 1)).predicted_order(BigInt(5)), 1);
    EXPECT_EQ(predict(c, pt(7, 1)).predicted_order(BigInt(7)), 3);
}

TEST(Consistency, QuadraticFamilies)
{
    for (auto s : {"T^2-2", "T^3-2", "T^4+T+1", "3*T^2-2"}) {
        auto st = consistency_check(quad_cover(P(s)), 1000, 1000, 7, 4);
        EXPECT_TRUE(st.mismatches.empty()) << s;
        EXPECT_EQ(st.uniqueness_violations, 0u) << s;
        EXPECT_EQ(st.bound_violations, 0u) << s;
        EXPECT_EQ(st.checked + st.skipped_branch, 1000u);
    }
}

TEST(Consistency, CubicFamily)
{
    auto st = consistency_check(cubic_cover("Y^3+T*Y+T"), 1000, 1000, 7, 4);
    EXPECT_EQ(st.checked, 1000u);
    EXPECT_TRUE(st.mismatches.empty());
}

TEST(Consistency, BranchHitsAreSkipped)
{
    // height 1 includes t0 = 1 and -1, both roots of T^2 - 1
    auto st = consistency_check(quad_cover(P("T^2-1")), 200, 1, 3);
    EXPECT_GT(st.skipped_branch, 0u);
    EXPECT_EQ(st.checked + st.skipped_branch, 200u);
}

TEST(Consistency, IndependentOfJobs)
{
    auto c = quad_cover(P("T^3-2"));
    auto a = consistency_check(c, 300, 500, 21, 1, true);
    auto b = consistency_check(c, 300, 500, 21, 4, true);
    std::ostringstream sa, sb;
    write_beckmann_csv(sa, a.rows);
    write_beckmann_csv(sb, b.rows);
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_EQ(sa.str().substr(0, sa.str().find('\n')), "t0,prime,orbit,I_p,predicted_order,actual_ramified");
}
