#pragma once

#include "speclab/exactmath.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace speclab {

struct GroupDescriptor {
    uint64_t order = 1;
    uint64_t least_prime = 0; ///< recomputed from order by make_group
    std::optional<int> rank_lower;
    std::optional<std::vector<uint64_t>> cyclic_quotients;
    std::optional<bool> nilpotent;
    std::optional<uint64_t> central_prime; ///< least q with a central element of order q in some inertia group
};

/// Canonical a/b.
inline BigRat rat(const BigInt &a, const BigInt &b)
{
    BigRat q(a, b);
    q.canonicalize();
    return q;
}

inline BigRat rat(long a, long b) { return rat(BigInt(a), BigInt(b)); }

inline uint64_t least_prime_factor(uint64_t n)
{
    if (n < 2)
        return 0;
    for (uint64_t p = 2; p * p <= n; ++p)
        if (n % p == 0)
            return p;
    return n;
}

inline GroupDescriptor make_group(uint64_t order)
{
    GroupDescriptor g;
    g.order = order;
    g.least_prime = least_prime_factor(order);
    return g;
}

/// Z/n with its cyclic quotients and nilpotent flag filled in.
inline GroupDescriptor cyclic_group(uint64_t n)
{
    GroupDescriptor g = make_group(n);
    std::vector<uint64_t> qs;
    for (uint64_t k = 1; k <= n; ++k)
        if (n % k == 0)
            qs.push_back(k);
    g.cyclic_quotients = qs;
    g.nilpotent = true;
    g.rank_lower = n > 1 ? 1 : 0;
    return g;
}

struct RamificationType {
    std::vector<int> e;

    int r() const { return int(e.size()); }
    int e0() const
    {
        if (e.empty())
            throw std::invalid_argument("empty ramification type");
        return *std::min_element(e.begin(), e.end());
    }
    int q0() const
    {
        int q = 0;
        for (int x : e) {
            int p = int(least_prime_factor(uint64_t(x)));
            if (q == 0 || p < q)
                q = p;
        }
        return q;
    }
    void validate() const
    {
        for (int x : e)
            if (x < 2)
                throw std::invalid_argument("ramification indices must be >= 2");
    }
    void validate(uint64_t order) const
    {
        validate();
        for (int x : e)
            if (order % uint64_t(x) != 0)
                throw std::invalid_argument("ramification index does not divide the group order");
    }
};

inline BigRat malle_alpha(uint64_t order)
{
    if (order < 2)
        throw std::invalid_argument("trivial group has no Malle exponent");
    uint64_t p = least_prime_factor(order);
    return rat(BigInt((unsigned long)p), BigInt((unsigned long)order) * BigInt((unsigned long)(p - 1)));
}

inline BigRat malle_alpha(const GroupDescriptor &G) { return malle_alpha(G.order); }

struct ConditionResult {
    bool holds = false;
    std::vector<std::string> cases; ///< sufficient cases that fired
};

/// r > 2 + 2/(q0 - 1), tagged by the integer case that matches.
inline ConditionResult condition_eq1(const RamificationType &rt)
{
    rt.validate();
    const int r = rt.r(), q0 = rt.q0();
    ConditionResult res;
    res.holds = BigRat(r) > BigRat(2) + rat(2, q0 - 1);
    if (r >= 5)
        res.cases.push_back("r>=5");
    if (r >= 4 && q0 >= 3)
        res.cases.push_back("r>=4,q0>=3");
    if (r >= 3 && q0 >= 5)
        res.cases.push_back("r>=3,q0>=5");
    if (res.holds != !res.cases.empty())
        throw std::logic_error("branch-point condition disagrees with its case list");
    return res;
}

inline BigRat abc_exponent(const RamificationType &rt, uint64_t order)
{
    if (!condition_eq1(rt).holds)
        throw std::domain_error("branch-point condition fails");
    const int e0 = rt.e0(), q0 = rt.q0();
    BigRat tail = BigRat(rt.r() - 2) - rat(2, q0 - 1);
    BigRat res = BigRat(2) / BigRat(BigInt((unsigned long)order)) / (BigRat(1) - rat(1, e0)) / tail;
    res.canonicalize();
    return res;
}

struct SubsetExponent {
    BigRat e;
    size_t subset = 0;
};

/// Smallest exponent over user-given sub-multisets of branch indices; subsets failing the branch-point condition are skipped.
inline std::optional<SubsetExponent> best_subset_exponent(const std::vector<RamificationType> &subsets, uint64_t order)
{
    std::optional<SubsetExponent> best;
    for (size_t i = 0; i < subsets.size(); ++i) {
        if (subsets[i].e.empty() || !condition_eq1(subsets[i]).holds)
            continue;
        BigRat e = abc_exponent(subsets[i], order);
        if (!best || e < best->e)
            best = SubsetExponent{e, i};
    }
    return best;
}

struct MalleCondition : ConditionResult {
    BigRat threshold;              ///< right-hand side the branch count must exceed
    std::optional<BigRat> e;       ///< abc exponent when defined
    bool below_alpha = false;      ///< e < alpha(G)
};

/// r > 2 (q0/(q0-1) + (p-1) e0 / (p (e0-1))), equivalently e < alpha(G).
inline MalleCondition condition_eq2(const RamificationType &rt, const GroupDescriptor &G)
{
    rt.validate(G.order);
    const int r = rt.r(), e0 = rt.e0(), q0 = rt.q0();
    const uint64_t p = least_prime_factor(G.order);
    MalleCondition res;
    BigRat P = BigRat(BigInt((unsigned long)p));
    res.threshold = 2 * (rat(q0, q0 - 1) + (P - 1) * BigRat(e0) / (P * BigRat(e0 - 1)));
    res.threshold.canonicalize();
    res.holds = BigRat(r) > res.threshold;
    if (r >= 7)
        res.cases.push_back("r>=7");
    if (r == 6 && e0 >= 3)
        res.cases.push_back("r=6,e0>=3");
    if (r == 5 && q0 >= 3 && !(e0 == 3 && q0 == 3 && p == 3))
        res.cases.push_back("r=5,q0>=3");
    if (r == 4 && uint64_t(q0) > 2 * p)
        res.cases.push_back("r=4,q0>2p");
    if (condition_eq1(rt).holds) {
        res.e = abc_exponent(rt, G.order);
        res.below_alpha = *res.e < malle_alpha(G.order);
    } else if (res.holds) {
        throw std::logic_error("Malle-type condition holds without the branch-point condition");
    }
    if (res.holds != res.below_alpha)
        throw std::logic_error("Malle-type condition disagrees with e < alpha");
    if (!res.cases.empty() && !res.holds)
        throw std::logic_error("sufficient case fired but the condition fails");
    return res;
}

struct BetaResult {
    BigRat beta;
    bool chain_ok = false; ///< alpha >= beta > 1/|G| >= alpha/2
};

inline BetaResult beta_exponent(uint64_t q, uint64_t order)
{
    if (order < 2 || q < 2 || least_prime_factor(q) != q || order % q != 0)
        throw std::invalid_argument("q must be a prime dividing the group order");
    BetaResult res;
    res.beta = rat(BigInt((unsigned long)q), BigInt((unsigned long)(q - 1)) * BigInt((unsigned long)order));
    BigRat a = malle_alpha(order), inv = rat(BigInt(1), BigInt((unsigned long)order));
    res.chain_ok = a >= res.beta && res.beta > inv && inv >= a / 2;
    return res;
}

/// Riemann-Hurwitz: 2g - 2 = |G| (-2 + sum (1 - 1/e_i)).
inline int64_t rh_genus(uint64_t order, const RamificationType &rt)
{
    for (int x : rt.e)
        if (x < 2 || order % uint64_t(x) != 0)
            throw std::domain_error("inconsistent ramification type");
    BigRat s(-2);
    for (int x : rt.e)
        s += BigRat(1) - rat(1, x);
    BigRat two_g_minus_2 = BigRat(BigInt((unsigned long)order)) * s;
    two_g_minus_2.canonicalize();
    if (two_g_minus_2.get_den() != 1)
        throw std::domain_error("inconsistent ramification type");
    BigInt v = two_g_minus_2.get_num();
    if (v < -2 || v % 2 != 0)
        throw std::domain_error("inconsistent ramification type");
    return BigInt(v / 2 + 1).get_si();
}

/// Necessary Branch Cycle Lemma conditions for a regular cyclic Z/n cover over Q.
inline std::vector<std::string> bcl_cyclic_check(uint64_t n, const RamificationType &rt)
{
    rt.validate(n);
    std::vector<std::string> bad;
    uint64_t m = n;
    for (uint64_t p = 2; m > 1; ++p) {
        if (m % p != 0)
            continue;
        uint64_t q = 1;
        while (m % p == 0) {
            m /= p;
            q *= p;
        }
        // inertia generates Z/n, so some index is divisible by the full prime power
        uint64_t cnt = 0;
        for (int x : rt.e)
            if (uint64_t(x) % q == 0)
                ++cnt;
        uint64_t need = uint64_t(euler_phi(int64_t(q)));
        if (cnt < need)
            bad.push_back("needs " + std::to_string(need) + " branch points with index divisible by " +
                          std::to_string(q) + ", has " + std::to_string(cnt));
    }
    bool full = std::any_of(rt.e.begin(), rt.e.end(), [&](int x) { return uint64_t(x) == n; });
    if (full && rt.r() < euler_phi(int64_t(n)))
        bad.push_back("a point of index " + std::to_string(n) + " forces r >= " + std::to_string(euler_phi(int64_t(n))));
    if (n == 2 && rt.r() % 2 == 1)
        bad.push_back("quadratic covers have an even number of branch points");
    return bad;
}

struct ClauseResult {
    std::string tag;
    bool conditional = false; ///< also needs the lower Malle bound for G
};

/// Group-theoretic clauses giving density zero of the specialization set.
inline std::vector<ClauseResult> corollary_case_classifier(const GroupDescriptor &G)
{
    if (!G.rank_lower && !G.cyclic_quotients && !G.nilpotent)
        throw std::invalid_argument("insufficient descriptor");
    std::vector<ClauseResult> out;
    const bool nil = G.nilpotent.value_or(false);
    // the lower Malle bound is known for nilpotent groups
    if (G.rank_lower && *G.rank_lower >= 6)
        out.push_back({"abc:rank>=6", !nil});
    if (G.cyclic_quotients) {
        static const std::vector<uint64_t> small{1, 2, 3, 4, 5, 6, 8, 10, 12};
        for (uint64_t c : *G.cyclic_quotients)
            if (std::find(small.begin(), small.end(), c) == small.end()) {
                out.push_back({"abc:cyclic-quotient=" + std::to_string(c), !nil});
                break;
            }
    }
    if (G.nilpotent && nil) {
        uint64_t m = G.order, big = 0;
        for (uint64_t p = 2; p <= m; ++p)
            while (m % p == 0) {
                m /= p;
                big = p;
            }
        if (big >= 7)
            out.push_back({"abc:nilpotent-prime>=7", false});
        const bool even = G.order % 2 == 0;
        uint64_t o = G.order;
        while (o % 2 == 0)
            o /= 2;
        bool two_three = even && (o == 1 || o == 3);
        if (even && !two_three)
            out.push_back({"uniformity:even-order", false});
        if (!even) {
            int distinct = 0;
            uint64_t t = G.order;
            for (uint64_t p = 3; p <= t; p += 2)
                if (t % p == 0) {
                    ++distinct;
                    while (t % p == 0)
                        t /= p;
                }
            if (distinct >= 2)
                out.push_back({"uniformity:odd-order", false});
        }
    }
    return out;
}

/// Lower-bound exponent constant (|G|-1)/|G| / (3 |G|^4 log |G|).
inline double lower_bound_constant(uint64_t order)
{
    if (order < 2)
        throw std::invalid_argument("trivial group");
    double g = double(order);
    return (g - 1) / g / (3 * g * g * g * g * std::log(g));
}

} // namespace speclab
