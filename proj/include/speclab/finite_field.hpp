#pragma once

#include "speclab/polynomial.hpp"
#include "speclab/rng.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

namespace speclab {

/// Polynomial over F_p (p < 2^62), coefficients low -> high, trimmed.
using FpPoly = std::vector<uint64_t>;

namespace fp {

inline uint64_t mul(uint64_t a, uint64_t b, uint64_t p) { return uint64_t((unsigned __int128)a * b % p); }
inline uint64_t add(uint64_t a, uint64_t b, uint64_t p) { return (a + b) % p; }
inline uint64_t sub(uint64_t a, uint64_t b, uint64_t p) { return (a + p - b) % p; }
inline uint64_t pw(uint64_t b, uint64_t e, uint64_t p) { return detail::powmod64(b, e, p); }
inline uint64_t inv(uint64_t a, uint64_t p) { return pw(a, p - 2, p); }

inline void trim(FpPoly &f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

inline int deg(const FpPoly &f) { return int(f.size()) - 1; }

inline FpPoly reduce(const IntPolynomial &P, uint64_t p)
{
    FpPoly f;
    BigInt pb((unsigned long)p), r;
    for (const auto &a : P.coeffs()) {
        mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), pb.get_mpz_t());
        f.push_back(mpz_get_ui(r.get_mpz_t()));
    }
    trim(f);
    return f;
}

inline IntPolynomial lift(const FpPoly &f)
{
    std::vector<BigInt> v;
    for (uint64_t a : f)
        v.emplace_back((unsigned long)a);
    return IntPolynomial(std::move(v));
}

inline FpPoly add(const FpPoly &a, const FpPoly &b, uint64_t p)
{
    FpPoly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = add(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0, p);
    trim(r);
    return r;
}

inline FpPoly sub(const FpPoly &a, const FpPoly &b, uint64_t p)
{
    FpPoly r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = sub(i < a.size() ? a[i] : 0, i < b.size() ? b[i] : 0, p);
    trim(r);
    return r;
}

inline FpPoly mul(const FpPoly &a, const FpPoly &b, uint64_t p)
{
    if (a.empty() || b.empty())
        return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i])
            continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = add(r[i + j], mul(a[i], b[j], p), p);
    }
    trim(r);
    return r;
}

inline FpPoly scale(FpPoly a, uint64_t s, uint64_t p)
{
    for (auto &x : a)
        x = mul(x, s, p);
    trim(a);
    return a;
}

/// (quotient, remainder) of a by nonzero b.
inline std::pair<FpPoly, FpPoly> divmod(FpPoly a, const FpPoly &b, uint64_t p)
{
    if (b.empty())
        throw std::domain_error("division by zero polynomial");
    const int db = deg(b);
    if (deg(a) < db)
        return {{}, a};
    uint64_t il = inv(b.back(), p);
    FpPoly q(size_t(deg(a) - db) + 1, 0);
    for (int i = deg(a); i >= db; --i) {
        uint64_t f = mul(a[i], il, p);
        q[i - db] = f;
        if (!f)
            continue;
        for (int j = 0; j <= db; ++j)
            a[i - db + j] = sub(a[i - db + j], mul(f, b[j], p), p);
    }
    a.resize(size_t(db));
    trim(a);
    trim(q);
    return {q, a};
}

inline FpPoly mod(const FpPoly &a, const FpPoly &b, uint64_t p) { return divmod(a, b, p).second; }

inline FpPoly monic(FpPoly a, uint64_t p)
{
    if (a.empty())
        return a;
    return scale(std::move(a), inv(a.back(), p), p);
}

inline FpPoly gcd(FpPoly a, FpPoly b, uint64_t p)
{
    while (!b.empty()) {
        FpPoly r = mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(std::move(a), p);
}

/// s, t with s*a + t*b = gcd(a, b) (monic).
inline std::tuple<FpPoly, FpPoly, FpPoly> xgcd(FpPoly a, FpPoly b, uint64_t p)
{
    FpPoly s0{1}, s1{}, t0{}, t1{1};
    while (!b.empty()) {
        auto [q, r] = divmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
        FpPoly s2 = sub(s0, mul(q, s1, p), p);
        FpPoly t2 = sub(t0, mul(q, t1, p), p);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    uint64_t il = inv(a.back(), p);
    return {scale(a, il, p), scale(s0, il, p), scale(t0, il, p)};
}

inline FpPoly derivative(const FpPoly &a, uint64_t p)
{
    FpPoly r;
    for (size_t i = 1; i < a.size(); ++i)
        r.push_back(mul(a[i], i % p, p));
    trim(r);
    return r;
}

/// base^e mod m, e given as a BigInt.
inline FpPoly powmod(FpPoly base, const BigInt &e, const FpPoly &m, uint64_t p)
{
    FpPoly r{1};
    r = mod(r, m, p);
    base = mod(base, m, p);
    const size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
    for (size_t i = bits; i-- > 0;) {
        r = mod(mul(r, r, p), m, p);
        if (mpz_tstbit(e.get_mpz_t(), i))
            r = mod(mul(r, base, p), m, p);
    }
    return r;
}

inline uint64_t eval(const FpPoly &f, uint64_t x, uint64_t p)
{
    uint64_t r = 0;
    for (size_t i = f.size(); i-- > 0;)
        r = add(mul(r, x, p), f[i], p);
    return r;
}

/// Number of distinct roots in F_p: deg gcd(f, x^p - x).
inline int count_roots(const FpPoly &f0, uint64_t p)
{
    FpPoly f = monic(f0, p);
    if (deg(f) < 1)
        return 0;
    FpPoly xp = powmod(FpPoly{0, 1}, BigInt((unsigned long)p), f, p);
    FpPoly h = sub(xp, FpPoly{0, 1}, p);
    FpPoly g = gcd(f, h, p);
    return deg(g);
}

/// p-th root of a polynomial whose derivative vanishes.
inline FpPoly pth_root(const FpPoly &f, uint64_t p)
{
    FpPoly r;
    for (size_t i = 0; i < f.size(); i += p)
        r.push_back(f[i]);
    trim(r);
    return r;
}

/// Squarefree decomposition of a monic polynomial: list of (factor, multiplicity).
inline std::vector<std::pair<FpPoly, int>> squarefree(const FpPoly &f0, uint64_t p)
{
    std::vector<std::pair<FpPoly, int>> out;
    FpPoly f = monic(f0, p);
    if (deg(f) < 1)
        return out;
    FpPoly df = derivative(f, p);
    if (df.empty()) {
        for (auto &[g, m] : squarefree(pth_root(f, p), p))
            out.emplace_back(g, m * int(p));
        return out;
    }
    FpPoly c = gcd(f, df, p);
    FpPoly w = divmod(f, c, p).first;
    int i = 1;
    while (deg(w) > 0) {
        FpPoly y = gcd(w, c, p);
        FpPoly z = divmod(w, y, p).first;
        if (deg(z) > 0)
            out.emplace_back(monic(z, p), i);
        ++i;
        w = y;
        c = divmod(c, y, p).first;
    }
    if (deg(c) > 0) {
        for (auto &[g, m] : squarefree(pth_root(c, p), p))
            out.emplace_back(g, m * int(p));
    }
    return out;
}

/// Distinct-degree factorization of a squarefree monic polynomial.
inline std::vector<std::pair<FpPoly, int>> distinct_degree(FpPoly f, uint64_t p)
{
    std::vector<std::pair<FpPoly, int>> out;
    FpPoly x{0, 1};
    FpPoly h = x;
    BigInt pb((unsigned long)p);
    for (int d = 1; 2 * d <= deg(f); ++d) {
        h = powmod(h, pb, f, p);
        FpPoly g = gcd(f, sub(h, x, p), p);
        if (deg(g) > 0) {
            out.emplace_back(g, d);
            f = divmod(f, g, p).first;
            h = mod(h, f, p);
        }
    }
    if (deg(f) > 0)
        out.emplace_back(f, deg(f));
    return out;
}

/// Splits a product of distinct monic irreducibles of degree d.
inline void equal_degree(const FpPoly &f, int d, uint64_t p, SplitRng &rng, std::vector<FpPoly> &out)
{
    if (deg(f) == d) {
        out.push_back(f);
        return;
    }
    BigInt pd = ipow(BigInt((unsigned long)p), d);
    BigInt e = (pd - 1) / 2;
    while (true) {
        FpPoly a(size_t(deg(f)), 0);
        for (auto &x : a)
            x = rng.below(p);
        trim(a);
        if (deg(a) < 1)
            continue;
        FpPoly b;
        if (p == 2) {
            // trace map a + a^2 + ... + a^(2^(d-1))
            FpPoly t = mod(a, f, p), acc = t;
            for (int i = 1; i < d; ++i) {
                t = mod(mul(t, t, p), f, p);
                acc = add(acc, t, p);
            }
            b = acc;
        } else {
            b = sub(powmod(a, e, f, p), FpPoly{1}, p);
        }
        FpPoly g = gcd(f, b, p);
        if (deg(g) > 0 && deg(g) < deg(f)) {
            equal_degree(g, d, p, rng, out);
            equal_degree(divmod(f, g, p).first, d, p, rng, out);
            return;
        }
    }
}

/// Distinct roots in F_p, ascending.
inline std::vector<uint64_t> roots(const FpPoly &f0, uint64_t p, SplitRng &rng)
{
    std::vector<uint64_t> out;
    FpPoly f = monic(f0, p);
    if (deg(f) < 1)
        return out;
    FpPoly xp = powmod(FpPoly{0, 1}, BigInt((unsigned long)p), f, p);
    FpPoly g = monic(gcd(f, sub(xp, FpPoly{0, 1}, p), p), p);
    if (deg(g) < 1)
        return out;
    std::vector<FpPoly> lin;
    equal_degree(g, 1, p, rng, lin);
    for (auto &l : lin)
        out.push_back(sub(0, l[0], p));
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace fp

struct FpFactorization {
    uint64_t p = 0;
    uint64_t unit = 1;                           ///< leading coefficient mod p
    std::vector<std::pair<FpPoly, int>> factors; ///< monic irreducible, multiplicity

    std::vector<int> degree_pattern() const
    {
        std::vector<int> d;
        for (auto &[f, m] : factors)
            for (int i = 0; i < m; ++i)
                d.push_back(fp::deg(f));
        std::sort(d.begin(), d.end());
        return d;
    }
};

/// Complete factorization of P mod p (Cantor-Zassenhaus, reproducible for a given seed).
inline FpFactorization factor_mod_p(const IntPolynomial &P, uint64_t p, uint64_t seed = 0)
{
    if (p < 2 || p >= (uint64_t(1) << 62) || !detail::is_prime64(p))
        throw std::invalid_argument("factor_mod_p needs a word-size prime");
    FpPoly f = fp::reduce(P, p);
    if (f.empty())
        throw std::domain_error("vanishing reduction");
    FpFactorization out;
    out.p = p;
    out.unit = f.back();
    SplitRng rng(seed, p);
    for (auto &[sq, mult] : fp::squarefree(f, p)) {
        for (auto &[g, d] : fp::distinct_degree(sq, p)) {
            std::vector<FpPoly> parts;
            fp::equal_degree(g, d, p, rng, parts);
            for (auto &q : parts)
                out.factors.emplace_back(q, mult);
        }
    }
    std::sort(out.factors.begin(), out.factors.end(), [](const auto &a, const auto &b) {
        if (a.first.size() != b.first.size())
            return a.first.size() < b.first.size();
        if (a.first != b.first)
            return a.first < b.first;
        return a.second < b.second;
    });
    return out;
}

/// True when P mod p has no root in F_p (P mod p nonzero).
inline bool rootless_mod_p(const IntPolynomial &P, uint64_t p)
{
    FpPoly f = fp::reduce(P, p);
    if (f.empty())
        throw std::domain_error("vanishing reduction");
    if (fp::deg(f) < 1)
        return true;
    return fp::count_roots(f, p) == 0;
}

/// True when P mod p is a product of distinct linear factors of full degree.
inline bool splits_completely_mod_p(const IntPolynomial &P, uint64_t p)
{
    FpPoly f = fp::reduce(P, p);
    if (fp::deg(f) != P.degree())
        return false;
    return fp::count_roots(f, p) == P.degree();
}

} // namespace speclab
