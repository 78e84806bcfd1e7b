#pragma once

#include "speclab/finite_field.hpp"

#include <algorithm>
#include <vector>

namespace speclab {

inline constexpr int kFactorDegreeCap = 24;

/// P = content * prod f_i^{m_i}, f_i primitive irreducible with positive lc.
struct QFactorization {
    BigInt content = 1; ///< signed
    std::vector<std::pair<IntPolynomial, int>> factors;

    IntPolynomial expand() const
    {
        IntPolynomial r = IntPolynomial::constant(content);
        for (auto &[f, m] : factors)
            r = r * pow(f, m);
        return r;
    }
    bool irreducible() const { return factors.size() == 1 && factors[0].second == 1; }
    bool squarefree() const
    {
        for (auto &[f, m] : factors)
            if (m > 1)
                return false;
        return true;
    }
    bool has_linear_factor() const
    {
        for (auto &[f, m] : factors)
            if (f.degree() == 1)
                return true;
        return false;
    }
};

/// Yun's algorithm over Q on a primitive polynomial: (squarefree part, multiplicity).
inline std::vector<std::pair<IntPolynomial, int>> squarefree_decomposition(const IntPolynomial &f0)
{
    std::vector<std::pair<IntPolynomial, int>> out;
    IntPolynomial f = primitive_part(f0);
    if (f.degree() < 1)
        return out;
    IntPolynomial df = f.derivative();
    IntPolynomial a = gcd(f, df);
    IntPolynomial b = exact_div(f, a);
    IntPolynomial c = exact_div(df, a);
    IntPolynomial d = c - b.derivative();
    for (int i = 1; b.degree() >= 1; ++i) {
        IntPolynomial g = d.is_zero() ? primitive_part(b) : gcd(b, d);
        if (g.degree() >= 1)
            out.emplace_back(g, i);
        IntPolynomial nb = exact_div(b, g);
        IntPolynomial nc = d.is_zero() ? IntPolynomial{} : exact_div(d, g);
        b = nb;
        c = nc;
        d = c - b.derivative();
    }
    return out;
}

namespace detail {

inline IntPolynomial mod_coeffs(const IntPolynomial &f, const BigInt &m)
{
    std::vector<BigInt> v = f.coeffs();
    for (auto &a : v)
        mpz_fdiv_r(a.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return IntPolynomial(std::move(v));
}

inline IntPolynomial symmetric_mod(const IntPolynomial &f, const BigInt &m)
{
    BigInt half = m / 2;
    std::vector<BigInt> v = f.coeffs();
    for (auto &a : v) {
        mpz_fdiv_r(a.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
        if (a > half)
            a -= m;
    }
    return IntPolynomial(std::move(v));
}

/// Lifts F = G*H mod p (G, H monic, coprime mod p, F monic mod p^k) to mod p^k.
inline std::pair<IntPolynomial, IntPolynomial> hensel_pair(const IntPolynomial &F, const FpPoly &g, const FpPoly &h,
                                                           uint64_t p, int k)
{
    auto [one, s, t] = fp::xgcd(g, h, p);
    (void)one;
    IntPolynomial G = fp::lift(g), H = fp::lift(h);
    BigInt pb((unsigned long)p), pj = pb;
    for (int j = 1; j < k; ++j) {
        IntPolynomial diff = F - G * H;
        std::vector<BigInt> ev = diff.coeffs();
        for (auto &a : ev) {
            mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), pj.get_mpz_t());
        }
        FpPoly e = fp::reduce(IntPolynomial(ev), p);
        FpPoly dG = fp::mod(fp::mul(t, e, p), g, p);
        FpPoly dH = fp::divmod(fp::sub(e, fp::mul(dG, h, p), p), g, p).first;
        G += pj * fp::lift(dG);
        H += pj * fp::lift(dH);
        pj *= pb;
        G = mod_coeffs(G, pj);
        H = mod_coeffs(H, pj);
    }
    return {G, H};
}

inline std::vector<IntPolynomial> hensel_all(const IntPolynomial &F, const std::vector<FpPoly> &gs, uint64_t p, int k,
                                             const BigInt &pk)
{
    if (gs.size() == 1)
        return {mod_coeffs(F, pk)};
    FpPoly rest{1};
    for (size_t i = 1; i < gs.size(); ++i)
        rest = fp::mul(rest, gs[i], p);
    auto [G, H] = hensel_pair(F, gs[0], rest, p, k);
    std::vector<IntPolynomial> out{G};
    std::vector<FpPoly> tail(gs.begin() + 1, gs.end());
    for (auto &x : hensel_all(H, tail, p, k, pk))
        out.push_back(x);
    return out;
}

/// Zassenhaus factorization of a primitive squarefree polynomial, positive lc.
inline std::vector<IntPolynomial> zassenhaus(IntPolynomial f)
{
    if (f.degree() <= 1)
        return {f};
    // prime selection: fewest modular factors among the first few good primes
    uint64_t best_p = 0;
    std::vector<FpPoly> best;
    int tried = 0;
    for (uint64_t p = 3; tried < 6; p += 2) {
        if (!is_prime64(p))
            continue;
        if (mpz_divisible_ui_p(f.lc().get_mpz_t(), (unsigned long)p))
            continue;
        FpPoly fr = fp::reduce(f, p);
        if (fp::deg(fp::gcd(fr, fp::derivative(fr, p), p)) > 0)
            continue;
        ++tried;
        auto fac = factor_mod_p(f, p, p);
        if (fac.factors.size() == 1)
            return {f};
        if (best_p == 0 || fac.factors.size() < best.size()) {
            best_p = p;
            best.clear();
            for (auto &[g, m] : fac.factors)
                best.push_back(g);
        }
    }
    const uint64_t p = best_p;
    // Mignotte-style bound on factor coefficients times |lc|
    BigInt norm2 = 0;
    for (auto &a : f.coeffs())
        norm2 += a * a;
    BigInt norm = sqrt(norm2) + 1;
    BigInt bound = 2 * abs(f.lc()) * ipow(BigInt(2), f.degree()) * norm;
    BigInt pb((unsigned long)p), pk = pb;
    int k = 1;
    while (pk <= bound) {
        pk *= pb;
        ++k;
    }
    BigInt lcinv;
    mpz_invert(lcinv.get_mpz_t(), f.lc().get_mpz_t(), pk.get_mpz_t());
    IntPolynomial F = mod_coeffs(lcinv * f, pk);
    std::vector<IntPolynomial> lifted = hensel_all(F, best, p, k, pk);

    std::vector<IntPolynomial> result;
    size_t s = 1;
    while (2 * s <= lifted.size()) {
        bool found = false;
        std::vector<size_t> idx(s);
        for (size_t i = 0; i < s; ++i)
            idx[i] = i;
        while (true) {
            IntPolynomial g = IntPolynomial::constant(f.lc());
            for (size_t i : idx)
                g = mod_coeffs(g * lifted[i], pk);
            g = primitive_part(symmetric_mod(g, pk));
            auto q = divide_exact(f, g);
            if (q) {
                result.push_back(g);
                f = primitive_part(*q);
                std::vector<IntPolynomial> rest;
                for (size_t i = 0, j = 0; i < lifted.size(); ++i) {
                    if (j < s && idx[j] == i) {
                        ++j;
                        continue;
                    }
                    rest.push_back(lifted[i]);
                }
                lifted = rest;
                found = true;
                break;
            }
            // next combination
            int pos = int(s) - 1;
            while (pos >= 0 && idx[pos] == lifted.size() - s + pos)
                --pos;
            if (pos < 0)
                break;
            ++idx[pos];
            for (size_t i = pos + 1; i < s; ++i)
                idx[i] = idx[i - 1] + 1;
        }
        if (!found)
            ++s;
    }
    if (f.degree() >= 1)
        result.push_back(f);
    return result;
}

} // namespace detail

/// Complete factorization over Q: content times irreducible primitive factors.
inline QFactorization factor_over_Q(const IntPolynomial &P)
{
    if (P.is_zero())
        throw std::domain_error("factorization of the zero polynomial");
    if (P.degree() > kFactorDegreeCap)
        throw std::domain_error("degree cap exceeded");
    QFactorization out;
    out.content = content(P);
    if (P.lc() < 0)
        out.content = -out.content;
    for (auto &[sq, m] : squarefree_decomposition(P)) {
        for (auto &g : detail::zassenhaus(primitive_part(sq)))
            out.factors.emplace_back(primitive_part(g), m);
    }
    std::sort(out.factors.begin(), out.factors.end(), [](const auto &a, const auto &b) {
        if (a.first != b.first)
            return a.first < b.first;
        return a.second < b.second;
    });
    // fix the sign so that the expansion matches exactly
    IntPolynomial e = out.expand();
    if (e != P) {
        if (-e == P)
            out.content = -out.content;
        else
            throw std::logic_error("factorization does not reproduce its input");
    }
    return out;
}

/// Homogeneous minimal polynomial of the roots of an irreducible P: content 1, positive lc.
inline HomogPolynomial homogenize_minpoly(const IntPolynomial &P)
{
    if (P.degree() < 1 || !factor_over_Q(P).irreducible())
        throw std::domain_error("not a minimal polynomial");
    IntPolynomial q = primitive_part(P);
    return HomogPolynomial::from(q, q.degree());
}

/// Squarefree check over Q (gcd(P, P') constant).
inline bool is_separable(const IntPolynomial &P)
{
    if (P.degree() < 1)
        return true;
    return gcd(P, P.derivative()).degree() == 0;
}

struct RealRootInfo {
    int real_roots = 0;         ///< distinct real roots
    bool takes_positive = false; ///< P(t) > 0 for some real t
};

namespace detail {

inline int sign_at_inf(const IntPolynomial &p, bool plus)
{
    if (p.is_zero())
        return 0;
    int s = sgn(p.lc());
    if (!plus && p.degree() % 2)
        s = -s;
    return s;
}

/// Distinct real roots of a nonzero polynomial via a Sturm chain.
inline int sturm_count(const IntPolynomial &p0)
{
    IntPolynomial p = primitive_part(p0);
    if (p.degree() < 1)
        return 0;
    std::vector<IntPolynomial> chain{p, p.derivative()};
    while (true) {
        const IntPolynomial &a = chain[chain.size() - 2];
        const IntPolynomial &b = chain.back();
        if (b.degree() < 1)
            break;
        IntPolynomial r = pseudo_rem(a, b);
        // pseudo-remainder carries lc(b)^(da-db+1); keep the sign of the true remainder
        int delta = a.degree() - b.degree() + 1;
        if (sgn(b.lc()) < 0 && delta % 2)
            r = -r;
        if (r.is_zero())
            break;
        BigInt c = content(r);
        std::vector<BigInt> v = r.coeffs();
        for (auto &x : v)
            mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), c.get_mpz_t());
        chain.push_back(-IntPolynomial(std::move(v)));
    }
    auto changes = [&](bool plus) {
        int cnt = 0, last = 0;
        for (auto &q : chain) {
            int s = sign_at_inf(q, plus);
            if (s == 0)
                continue;
            if (last != 0 && s != last)
                ++cnt;
            last = s;
        }
        return cnt;
    };
    return changes(false) - changes(true);
}

} // namespace detail

/// Distinct real roots of P and whether P takes positive values on R.
inline RealRootInfo real_roots_sign_analysis(const IntPolynomial &P)
{
    if (P.is_zero())
        throw std::domain_error("sign analysis of the zero polynomial");
    RealRootInfo info;
    if (P.degree() == 0) {
        info.takes_positive = P.lc() > 0;
        return info;
    }
    info.real_roots = detail::sturm_count(P);
    if (P.degree() % 2 == 1 || P.lc() > 0) {
        info.takes_positive = true;
        return info;
    }
    // even degree, negative lc: positive somewhere iff a root of odd multiplicity is real
    IntPolynomial odd = IntPolynomial::constant(1);
    for (auto &[g, m] : squarefree_decomposition(P))
        if (m % 2)
            odd = odd * g;
    info.takes_positive = odd.degree() >= 1 && detail::sturm_count(odd) > 0;
    return info;
}

} // namespace speclab
