#pragma once

#include "speclab/factor.hpp"

#include <vector>

namespace speclab {

namespace nf {

using RatVec = std::vector<BigRat>;
using IntMat = std::vector<std::vector<BigInt>>;
using RatMat = std::vector<RatVec>;

inline BigInt modp(const BigInt &a, const BigInt &p)
{
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
    return r;
}

/// Product in Q[x]/(f), f monic of degree n.
inline RatVec mul(const RatVec &a, const RatVec &b, const IntPolynomial &f)
{
    const int n = f.degree();
    RatVec r(size_t(2 * n - 1), BigRat(0));
    for (int i = 0; i < n; ++i) {
        if (a[i] == 0)
            continue;
        for (int j = 0; j < n; ++j)
            r[i + j] += a[i] * b[j];
    }
    for (int k = 2 * n - 2; k >= n; --k) {
        if (r[k] == 0)
            continue;
        BigRat c = r[k];
        r[k] = 0;
        for (int j = 0; j < n; ++j)
            r[k - n + j] -= c * f.coeff(j);
    }
    r.resize(size_t(n));
    return r;
}

inline RatMat inverse(RatMat m)
{
    const size_t n = m.size();
    RatMat inv(n, RatVec(n, BigRat(0)));
    for (size_t i = 0; i < n; ++i)
        inv[i][i] = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && m[piv][c] == 0)
            ++piv;
        if (piv == n)
            throw std::domain_error("singular basis matrix");
        std::swap(m[c], m[piv]);
        std::swap(inv[c], inv[piv]);
        BigRat s = m[c][c];
        for (size_t j = 0; j < n; ++j) {
            m[c][j] /= s;
            inv[c][j] /= s;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == c || m[r][c] == 0)
                continue;
            BigRat f = m[r][c];
            for (size_t j = 0; j < n; ++j) {
                m[r][j] -= f * m[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

inline RatVec row_times(const RatVec &x, const RatMat &m)
{
    RatVec r(m[0].size(), BigRat(0));
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0)
            continue;
        for (size_t j = 0; j < r.size(); ++j)
            r[j] += x[i] * m[i][j];
    }
    return r;
}

inline std::vector<BigInt> integral(const RatVec &x)
{
    std::vector<BigInt> r;
    for (auto &q : x) {
        if (q.get_den() != 1)
            throw std::logic_error("non-integral coordinates in order arithmetic");
        r.push_back(q.get_num());
    }
    return r;
}

/// Left kernel over F_p: all c with sum_i c_i rows[i] = 0.
inline std::vector<std::vector<BigInt>> left_kernel(const IntMat &rows, const BigInt &p)
{
    const size_t m = rows.size(), n = rows.empty() ? 0 : rows[0].size();
    // columns of the transposed system are the unknowns c_i
    IntMat a(n, std::vector<BigInt>(m));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j)
            a[j][i] = modp(rows[i][j], p);
    std::vector<int> pivcol;
    size_t r = 0;
    for (size_t c = 0; c < m && r < n; ++c) {
        size_t piv = r;
        while (piv < n && a[piv][c] == 0)
            ++piv;
        if (piv == n)
            continue;
        std::swap(a[r], a[piv]);
        BigInt inv;
        mpz_invert(inv.get_mpz_t(), a[r][c].get_mpz_t(), p.get_mpz_t());
        for (auto &x : a[r])
            x = modp(x * inv, p);
        for (size_t k = 0; k < n; ++k) {
            if (k == r || a[k][c] == 0)
                continue;
            BigInt f = a[k][c];
            for (size_t j = 0; j < m; ++j)
                a[k][j] = modp(a[k][j] - f * a[r][j], p);
        }
        pivcol.push_back(int(c));
        ++r;
    }
    std::vector<std::vector<BigInt>> ker;
    for (size_t free = 0; free < m; ++free) {
        if (std::find(pivcol.begin(), pivcol.end(), int(free)) != pivcol.end())
            continue;
        std::vector<BigInt> v(m, BigInt(0));
        v[free] = 1;
        for (size_t k = 0; k < pivcol.size(); ++k)
            v[pivcol[k]] = modp(-a[k][free], p);
        ker.push_back(v);
    }
    return ker;
}

/// Upper-triangular Z-basis of the lattice spanned by full-rank generator rows.
inline IntMat hnf(IntMat rows, size_t n)
{
    IntMat basis;
    for (size_t c = 0; c < n; ++c) {
        while (true) {
            size_t best = rows.size();
            for (size_t i = 0; i < rows.size(); ++i)
                if (rows[i][c] != 0 && (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c])))
                    best = i;
            if (best == rows.size())
                throw std::logic_error("lattice is not of full rank");
            bool done = true;
            for (size_t i = 0; i < rows.size(); ++i) {
                if (i == best || rows[i][c] == 0)
                    continue;
                BigInt q;
                mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[best][c].get_mpz_t());
                for (size_t j = 0; j < n; ++j)
                    rows[i][j] -= q * rows[best][j];
                if (rows[i][c] != 0)
                    done = false;
            }
            if (done) {
                basis.push_back(rows[best]);
                rows.erase(rows.begin() + long(best));
                break;
            }
        }
    }
    return basis;
}

} // namespace nf

/// v_p of the index [O_K : Z[x]/(f)] by Round 2 enlargement at p (f monic irreducible).
inline int index_valuation(const IntPolynomial &f, const BigInt &p)
{
    using namespace nf;
    const int n = f.degree();
    RatMat B(n, RatVec(n, BigRat(0)));
    for (int i = 0; i < n; ++i)
        B[i][i] = 1;
    BigInt q = p;
    while (q < n)
        q *= p;
    int total = 0;
    for (int round = 0; round < 64; ++round) {
        RatMat Binv = inverse(B);
        // multiplication table in order coordinates
        std::vector<std::vector<std::vector<BigInt>>> T(n, std::vector<std::vector<BigInt>>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                T[i][j] = integral(row_times(mul(B[i], B[j], f), Binv));
        auto omul = [&](const std::vector<BigInt> &a, const std::vector<BigInt> &b, bool reduce) {
            std::vector<BigInt> r(n, BigInt(0));
            for (int i = 0; i < n; ++i) {
                if (a[i] == 0)
                    continue;
                for (int j = 0; j < n; ++j) {
                    if (b[j] == 0)
                        continue;
                    BigInt s = a[i] * b[j];
                    for (int k = 0; k < n; ++k)
                        r[k] += s * T[i][j][k];
                }
            }
            if (reduce)
                for (auto &x : r)
                    x = modp(x, p);
            return r;
        };
        // p-radical: kernel of x -> x^q on O/pO
        IntMat frob;
        for (int i = 0; i < n; ++i) {
            std::vector<BigInt> base(n, BigInt(0));
            base[i] = 1;
            // identity element in order coordinates
            RatVec one(n, BigRat(0));
            one[0] = 1;
            std::vector<BigInt> acc = integral(row_times(one, Binv));
            for (size_t b = mpz_sizeinbase(q.get_mpz_t(), 2); b-- > 0;) {
                acc = omul(acc, acc, true);
                if (mpz_tstbit(q.get_mpz_t(), b))
                    acc = omul(acc, base, true);
            }
            frob.push_back(acc);
        }
        auto rad = left_kernel(frob, p);
        IntMat gens = rad;
        for (int i = 0; i < n; ++i) {
            std::vector<BigInt> e(n, BigInt(0));
            e[i] = p;
            gens.push_back(e);
        }
        IntMat M = hnf(gens, n);
        RatMat Mr(n, RatVec(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Mr[i][j] = BigRat(M[i][j]);
        RatMat Minv = inverse(Mr);
        // x in U iff x * I_p lies in p * I_p
        IntMat A;
        for (int i = 0; i < n; ++i) {
            std::vector<BigInt> e(n, BigInt(0)), row;
            e[i] = 1;
            for (int k = 0; k < n; ++k) {
                std::vector<BigInt> prod = omul(e, M[k], false);
                RatVec pr(prod.begin(), prod.end());
                for (auto &x : integral(row_times(pr, Minv)))
                    row.push_back(x);
            }
            A.push_back(row);
        }
        auto U = left_kernel(A, p);
        if (U.empty())
            break;
        IntMat ug = U;
        for (int i = 0; i < n; ++i) {
            std::vector<BigInt> e(n, BigInt(0));
            e[i] = p;
            ug.push_back(e);
        }
        IntMat W = hnf(ug, n);
        RatMat nb(n, RatVec(n, BigRat(0)));
        for (int i = 0; i < n; ++i) {
            RatVec w(W[i].begin(), W[i].end());
            RatVec row = row_times(w, B);
            for (int j = 0; j < n; ++j)
                nb[i][j] = row[j] / BigRat(p);
        }
        B = nb;
        total += int(U.size());
    }
    return total;
}

/// Dedekind criterion: true when p does not divide the index of Z[x]/(f).
inline bool dedekind_p_maximal(const IntPolynomial &f, uint64_t p)
{
    auto fac = factor_mod_p(f, p, 0);
    FpPoly g{1}, h{1};
    for (auto &[gi, e] : fac.factors) {
        g = fp::mul(g, gi, p);
        for (int k = 1; k < e; ++k)
            h = fp::mul(h, gi, p);
    }
    IntPolynomial diff = f - fp::lift(g) * fp::lift(h);
    std::vector<BigInt> v = diff.coeffs();
    for (auto &a : v)
        mpz_divexact_ui(a.get_mpz_t(), a.get_mpz_t(), (unsigned long)p);
    FpPoly F = fp::reduce(IntPolynomial(v), p);
    FpPoly d = fp::gcd(fp::gcd(g, h, p), F, p);
    return fp::deg(d) == 0;
}

/// Field discriminant of Q[x]/(f) for monic irreducible integral f.
inline BigInt field_discriminant(const IntPolynomial &f)
{
    if (f.degree() < 1 || f.lc() != 1)
        throw std::invalid_argument("field discriminant needs a monic polynomial");
    BigInt D = discriminant(f);
    BigInt dk = D;
    for (auto &[p, e] : factorize(D)) {
        if (e < 2)
            continue;
        int v = index_valuation(f, p);
        if (mpz_fits_ulong_p(p.get_mpz_t()) && p < BigInt("4000000000000000000")) {
            bool ded = dedekind_p_maximal(f, mpz_get_ui(p.get_mpz_t()));
            if (ded != (v == 0))
                throw std::logic_error("Dedekind index criterion disagrees with the maximal order");
        }
        dk /= ipow(p, 2 * v);
    }
    return dk;
}

/// Fundamental discriminant of Q(sqrt(m)) for a nonzero non-square m.
inline BigInt quadratic_field_discriminant(const BigInt &m)
{
    BigInt s = squarefree_part(m);
    BigInt r = s % 4;
    if (r < 0)
        r += 4;
    return r == 1 ? s : BigInt(4 * s);
}

} // namespace speclab
