#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace speclab {

using BigInt = mpz_class;
using BigRat = mpq_class;

/// Prime factorization as (prime, exponent) pairs, primes ascending.
using Factorization = std::vector<std::pair<BigInt, int>>;

namespace detail {

inline const std::vector<uint32_t> &small_primes()
{
    static const std::vector<uint32_t> primes = [] {
        const uint32_t lim = 1000000;
        std::vector<bool> comp(lim + 1, false);
        std::vector<uint32_t> out;
        for (uint32_t i = 2; i <= lim; ++i) {
            if (comp[i])
                continue;
            out.push_back(i);
            for (uint64_t j = uint64_t(i) * i; j <= lim; j += i)
                comp[j] = true;
        }
        return out;
    }();
    return primes;
}

inline uint64_t mulmod64(uint64_t a, uint64_t b, uint64_t m)
{
    return uint64_t((unsigned __int128)a * b % m);
}

inline uint64_t powmod64(uint64_t b, uint64_t e, uint64_t m)
{
    uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1)
            r = mulmod64(r, b, m);
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    return r;
}

inline bool is_prime64(uint64_t n)
{
    if (n < 2)
        return false;
    for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0)
            return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // these bases are a proof for n < 3.3e24
    for (uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1)
            continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp)
            return false;
    }
    return true;
}

inline uint64_t rho64(uint64_t n)
{
    if (n % 2 == 0)
        return 2;
    for (uint64_t c = 1;; ++c) {
        uint64_t y = 2, x = 2, q = 1, g = 1, ys = 2;
        uint64_t r = 1;
        const uint64_t m = 128;
        auto f = [&](uint64_t v) { return (mulmod64(v, v, n) + c) % n; };
        do {
            x = y;
            for (uint64_t i = 0; i < r; ++i)
                y = f(y);
            uint64_t k = 0;
            do {
                ys = y;
                for (uint64_t i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod64(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
}

inline void factor64(uint64_t n, std::map<BigInt, int> &acc)
{
    if (n == 1)
        return;
    if (is_prime64(n)) {
        acc[BigInt(std::to_string(n))]++;
        return;
    }
    uint64_t d = rho64(n);
    factor64(d, acc);
    factor64(n / d, acc);
}

inline BigInt rho_big(const BigInt &n)
{
    if (mpz_even_p(n.get_mpz_t()))
        return BigInt(2);
    for (unsigned long c = 1;; ++c) {
        BigInt x = 2, y = 2, ys = 2, q = 1, g = 1, t;
        unsigned long r = 1;
        const unsigned long m = 128;
        auto f = [&](BigInt &v) {
            v = v * v + c;
            mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
        };
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i)
                f(y);
            unsigned long k = 0;
            do {
                ys = y;
                for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
                    f(y);
                    t = abs(x - y);
                    q = q * t;
                    mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                f(ys);
                t = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
}

inline void factor_big(const BigInt &n, std::map<BigInt, int> &acc)
{
    if (n == 1)
        return;
    if (mpz_fits_ulong_p(n.get_mpz_t())) {
        factor64(mpz_get_ui(n.get_mpz_t()), acc);
        return;
    }
    if (mpz_probab_prime_p(n.get_mpz_t(), 64) > 0) {
        acc[n]++;
        return;
    }
    BigInt d = rho_big(n);
    factor_big(d, acc);
    factor_big(BigInt(n / d), acc);
}

} // namespace detail

/// Miller-Rabin with 64 rounds (deterministic below 2^64).
inline bool is_prime(const BigInt &n)
{
    if (n < 2)
        return false;
    if (mpz_fits_ulong_p(n.get_mpz_t()))
        return detail::is_prime64(mpz_get_ui(n.get_mpz_t()));
    return mpz_probab_prime_p(n.get_mpz_t(), 64) > 0;
}

/// Factorization of |n|: trial division to 10^6, then Pollard-Brent rho.
inline Factorization factorize(const BigInt &n)
{
    if (n == 0)
        throw std::domain_error("factorization of zero");
    BigInt m = abs(n);
    std::map<BigInt, int> acc;
    const auto &ps = detail::small_primes();
    if (mpz_fits_ulong_p(m.get_mpz_t())) {
        uint64_t x = mpz_get_ui(m.get_mpz_t());
        for (uint32_t p : ps) {
            if (uint64_t(p) * p > x)
                break;
            if (x % p == 0) {
                int e = 0;
                while (x % p == 0) {
                    x /= p;
                    ++e;
                }
                acc[BigInt(p)] += e;
            }
        }
        if (x > 1) {
            if (x < uint64_t(1000000) * 1000000)
                acc[BigInt(std::to_string(x))]++;
            else
                detail::factor64(x, acc);
        }
    } else {
        for (uint32_t p : ps) {
            if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
                int e = 0;
                while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
                    mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                    ++e;
                }
                acc[BigInt(p)] += e;
                if (m == 1)
                    break;
            }
        }
        if (m > 1) {
            if (m < BigInt("1000000000000"))
                acc[m]++;
            else
                detail::factor_big(m, acc);
        }
    }
    return Factorization(acc.begin(), acc.end());
}

/// Distinct primes dividing n, ascending.
inline std::vector<BigInt> prime_divisors(const BigInt &n)
{
    std::vector<BigInt> out;
    for (auto &[p, e] : factorize(n))
        out.push_back(p);
    return out;
}

inline int valuation(const BigInt &p, const BigInt &n)
{
    if (n == 0)
        throw std::domain_error("valuation of zero");
    if (p < 2)
        throw std::invalid_argument("valuation base must be prime");
    BigInt m = n;
    return int(mpz_remove(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t()));
}

inline BigInt radical(const BigInt &n)
{
    if (n == 0)
        throw std::domain_error("radical of zero");
    BigInt r = 1;
    for (auto &[p, e] : factorize(n))
        r *= p;
    return r;
}

struct NFreePart {
    BigInt core;     ///< k-free, carries the sign of n
    BigInt cofactor; ///< n = core * cofactor^k
};

inline NFreePart nfree_part(const BigInt &n, int k)
{
    if (n == 0)
        throw std::domain_error("n-free part of zero");
    if (k < 2)
        throw std::invalid_argument("n-free exponent must be >= 2");
    NFreePart out{n < 0 ? BigInt(-1) : BigInt(1), BigInt(1)};
    for (auto &[p, e] : factorize(n)) {
        BigInt pk;
        mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), e % k);
        out.core *= pk;
        mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), e / k);
        out.cofactor *= pk;
    }
    return out;
}

inline BigInt squarefree_part(const BigInt &n) { return nfree_part(n, 2).core; }

inline bool is_nfree(const BigInt &n, int k)
{
    if (n == 0 || n == 1)
        return false;
    for (auto &[p, e] : factorize(n))
        if (e >= k)
            return false;
    return true;
}

/// k-free d with |d| <= x, both signs, 0 and 1 excluded, ascending.
inline std::vector<int64_t> nfree_sieve(int k, int64_t x)
{
    if (k < 2)
        throw std::invalid_argument("n-free exponent must be >= 2");
    if (x < 1)
        throw std::invalid_argument("sieve bound must be >= 1");
    std::vector<bool> bad(size_t(x) + 1, false);
    for (int64_t p = 2; p <= x; ++p) {
        // nothing to mark once p^k > x
        int64_t pk = 1;
        bool over = false;
        for (int i = 0; i < k; ++i) {
            if (pk > x / p) {
                over = true;
                break;
            }
            pk *= p;
        }
        if (over)
            break;
        bool prime = true;
        for (int64_t q = 2; q * q <= p; ++q)
            if (p % q == 0) {
                prime = false;
                break;
            }
        if (!prime)
            continue;
        for (int64_t m = pk; m <= x; m += pk)
            bad[m] = true;
    }
    std::vector<int64_t> out;
    for (int64_t m = x; m >= 1; --m)
        if (!bad[m])
            out.push_back(-m);
    for (int64_t m = 2; m <= x; ++m)
        if (!bad[m])
            out.push_back(m);
    return out;
}

struct ValuationProfile {
    BigInt value;
    int q0 = 2;
    std::map<int, BigInt> bm; ///< B_m: product of primes dividing value exactly m times
    BigInt b_ge_q0 = 1;
};

inline ValuationProfile bm_decomposition(const BigInt &value, int q0)
{
    if (value == 0)
        throw std::domain_error("B_m decomposition of zero");
    if (q0 < 2)
        throw std::invalid_argument("q0 must be >= 2");
    ValuationProfile vp;
    vp.value = value;
    vp.q0 = q0;
    BigInt rad = 1;
    for (auto &[p, e] : factorize(value)) {
        auto it = vp.bm.emplace(e, BigInt(1)).first;
        it->second *= p;
        rad *= p;
        if (e >= q0)
            vp.b_ge_q0 *= p;
    }
    BigInt bound;
    mpz_pow_ui(bound.get_mpz_t(), vp.b_ge_q0.get_mpz_t(), q0 - 1);
    // rad * B^(q0-1) <= |value| avoids a non-exact division
    if (rad * bound > abs(value))
        throw std::logic_error("radical bound violated");
    return vp;
}

inline int legendre(const BigInt &a, const BigInt &p)
{
    if (p < 3 || mpz_even_p(p.get_mpz_t()))
        throw std::invalid_argument("legendre symbol needs an odd prime");
    return mpz_legendre(a.get_mpz_t(), p.get_mpz_t());
}

inline bool is_qth_power_mod(const BigInt &a, const BigInt &p, const BigInt &q)
{
    if (q < 1 || p < 2 || (p - 1) % q != 0)
        throw std::domain_error("incompatible residue test");
    BigInt e = (p - 1) / q, r, am = a % p;
    if (am < 0)
        am += p;
    mpz_powm(r.get_mpz_t(), am.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return r == 1;
}

/// Primes up to n (n small, at most a few million).
inline std::vector<int64_t> primes_up_to(int64_t n)
{
    std::vector<int64_t> out;
    if (n < 2)
        return out;
    std::vector<bool> comp(size_t(n) + 1, false);
    for (int64_t i = 2; i <= n; ++i) {
        if (comp[i])
            continue;
        out.push_back(i);
        for (int64_t j = i * i; j <= n; j += i)
            comp[j] = true;
    }
    return out;
}

inline int64_t euler_phi(int64_t n)
{
    int64_t r = n;
    for (int64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0)
                n /= p;
            r -= r / p;
        }
    }
    if (n > 1)
        r -= r / n;
    return r;
}

inline BigInt ipow(const BigInt &b, unsigned long e)
{
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

inline std::string to_string(const BigInt &n) { return n.get_str(); }

inline std::string to_string(const BigRat &q)
{
    if (q.get_den() == 1)
        return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline BigInt big(int64_t v)
{
    BigInt r;
    mpz_set_si(r.get_mpz_t(), long(v));
    return r;
}

inline int64_t to_i64(const BigInt &v)
{
    if (!mpz_fits_slong_p(v.get_mpz_t()))
        throw std::overflow_error("integer does not fit in 64 bits");
    return mpz_get_si(v.get_mpz_t());
}

} // namespace speclab
