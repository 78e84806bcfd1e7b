#pragma once

#include "speclab/beckmann.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace speclab {

// ---------------------------------------------------------------- curves and points

/// y^n = F(t, z), F the homogenization of P to degree n*w; y has weight w, t and z weight 1.
struct SuperellipticCurve {
    int n = 2;
    IntPolynomial P;
    int N = 0;
    int weight = 0;
    bool separable = false;
    std::optional<int> genus;

    int form_degree() const { return n * weight; }
    HomogPolynomial form() const { return HomogPolynomial::from(P, n * weight); }
};

inline SuperellipticCurve build_curve(int n, const IntPolynomial &P)
{
    if (n < 2)
        throw std::invalid_argument("exponent n must be at least 2");
    if (P.degree() < 1)
        throw std::invalid_argument("curve polynomial must be nonconstant");
    for (auto &[g, m] : squarefree_decomposition(P))
        if (m >= n)
            throw std::domain_error("not in P(n,N)");
    SuperellipticCurve c;
    c.n = n;
    c.P = P;
    c.N = P.degree();
    c.weight = (c.N + n - 1) / n;
    c.separable = is_separable(P);
    if (c.separable) {
        int two_g_minus_2 = -2 * n + c.N * (n - 1) + (n - std::gcd(n, c.N));
        c.genus = two_g_minus_2 / 2 + 1;
    }
    return c;
}

struct TwistedCurve {
    SuperellipticCurve base;
    BigInt d = 1;

    BigInt eval(const BigInt &t, const BigInt &z) const { return d * base.form().eval(t, z); }
    std::string to_string() const
    {
        return "y^" + std::to_string(base.n) + " = " + d.get_str() + "*(" + base.P.to_string('t') + ")";
    }
};

inline TwistedCurve make_twist(const SuperellipticCurve &base, const BigInt &d)
{
    if (d != 1 && !is_nfree(d, base.n))
        throw std::invalid_argument("twist parameter must be n-free");
    return {base, d};
}

struct CurvePoint {
    BigInt y, t, z;
    bool trivial() const { return y == 0; }
    std::string to_string() const { return "(" + y.get_str() + " : " + t.get_str() + " : " + z.get_str() + ")"; }
    friend bool operator==(const CurvePoint &a, const CurvePoint &b) { return a.y == b.y && a.t == b.t && a.z == b.z; }
};

inline bool on_curve(const TwistedCurve &c, const CurvePoint &pt)
{
    BigInt lhs;
    mpz_pow_ui(lhs.get_mpz_t(), pt.y.get_mpz_t(), (unsigned long)c.base.n);
    return lhs == c.eval(pt.t, pt.z);
}

/// Exact integer n-th root (nonnegative one for even n).
inline std::optional<BigInt> exact_root(const BigInt &a, int n)
{
    if (a < 0 && n % 2 == 0)
        return std::nullopt;
    BigInt r, aa = abs(a);
    if (!mpz_root(r.get_mpz_t(), aa.get_mpz_t(), (unsigned long)n))
        return std::nullopt;
    if (a < 0)
        r = -r;
    return r;
}

// ---------------------------------------------------------------- point search

/// Exhaustive search for points with coprime (t, z), |t| <= H, 1 <= z <= H, plus z = 0.
/// Residues are sieved with 64-bit masks over t for a set of prime moduli; the tables depend
/// on the base curve only, the twist selects a power-residue class per modulus.
class PointSearcher
{
  public:
    explicit PointSearcher(const SuperellipticCurve &c, int max_moduli = 32, uint64_t prime_limit = 2000) : c_(c)
    {
        F_ = c.form();
        const int D = F_.d;
        for (uint64_t p : primes_up_to(prime_limit)) {
            if (int(mods_.size()) >= max_moduli)
                break;
            int e = std::gcd(c.n, int(p - 1));
            if (e == 1)
                continue;
            Modulus m;
            m.p = p;
            m.e = e;
            m.cls.assign(p, -1);
            // class of x: discrete log of x^((p-1)/e) among the e-th roots of unity
            uint64_t g = primitive_root(p);
            uint64_t zeta = fp::pw(g, (p - 1) / e, p);
            std::vector<uint64_t> roots(e);
            roots[0] = 1;
            for (int k = 1; k < e; ++k)
                roots[k] = fp::mul(roots[k - 1], zeta, p);
            for (uint64_t x = 1; x < p; ++x) {
                uint64_t r = fp::pw(x, (p - 1) / e, p);
                m.cls[x] = int(std::find(roots.begin(), roots.end(), r) - roots.begin());
            }
            m.words = (p + 64) / 64 + 2;
            m.bits.assign(size_t(e) * p * m.words, 0);
            std::vector<uint64_t> co(size_t(D) + 1);
            for (int i = 0; i <= D; ++i) {
                BigInt r;
                mpz_fdiv_r_ui(r.get_mpz_t(), F_.c[i].get_mpz_t(), (unsigned long)p);
                co[i] = r.get_ui();
            }
            std::vector<int> val_cls(p);
            for (uint64_t vr = 0; vr < p; ++vr) {
                // F(u, vr) as a polynomial in u
                FpPoly fu(size_t(D) + 1);
                uint64_t vp = 1;
                for (int i = D; i >= 0; --i) {
                    fu[i] = fp::mul(co[i], vp, p);
                    vp = fp::mul(vp, vr, p);
                }
                for (uint64_t u = 0; u < p; ++u)
                    val_cls[u] = m.cls[fp::eval(fu, u, p)];
                for (int k = 0; k < e; ++k) {
                    uint64_t *row = &m.bits[(size_t(k) * p + vr) * m.words];
                    for (uint64_t j = 0; j < p + 64; ++j) {
                        int vc = val_cls[j % p];
                        if (vc < 0 || vc == k)
                            row[j >> 6] |= uint64_t(1) << (j & 63);
                    }
                }
            }
            mods_.push_back(std::move(m));
        }
    }

    std::vector<CurvePoint> search(const BigInt &d, int64_t H, bool first_only = false) const
    {
        std::vector<CurvePoint> out;
        const int n = c_.n;
        // z = 0: the point (y : 1 : 0)
        {
            BigInt V = d * F_.c[F_.d];
            if (V != 0)
                if (auto y = exact_root(V, n)) {
                    out.push_back({*y, 1, 0});
                    if (first_only)
                        return out;
                }
        }
        struct Active {
            const Modulus *m;
            int k;
        };
        std::vector<Active> act;
        for (auto &m : mods_) {
            if (mpz_divisible_ui_p(d.get_mpz_t(), (unsigned long)m.p))
                continue;
            BigInt r;
            mpz_fdiv_r_ui(r.get_mpz_t(), d.get_mpz_t(), (unsigned long)m.p);
            int cd = m.cls[r.get_ui()];
            act.push_back({&m, (m.e - cd) % m.e});
        }
        const int64_t width = 2 * H + 1;
        const int64_t blocks = (width + 63) / 64;
        std::vector<const uint64_t *> rows(act.size());
        std::vector<uint64_t> start(act.size());
        for (size_t i = 0; i < act.size(); ++i) {
            int64_t p = int64_t(act[i].m->p);
            start[i] = uint64_t(((-H) % p + p) % p);
        }
        BigInt V, U, Z;
        for (int64_t v = 1; v <= H; ++v) {
            for (size_t i = 0; i < act.size(); ++i) {
                const Modulus &m = *act[i].m;
                rows[i] = &m.bits[(size_t(act[i].k) * m.p + uint64_t(v) % m.p) * m.words];
            }
            for (int64_t b = 0; b < blocks; ++b) {
                uint64_t mask = ~uint64_t(0);
                int64_t rest = width - 64 * b;
                if (rest < 64)
                    mask = (uint64_t(1) << rest) - 1;
                for (size_t i = 0; i < act.size() && mask; ++i) {
                    uint64_t off = (start[i] + 64 * uint64_t(b)) % act[i].m->p;
                    mask &= get64(rows[i], off);
                }
                while (mask) {
                    int j = __builtin_ctzll(mask);
                    mask &= mask - 1;
                    int64_t u = -H + 64 * b + j;
                    if (std::gcd(u, v) != 1)
                        continue;
                    U = BigInt(long(u));
                    Z = BigInt(long(v));
                    V = d * F_.eval(U, Z);
                    if (V == 0)
                        continue;
                    if (auto y = exact_root(V, n)) {
                        out.push_back({*y, U, Z});
                        if (first_only)
                            return out;
                    }
                }
            }
        }
        return out;
    }

    size_t modulus_count() const { return mods_.size(); }

  private:
    struct Modulus {
        uint64_t p = 0;
        int e = 0;
        std::vector<int> cls;
        size_t words = 0;
        std::vector<uint64_t> bits;
    };

    static uint64_t get64(const uint64_t *row, uint64_t off)
    {
        uint64_t w = off >> 6, s = off & 63;
        if (s == 0)
            return row[w];
        return (row[w] >> s) | (row[w + 1] << (64 - s));
    }

    static uint64_t primitive_root(uint64_t p)
    {
        if (p == 2)
            return 1;
        std::vector<uint64_t> qs;
        for (auto &[q, e] : factorize(BigInt((unsigned long)(p - 1))))
            qs.push_back(q.get_ui());
        for (uint64_t g = 2;; ++g) {
            bool ok = true;
            for (uint64_t q : qs)
                if (fp::pw(g, (p - 1) / q, p) == 1) {
                    ok = false;
                    break;
                }
            if (ok)
                return g;
        }
    }

    SuperellipticCurve c_;
    HomogPolynomial F_;
    std::vector<Modulus> mods_;
};

inline std::vector<CurvePoint> search_points(const TwistedCurve &c, int64_t H, bool first_only = false)
{
    return PointSearcher(c.base).search(c.d, H, first_only);
}

// ---------------------------------------------------------------- obstruction certificate

struct ObstructionCertificate {
    BigInt p;
    int v_d = 0;
    int v_a0 = 0;
    int v_aN = 0;
    bool rootless = true;
};

inline bool has_rational_root(const IntPolynomial &P)
{
    if (P.coeff(0) == 0)
        return true;
    return factor_over_Q(P).has_linear_factor();
}

/// A prime p | d with P a p-adic unit form and rootless mod p rules out every rational point.
inline std::optional<ObstructionCertificate> obstruction_certificate(const TwistedCurve &c)
{
    const auto &b = c.base;
    if (b.N % b.n != 0)
        throw std::invalid_argument("certificate requires n | N");
    if (!b.separable)
        throw std::domain_error("certificate requires a separable polynomial");
    if (has_rational_root(b.P))
        throw std::domain_error("certificate requires a polynomial without rational roots");
    if (abs(c.d) == 1)
        return std::nullopt;
    for (auto &p : prime_divisors(abs(c.d))) {
        if (p >= BigInt("4000000000000000000"))
            continue;
        if (b.P.coeff(0) % p == 0 || b.P.lc() % p == 0)
            continue;
        if (!rootless_mod_p(b.P, p.get_ui()))
            continue;
        return ObstructionCertificate{p, valuation(p, c.d), 0, 0, true};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- local solubility

enum class Solubility { Soluble, Insoluble, Unknown };

inline std::string to_string(Solubility s)
{
    switch (s) {
    case Solubility::Soluble:
        return "soluble";
    case Solubility::Insoluble:
        return "insoluble";
    default:
        return "unknown";
    }
}

struct LocalResult {
    Solubility status = Solubility::Unknown;
    std::string place;
    std::string method;
    std::string witness;
    int depth_cap = 0;
};

/// Real place: n odd always; n even needs d*P > 0 somewhere on R.
inline LocalResult local_solubility_real(const SuperellipticCurve &b, const BigInt &d)
{
    LocalResult r;
    r.place = "inf";
    r.method = "sign";
    if (b.n % 2 == 1) {
        r.status = Solubility::Soluble;
        return r;
    }
    IntPolynomial dP = d * b.P;
    r.status = real_roots_sign_analysis(dP).takes_positive ? Solubility::Soluble : Solubility::Insoluble;
    return r;
}

inline LocalResult local_solubility_real(const TwistedCurve &c) { return local_solubility_real(c.base, c.d); }

/// p + 1 - (n+1)(N+1) > 2 g sqrt(p), decided in integers.
inline bool hasse_weil_margin(const SuperellipticCurve &b, const BigInt &p)
{
    if (!b.genus)
        return false;
    BigInt L = p + 1 - BigInt((b.n + 1) * (b.N + 1));
    if (L <= 0)
        return false;
    BigInt g = *b.genus;
    return L * L > 4 * g * g * p;
}

/// Good reduction at p (p does not divide n*d*lc*disc) and the Hasse-Weil margin.
inline bool hasse_weil_applies(const SuperellipticCurve &b, const BigInt &d, const BigInt &p)
{
    if (!b.separable || b.n % p == 0 || d % p == 0 || b.P.lc() % p == 0)
        return false;
    if (b.N >= 2 && discriminant(b.P) % p == 0)
        return false;
    return hasse_weil_margin(b, p);
}

/// Primes below the Hasse-Weil threshold (the margin fails for them).
inline std::vector<uint64_t> hasse_weil_small_primes(const SuperellipticCurve &b)
{
    std::vector<uint64_t> out;
    if (!b.genus)
        return out;
    const uint64_t g = uint64_t(*b.genus);
    for (uint64_t p = 2;; ++p) {
        if (!detail::is_prime64(p))
            continue;
        bool ok = hasse_weil_margin(b, BigInt((unsigned long)p));
        if (!ok)
            out.push_back(p);
        // the margin grows with p once sqrt(p) > g
        if (ok && p > g * g)
            break;
    }
    return out;
}

inline int default_local_depth(const SuperellipticCurve &b, const BigInt &d, const BigInt &p)
{
    int k = 2 * (b.n % p == 0 ? valuation(p, BigInt(b.n)) : 0) + 2;
    if (b.N >= 2) {
        BigInt D = discriminant(b.P);
        if (D != 0)
            k += valuation(p, D);
    }
    k += valuation(p, d);
    k += valuation(p, b.P.lc());
    return k;
}

namespace detail {

inline int vp_or_inf(const BigInt &a, const BigInt &p) { return a == 0 ? kInfiniteValuation : valuation(p, a); }

/// Is the unit w an n-th power in Z_p? (mod p^h with h = 2 v_p(n) + 1, or mod p when p does not divide n)
inline bool unit_is_nth_power(const BigInt &w, const BigInt &p, int n)
{
    if (BigInt(n) % p != 0) {
        BigInt pm1 = p - 1;
        BigInt e;
        BigInt nn = n;
        mpz_gcd(e.get_mpz_t(), nn.get_mpz_t(), pm1.get_mpz_t());
        if (e == 1)
            return true;
        BigInt r, ex = pm1 / e, wm;
        mpz_fdiv_r(wm.get_mpz_t(), w.get_mpz_t(), p.get_mpz_t());
        mpz_powm(r.get_mpz_t(), wm.get_mpz_t(), ex.get_mpz_t(), p.get_mpz_t());
        return r == 1;
    }
    int h = 2 * valuation(p, BigInt(n)) + 1;
    uint64_t q = ipow(p, h).get_ui(), pp = p.get_ui();
    BigInt wm;
    mpz_fdiv_r_ui(wm.get_mpz_t(), w.get_mpz_t(), (unsigned long)q);
    uint64_t target = wm.get_ui();
    for (uint64_t x = 1; x < q; ++x) {
        if (x % pp == 0)
            continue;
        uint64_t r = 1;
        for (int i = 0; i < n; ++i)
            r = uint64_t((unsigned __int128)r * x % q);
        if (r == target)
            return true;
    }
    return false;
}

/// Does g (over F_p, p not dividing n) take a nonzero n-th power value at some point of F_p?
inline bool has_nth_power_value(const FpPoly &g0, uint64_t p, int n)
{
    FpPoly g = g0;
    fp::trim(g);
    const uint64_t e = std::gcd(uint64_t(n), p - 1);
    auto is_power = [&](uint64_t x) { return x != 0 && (e == 1 || fp::pw(x, (p - 1) / e, p) == 1); };
    if (fp::deg(g) <= 0)
        return !g.empty() && is_power(g[0]);
    if (p > 5000) {
        const uint64_t c = g.back();
        auto sq = fp::squarefree(g, p);
        uint64_t mg = 0, distinct = 0;
        for (auto &[f, m] : sq) {
            mg = std::gcd(mg, uint64_t(m));
            distinct += uint64_t(fp::deg(f));
        }
        uint64_t m0 = std::gcd(e, mg);
        uint64_t R = uint64_t(fp::count_roots(g, p));
        // characters of order dividing m0 are constant on nonroots
        if (fp::pw(c, (p - 1) / m0, p) != 1)
            return false;
        if (m0 == e)
            return p > R;
        BigInt lhs = BigInt((unsigned long)((p - R) * m0));
        BigInt rhs = BigInt((unsigned long)(e - m0)) * BigInt((unsigned long)(distinct - 1));
        if (lhs * lhs > rhs * rhs * BigInt((unsigned long)p))
            return true;
    }
    for (uint64_t x = 0; x < p; ++x)
        if (is_power(fp::eval(g, x, p)))
            return true;
    return false;
}

/// Minimal polynomial arithmetic over F_p for primes beyond word size.
using BigFpPoly = std::vector<BigInt>;

inline void big_trim(BigFpPoly &f)
{
    while (!f.empty() && f.back() == 0)
        f.pop_back();
}

inline BigFpPoly big_reduce(const IntPolynomial &P, const BigInt &p)
{
    BigFpPoly f;
    for (auto &a : P.coeffs()) {
        BigInt r;
        mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), p.get_mpz_t());
        f.push_back(r);
    }
    big_trim(f);
    return f;
}

inline BigFpPoly big_mod(BigFpPoly a, const BigFpPoly &b, const BigInt &p)
{
    BigInt inv;
    mpz_invert(inv.get_mpz_t(), b.back().get_mpz_t(), p.get_mpz_t());
    while (a.size() >= b.size()) {
        BigInt q = a.back() * inv % p;
        size_t sh = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i) {
            BigInt t = a[sh + i] - q * b[i];
            mpz_fdiv_r(a[sh + i].get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
        }
        big_trim(a);
    }
    return a;
}

inline BigFpPoly big_gcd(BigFpPoly a, BigFpPoly b, const BigInt &p)
{
    while (!b.empty()) {
        BigFpPoly r = big_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

inline BigFpPoly big_div(BigFpPoly a, const BigFpPoly &b, const BigInt &p)
{
    BigInt inv;
    mpz_invert(inv.get_mpz_t(), b.back().get_mpz_t(), p.get_mpz_t());
    BigFpPoly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
    while (a.size() >= b.size() && !a.empty()) {
        BigInt c = a.back() * inv % p;
        size_t sh = a.size() - b.size();
        q[sh] = c;
        for (size_t i = 0; i < b.size(); ++i) {
            BigInt t = a[sh + i] - c * b[i];
            mpz_fdiv_r(a[sh + i].get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
        }
        big_trim(a);
    }
    return q;
}

/// True when P mod p (p > deg P) has an irreducible factor of multiplicity one.
inline bool big_has_simple_factor(const IntPolynomial &P, const BigInt &p)
{
    BigFpPoly f = big_reduce(P, p);
    BigFpPoly df;
    for (size_t i = 1; i < f.size(); ++i)
        df.push_back(f[i] * BigInt((unsigned long)i) % p);
    big_trim(df);
    if (df.empty())
        return false;
    BigFpPoly g = big_gcd(f, df, p);
    BigFpPoly rad = big_div(f, g, p);           // product of distinct factors
    BigFpPoly multi = big_gcd(rad, g, p);       // factors of multiplicity >= 2
    return rad.size() > multi.size();
}

class LocalSolver
{
  public:
    LocalSolver(const SuperellipticCurve &b, const BigInt &d, const BigInt &p, int cap)
        : b_(b), d_(d), p_(p), cap_(cap), n_(b.n)
    {
        pdivn_ = BigInt(n_) % p_ == 0;
        h_ = pdivn_ ? 2 * valuation(p_, BigInt(n_)) + 1 : 1;
        small_ = p_ < BigInt("4000000000000000000");
        if (small_)
            pw_ = p_.get_ui();
        GA_ = d_ * b_.P;
        GB_ = d_ * reverse(b_.P, b_.form_degree());
        zero_mult_ = b_.form_degree() - b_.N;
        BigInt tail = d_ * b_.P.lc();
        tail_level_ = valuation(p_, tail) + h_ + n_ + 1;
    }

    LocalResult run()
    {
        LocalResult r;
        r.place = p_.get_str();
        r.depth_cap = cap_;
        r.method = "ball-search";
        Solubility a = explore(GA_, 0, 0, 'A', r.witness);
        if (a == Solubility::Soluble) {
            r.status = a;
            return r;
        }
        Solubility bz = explore(GB_, 0, 1, 'B', r.witness);
        if (bz == Solubility::Soluble)
            r.status = bz;
        else if (a == Solubility::Unknown || bz == Solubility::Unknown)
            r.status = Solubility::Unknown;
        else
            r.status = Solubility::Insoluble;
        return r;
    }

  private:
    Solubility decide(int v0, const BigInt &g0) const
    {
        if (v0 % n_ != 0)
            return Solubility::Insoluble;
        BigInt w = g0 / ipow(p_, v0);
        return unit_is_nth_power(w, p_, n_) ? Solubility::Soluble : Solubility::Insoluble;
    }

    Solubility explore(const IntPolynomial &G, const BigInt &a, int k, char chart, std::string &wit)
    {
        BigInt pk = ipow(p_, k);
        IntPolynomial g = compose_linear(G, a, pk);
        const int deg = g.degree();
        int v0 = vp_or_inf(g.coeff(0), p_);
        int m1 = kInfiniteValuation, at1 = vp_or_inf(g.coeff(1), p_);
        bool unique1 = true;
        for (int j = 1; j <= deg; ++j) {
            int vj = vp_or_inf(g.coeff(j), p_);
            m1 = std::min(m1, vj);
        }
        for (int j = 2; j <= deg; ++j)
            if (vp_or_inf(g.coeff(j), p_) <= at1)
                unique1 = false;
        auto witness = [&](const char *why) {
            wit = std::string(chart == 'A' ? "t" : "z") + " in " + a.get_str() + " + " + p_.get_str() + "^" +
                  std::to_string(k) + "*Z_p (" + why + ")";
        };
        if (v0 < m1) {
            if (m1 == kInfiniteValuation || m1 - v0 >= h_) {
                Solubility s = decide(v0, g.coeff(0));
                if (s == Solubility::Soluble)
                    witness("constant class");
                return s;
            }
        } else if (at1 == m1 && unique1 && m1 < kInfiniteValuation) {
            witness("simple root");
            return Solubility::Soluble;
        }
        // the ball around z = 0 repeats with period n once the leading term dominates
        if (chart == 'B' && zero_mult_ > 0 && a == 0 && k >= tail_level_)
            return Solubility::Insoluble;
        const bool tail = chart == 'B' && zero_mult_ > 0 && a == 0;
        if (k + 1 > (tail ? std::max(cap_, tail_level_) : cap_))
            return Solubility::Unknown;
        bool unknown = false;
        if (!pdivn_ && small_) {
            int mu = std::min(v0, m1);
            BigInt pm = ipow(p_, mu);
            std::vector<BigInt> cs = g.coeffs();
            for (auto &x : cs)
                x /= pm;
            FpPoly gh = fp::reduce(IntPolynomial(cs), pw_);
            if (mu % n_ == 0 && has_nth_power_value(gh, pw_, n_)) {
                witness("unit value");
                return Solubility::Soluble;
            }
            SplitRng rng(0, pw_);
            for (uint64_t i : fp::roots(gh, pw_, rng)) {
                Solubility s = explore(G, a + BigInt((unsigned long)i) * pk, k + 1, chart, wit);
                if (s == Solubility::Soluble)
                    return s;
                if (s == Solubility::Unknown)
                    unknown = true;
            }
            return unknown ? Solubility::Unknown : Solubility::Insoluble;
        }
        if (!small_)
            return Solubility::Unknown;
        for (uint64_t i = 0; i < pw_; ++i) {
            Solubility s = explore(G, a + BigInt((unsigned long)i) * pk, k + 1, chart, wit);
            if (s == Solubility::Soluble)
                return s;
            if (s == Solubility::Unknown)
                unknown = true;
        }
        return unknown ? Solubility::Unknown : Solubility::Insoluble;
    }

    const SuperellipticCurve &b_;
    BigInt d_, p_;
    int cap_, n_;
    bool pdivn_ = false, small_ = true;
    int h_ = 1;
    uint64_t pw_ = 0;
    IntPolynomial GA_, GB_;
    int zero_mult_ = 0;
    int tail_level_ = 0;
};

} // namespace detail

/// Nontrivial Q_p-point on y^n = d*F(t, z). depth_cap < 0 selects the default bound.
inline LocalResult local_solubility(const SuperellipticCurve &b, const BigInt &d, const BigInt &p, int depth_cap = -1,
                                    bool allow_shortcut = true)
{
    if (!is_prime(p))
        throw std::invalid_argument("local solubility needs a prime");
    if (d == 0)
        throw std::invalid_argument("twist parameter must be nonzero");
    int cap = depth_cap < 0 ? default_local_depth(b, d, p) : depth_cap;
    if (allow_shortcut && hasse_weil_applies(b, d, p)) {
        LocalResult r;
        r.place = p.get_str();
        r.method = "hasse-weil";
        r.status = Solubility::Soluble;
        r.depth_cap = cap;
        return r;
    }
    if (p >= BigInt("4000000000000000000")) {
        LocalResult r;
        r.place = p.get_str();
        r.depth_cap = cap;
        r.method = "large-prime";
        // unit values of d*P are n-th powers somewhere once a simple factor exists mod p
        bool ok = BigInt(b.n) % p != 0 && d % p != 0 && content(b.P) % p != 0 && b.P.lc() % p != 0 &&
                  detail::big_has_simple_factor(b.P, p);
        r.status = ok ? Solubility::Soluble : Solubility::Unknown;
        return r;
    }
    return detail::LocalSolver(b, d, p, cap).run();
}

inline LocalResult local_solubility(const TwistedCurve &c, const BigInt &p, int depth_cap = -1,
                                    bool allow_shortcut = true)
{
    return local_solubility(c.base, c.d, p, depth_cap, allow_shortcut);
}

struct ELSResult {
    Solubility status = Solubility::Soluble;
    std::vector<LocalResult> log;
};

/// Primes that must be checked explicitly for every twist: n*lc*disc and the small primes.
inline std::vector<BigInt> base_bad_primes(const SuperellipticCurve &b)
{
    PrimeSet s;
    detail::add_prime_divisors(s, BigInt(b.n));
    detail::add_prime_divisors(s, b.P.lc());
    if (b.N >= 2)
        detail::add_prime_divisors(s, discriminant(b.P));
    for (uint64_t p : hasse_weil_small_primes(b))
        s.insert(BigInt((unsigned long)p));
    return {s.begin(), s.end()};
}

/// Square-class key of d at p: v_p(d) mod n and the class of the unit part modulo n-th powers.
inline std::pair<int, BigInt> twist_class(const BigInt &d, const BigInt &p, int n)
{
    int v = valuation(p, d);
    BigInt w = d / ipow(p, v);
    if (BigInt(n) % p != 0) {
        BigInt pm1 = p - 1, nn = n, e;
        mpz_gcd(e.get_mpz_t(), nn.get_mpz_t(), pm1.get_mpz_t());
        BigInt r, ex = pm1 / e, wm;
        mpz_fdiv_r(wm.get_mpz_t(), w.get_mpz_t(), p.get_mpz_t());
        mpz_powm(r.get_mpz_t(), wm.get_mpz_t(), ex.get_mpz_t(), p.get_mpz_t());
        return {v % n, r};
    }
    int h = 2 * valuation(p, BigInt(n)) + 1;
    uint64_t q = ipow(p, h).get_ui(), pp = p.get_ui();
    BigInt wm;
    mpz_fdiv_r_ui(wm.get_mpz_t(), w.get_mpz_t(), (unsigned long)q);
    uint64_t best = q;
    for (uint64_t x = 1; x < q; ++x) {
        if (x % pp == 0)
            continue;
        uint64_t r = 1;
        for (int i = 0; i < n; ++i)
            r = uint64_t((unsigned __int128)r * x % q);
        best = std::min<uint64_t>(best, uint64_t((unsigned __int128)r * wm.get_ui() % q));
    }
    return {v % n, BigInt((unsigned long)best)};
}

/// Thread-safe memo of local answers keyed by (p, class of d at p).
class LocalCache
{
  public:
    explicit LocalCache(const SuperellipticCurve &b) : b_(b) {}

    LocalResult get(const BigInt &d, const BigInt &p)
    {
        auto key = std::make_tuple(p, twist_class(d, p, b_.n));
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = memo_.find(key);
            if (it != memo_.end())
                return it->second;
        }
        LocalResult r = local_solubility(b_, d, p);
        std::lock_guard<std::mutex> lk(mu_);
        memo_.emplace(key, r);
        return r;
    }

  private:
    const SuperellipticCurve &b_;
    std::mutex mu_;
    std::map<std::tuple<BigInt, std::pair<int, BigInt>>, LocalResult> memo_;
};

/// Everywhere local solubility: infinity, primes of n*d*lc*disc and primes below the Hasse-Weil threshold.
inline ELSResult everywhere_locally_soluble(const SuperellipticCurve &b, const BigInt &d, LocalCache *cache = nullptr,
                                            bool stop_early = false, const std::vector<BigInt> *bad = nullptr)
{
    if (!b.separable)
        throw std::domain_error("everywhere local solubility needs a separable polynomial");
    ELSResult res;
    auto fold = [&](const LocalResult &r) {
        res.log.push_back(r);
        if (r.status == Solubility::Insoluble)
            res.status = Solubility::Insoluble;
        else if (r.status == Solubility::Unknown && res.status == Solubility::Soluble)
            res.status = Solubility::Unknown;
    };
    fold(local_solubility_real(b, d));
    if (stop_early && res.status == Solubility::Insoluble)
        return res;
    std::vector<BigInt> own;
    if (!bad) {
        own = base_bad_primes(b);
        bad = &own;
    }
    PrimeSet places(bad->begin(), bad->end());
    if (abs(d) > 1)
        for (auto &p : prime_divisors(abs(d)))
            places.insert(p);
    for (auto &p : places) {
        fold(cache ? cache->get(d, p) : local_solubility(b, d, p));
        if (stop_early && res.status == Solubility::Insoluble)
            return res;
    }
    return res;
}

inline ELSResult everywhere_locally_soluble(const TwistedCurve &c)
{
    return everywhere_locally_soluble(c.base, c.d);
}

// ---------------------------------------------------------------- point mapping

/// (y : t : z) on y^n = 2 a^n1 F(t, z) goes to (y^n2 / a : t : z) on y^n1 = 2 F(t, z).
inline CurvePoint map_twist_point(int n, int n1, const BigInt &alpha, const CurvePoint &pt, const SuperellipticCurve &base)
{
    if (n1 < 2 || n % n1 != 0 || n1 == n)
        throw std::invalid_argument("n1 must be a proper divisor of n");
    const int n2 = n / n1;
    if (pt.trivial())
        return {0, pt.t, pt.z};
    BigInt yn2;
    mpz_pow_ui(yn2.get_mpz_t(), pt.y.get_mpz_t(), (unsigned long)n2);
    if (yn2 % alpha != 0)
        throw std::domain_error("identity violated");
    CurvePoint out{yn2 / alpha, pt.t, pt.z};
    BigInt lhs;
    mpz_pow_ui(lhs.get_mpz_t(), out.y.get_mpz_t(), (unsigned long)n1);
    if (lhs != 2 * base.form().eval(pt.t, pt.z))
        throw std::domain_error("identity violated");
    return out;
}

// ---------------------------------------------------------------- admissible twists

struct AdmissibleTwist {
    uint64_t p = 0;
    BigInt d;
    Solubility verified = Solubility::Unknown;
};

struct AdmissibleScan {
    BigInt m0;
    PrimeSet S;
    PrimeSet S1;
    std::vector<AdmissibleTwist> twists;
};

/// Small primes at which some unit twist class of y^2 = P has no local point.
inline PrimeSet unit_class_failures(const SuperellipticCurve &b)
{
    PrimeSet out;
    for (uint64_t l : hasse_weil_small_primes(b)) {
        BigInt lb((unsigned long)l);
        std::vector<BigInt> reps{1};
        if (l == 2) {
            reps = {1, 3, 5, 7};
        } else {
            uint64_t u = 2;
            while (legendre(BigInt((unsigned long)u), lb) != -1)
                ++u;
            reps.push_back(BigInt((unsigned long)u));
        }
        for (auto &u : reps)
            if (local_solubility(b, u, lb).status != Solubility::Soluble) {
                out.insert(lb);
                break;
            }
    }
    return out;
}

inline AdmissibleScan admissible_prime_scan(const QuadraticCover &cov, const ProjectivePoint &t0, uint64_t bound,
                                            size_t orbit = 0)
{
    if (cov.P.degree() % 2 == 1 || has_rational_root(cov.P))
        throw std::domain_error("cover has a rational branch point");
    if (orbit >= cov.branch_orbits.size())
        throw std::invalid_argument("no such branch orbit");
    AdmissibleScan out;
    SpecializationReport base = quad_specialize(cov, t0);
    out.m0 = base.m;
    if (out.m0 == 1)
        throw std::invalid_argument("base specialization is trivial");
    SuperellipticCurve curve = build_curve(2, cov.P);
    out.S = exceptional_superset(cov);
    out.S.insert(2);
    for (auto &l : unit_class_failures(curve))
        out.S.insert(l);
    for (auto &p : base.ramified)
        out.S1.insert(p);
    IntPolynomial orb = cov.branch_orbits[orbit].hom.dehomogenize();
    for (uint64_t p : primes_up_to(bound)) {
        BigInt pb((unsigned long)p);
        if (out.S.count(pb) || out.S1.count(pb) || p % 4 != 1)
            continue;
        if (!splits_completely_mod_p(orb, p))
            continue;
        if (legendre(out.m0, pb) != 1)
            continue;
        bool ok = true;
        for (const PrimeSet *set : {&out.S, &out.S1})
            for (auto &l : *set)
                if (legendre(l, pb) != 1)
                    ok = false;
        if (!ok)
            continue;
        AdmissibleTwist tw;
        tw.p = p;
        tw.d = squarefree_part(out.m0 * pb);
        tw.verified = everywhere_locally_soluble(curve, tw.d).status;
        if (tw.verified == Solubility::Insoluble)
            throw std::logic_error("admissible twist d = " + tw.d.get_str() + " is not everywhere locally soluble");
        out.twists.push_back(tw);
    }
    return out;
}

struct HasseCandidate {
    BigInt d;
    bool admissible = false;
    int64_t height = 0; ///< searched height; absence beyond it is not claimed
};

/// First t0 = 0, 1, -1, 2, ... giving a nontrivial specialization.
inline ProjectivePoint first_nontrivial_point(const QuadraticCover &cov)
{
    for (int k = 0; k < 1000; ++k) {
        long t = (k % 2) ? (k + 1) / 2 : -(k / 2);
        ProjectivePoint t0 = ProjectivePoint::make(t, 1);
        try {
            if (quad_specialize(cov, t0).m != 1)
                return t0;
        } catch (const std::domain_error &) {
        }
    }
    throw std::domain_error("no nontrivial specialization among small integers");
}

inline std::vector<HasseCandidate> hasse_failure_candidates(const QuadraticCover &cov, int64_t x, int64_t H,
                                                            unsigned jobs = 1)
{
    if (cov.P.degree() % 2 == 1 || cov.P.degree() < 8 || has_rational_root(cov.P))
        throw std::domain_error("candidates need an even degree >= 8 without rational roots");
    std::vector<HasseCandidate> out;
    if (x < 2)
        return out;
    SuperellipticCurve curve = build_curve(2, cov.P);
    PointSearcher searcher(curve);
    LocalCache cache(curve);
    const std::vector<BigInt> bad = base_bad_primes(curve);
    std::vector<int64_t> ds = nfree_sieve(2, x);
    std::vector<char> cand(ds.size(), 0);
    parallel_for(ds.size(), jobs, [&](size_t i) {
        BigInt d = BigInt(long(ds[i]));
        if (everywhere_locally_soluble(curve, d, &cache, true, &bad).status != Solubility::Soluble)
            return;
        if (searcher.search(d, H, true).empty())
            cand[i] = 1;
    });
    std::set<BigInt> admissible;
    {
        auto scan = admissible_prime_scan(cov, first_nontrivial_point(cov), uint64_t(std::max<int64_t>(x, 2)));
        for (auto &t : scan.twists)
            admissible.insert(t.d);
    }
    for (int pass = 0; pass < 2; ++pass)
        for (size_t i = 0; i < ds.size(); ++i) {
            if (!cand[i])
                continue;
            BigInt d = BigInt(long(ds[i]));
            bool adm = admissible.count(d) > 0;
            if ((pass == 0) == adm)
                out.push_back({d, adm, H});
        }
    return out;
}

} // namespace speclab
