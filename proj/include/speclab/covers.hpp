#pragma once

#include "speclab/number_field.hpp"

#include <json.hpp>

#include <climits>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace speclab {

using PrimeSet = std::set<BigInt>;

/// Galois orbit of branch points with its ramification index.
struct BranchOrbit {
    HomogPolynomial hom;
    int e = 2;

    bool at_infinity() const { return hom.is_infinity(); }
    int degree() const { return hom.d; }
    /// Order of tau^k for tau of order e.
    int inertia_order(int k) const { return e / std::gcd(e, k); }
};

struct SpecializationReport {
    ProjectivePoint t0;
    std::string group;          ///< "trivial", "Z/2" (quadratic); "S3", "C3", "C2", "trivial" (cubic)
    BigInt m = 1;               ///< squarefree kernel of the quadratic (sub)field
    BigInt dF = 1;              ///< discriminant of the specialized field
    std::optional<BigInt> dK;   ///< cubic field discriminant (S3, C3)
    std::vector<BigInt> ramified;
    std::map<BigInt, int> inertia; ///< inertia order at ramified primes not dividing |G|
};

inline nlohmann::json to_json(const SpecializationReport &r)
{
    nlohmann::json j;
    j["t0"] = r.t0.to_string();
    j["group"] = r.group;
    j["m"] = r.m.get_str();
    if (r.dK) {
        j["dK"] = r.dK->get_str();
    }
    j["dF"] = r.dF.get_str();
    std::vector<std::string> ram;
    for (auto &p : r.ramified)
        ram.push_back(p.get_str());
    j["ramified"] = ram;
    return j;
}

// ---------------------------------------------------------------- quadratic

struct QuadraticCover {
    IntPolynomial P;
    std::vector<BranchOrbit> branch_orbits;
    bool infinity_branch = false;
    int r = 0;
    static constexpr int group_order = 2;
};

inline QuadraticCover quad_cover(const IntPolynomial &P)
{
    if (P.degree() < 1)
        throw std::invalid_argument("cover polynomial must be nonconstant");
    if (!is_separable(P))
        throw std::domain_error("repeated roots");
    BigInt c = content(P);
    if (c != 1 && !is_nfree(c, 2))
        throw std::domain_error("content is not squarefree");
    QuadraticCover cov;
    cov.P = P;
    for (auto &[f, mult] : factor_over_Q(P).factors)
        cov.branch_orbits.push_back({HomogPolynomial::from(f, f.degree()), 2});
    cov.infinity_branch = P.degree() % 2 == 1;
    if (cov.infinity_branch)
        cov.branch_orbits.push_back({HomogPolynomial::infinity(), 2});
    cov.r = P.degree() + (cov.infinity_branch ? 1 : 0);
    return cov;
}

inline SpecializationReport quad_specialize(const QuadraticCover &c, const ProjectivePoint &t0)
{
    for (auto &o : c.branch_orbits)
        if (eval_proj(o.hom, t0) == 0)
            throw std::domain_error("specialization at branch point");
    const int N = c.P.degree();
    BigInt val = HomogPolynomial::from(c.P, N).eval(t0.u, t0.v);
    if (N % 2)
        val *= t0.v;
    SpecializationReport rep;
    rep.t0 = t0;
    rep.m = squarefree_part(val);
    if (rep.m == 1) {
        rep.group = "trivial";
        return rep;
    }
    rep.group = "Z/2";
    rep.dF = quadratic_field_discriminant(rep.m);
    for (auto &p : prime_divisors(rep.dF)) {
        rep.ramified.push_back(p);
        if (p != 2)
            rep.inertia[p] = 2;
    }
    return rep;
}

// ---------------------------------------------------------------- cubic

struct CubicCover {
    BiPolynomial P;
    IntPolynomial delta;
    QFactorization delta_factors;
    std::vector<int> factor_index; ///< ramification index per delta factor (1 = unbranched)
    int infinity_index = 1;
    bool infinity_branch = false;
    std::vector<BranchOrbit> branch_orbits;
    static constexpr int group_order = 6;
};

namespace detail {

inline constexpr int kInfiniteValuation = INT_MAX / 4;

/// Multiplicity of the irreducible primitive R in f (f = 0 gives infinity).
inline int poly_valuation(IntPolynomial f, const IntPolynomial &R)
{
    if (f.is_zero())
        return kInfiniteValuation;
    int k = 0;
    while (true) {
        auto q = divide_exact(f, R);
        if (!q)
            return k;
        f = *q;
        ++k;
    }
}

/// Ramification index at the place R of a monic Y-cubic, given mu = v_R(disc).
inline int cubic_branch_index(const BiPolynomial &P, const IntPolynomial &R, int mu)
{
    if (mu == 0)
        return 1;
    if (mu % 2)
        return 2;
    IntPolynomial a2 = P.coeff(2), a1 = P.coeff(1), a0 = P.coeff(0);
    // depressed form Y^3 + A Y + B up to constant factors
    IntPolynomial A = BigInt(3) * a1 - a2 * a2;
    IntPolynomial B = BigInt(2) * a2 * a2 * a2 - BigInt(9) * a1 * a2 + BigInt(27) * a0;
    long alpha = poly_valuation(A, R), beta = poly_valuation(B, R);
    if (3 * alpha >= 2 * beta && beta % 3 != 0)
        return 3;
    return 1;
}

/// The cubic in local coordinates at infinity: T = 1/S, Y = W S^-c.
inline BiPolynomial cubic_at_infinity(const BiPolynomial &P)
{
    int c = 0;
    for (int i = 0; i < 3; ++i) {
        int d = P.coeff(i).degree();
        if (d > 0)
            c = std::max(c, (d + (3 - i) - 1) / (3 - i));
    }
    BiPolynomial Q;
    for (int i = 0; i < 3; ++i)
        Q.y.push_back(P.coeff(i).is_zero() ? IntPolynomial{} : reverse(P.coeff(i), (3 - i) * c));
    Q.y.push_back(IntPolynomial::constant(1));
    return Q;
}

inline int scale_exponent(const BiPolynomial &P)
{
    int c = 0;
    for (int i = 0; i < 3; ++i) {
        int d = P.coeff(i).degree();
        if (d > 0)
            c = std::max(c, (d + (3 - i) - 1) / (3 - i));
    }
    return c;
}

/// Monic integral cubic v^(3c) P(u/v, Y/v^c) in the variable Y.
inline IntPolynomial integral_specialization(const BiPolynomial &P, const ProjectivePoint &t0)
{
    int c = scale_exponent(P);
    std::vector<BigInt> co(4);
    for (int i = 0; i < 3; ++i)
        co[i] = HomogPolynomial::from(P.coeff(i), (3 - i) * c).eval(t0.u, t0.v);
    co[3] = 1;
    return IntPolynomial(co);
}

} // namespace detail

inline CubicCover cubic_cover(const BiPolynomial &P)
{
    if (P.degree_y() != 3 || !P.monic_y())
        throw std::invalid_argument("cubic cover needs a monic Y-cubic");
    CubicCover cov;
    cov.P = P;
    cov.delta = discriminant_y(P);
    if (cov.delta.is_zero())
        throw std::domain_error("cubic is inseparable over Q(T)");
    if (cov.delta.degree() >= 1)
        cov.delta_factors = factor_over_Q(cov.delta);
    else
        cov.delta_factors.content = cov.delta.coeff(0);
    for (auto &[f, mu] : cov.delta_factors.factors) {
        int e = detail::cubic_branch_index(P, f, mu);
        cov.factor_index.push_back(e);
        if (e >= 2)
            cov.branch_orbits.push_back({HomogPolynomial::from(f, f.degree()), e});
    }
    BiPolynomial Q = detail::cubic_at_infinity(P);
    IntPolynomial dinf = discriminant_y(Q);
    IntPolynomial S = IntPolynomial::x();
    int mu = detail::poly_valuation(dinf, S);
    cov.infinity_index = detail::cubic_branch_index(Q, S, mu);
    cov.infinity_branch = cov.infinity_index >= 2;
    if (cov.infinity_branch)
        cov.branch_orbits.push_back({HomogPolynomial::infinity(), cov.infinity_index});
    return cov;
}

inline CubicCover cubic_cover(const std::string &text) { return cubic_cover(parse_bivariate(text)); }

/// Group of the splitting field of a separable monic integral cubic (fast path for surveys).
inline std::string cubic_group_tag(const IntPolynomial &f)
{
    BigInt D = discriminant(f);
    if (D == 0)
        throw std::domain_error("inseparable cubic");
    bool irreducible = false;
    for (uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}) {
        FpPoly r = fp::reduce(f, p);
        if (fp::count_roots(r, p) == 0) {
            irreducible = true;
            break;
        }
    }
    if (!irreducible)
        irreducible = factor_over_Q(f).irreducible();
    bool square = D > 0 && mpz_perfect_square_p(D.get_mpz_t());
    if (irreducible)
        return square ? "C3" : "S3";
    return square ? "trivial" : "C2";
}

inline SpecializationReport cubic_specialize(const CubicCover &c, const ProjectivePoint &t0)
{
    if (t0.is_infinity())
        throw std::invalid_argument("cubic specialization needs a finite t0");
    IntPolynomial f = detail::integral_specialization(c.P, t0);
    if (discriminant(f) == 0)
        throw std::domain_error("t0 is a branch point or a root of the discriminant");
    SpecializationReport rep;
    rep.t0 = t0;
    rep.group = cubic_group_tag(f);
    auto tame = [&](const BigInt &p) { return p != 2 && p != 3; };
    if (rep.group == "S3" || rep.group == "C3") {
        BigInt dK = field_discriminant(f);
        rep.dK = dK;
        if (rep.group == "S3") {
            rep.m = squarefree_part(dK);
            BigInt dk = quadratic_field_discriminant(dK);
            rep.dF = dk * dK * dK;
        } else {
            rep.dF = dK;
        }
        for (auto &p : prime_divisors(dK)) {
            rep.ramified.push_back(p);
            if (tame(p))
                rep.inertia[p] = valuation(p, dK) == 1 ? 2 : 3;
        }
    } else if (rep.group == "C2") {
        for (auto &[g, mult] : factor_over_Q(f).factors)
            if (g.degree() == 2)
                rep.m = squarefree_part(discriminant(g));
        rep.dF = quadratic_field_discriminant(rep.m);
        for (auto &p : prime_divisors(rep.dF)) {
            rep.ramified.push_back(p);
            if (tame(p))
                rep.inertia[p] = 2;
        }
    }
    return rep;
}

inline SpecializationReport specialize(const QuadraticCover &c, const ProjectivePoint &t0) { return quad_specialize(c, t0); }
inline SpecializationReport specialize(const CubicCover &c, const ProjectivePoint &t0) { return cubic_specialize(c, t0); }

// ---------------------------------------------------------------- survey predicates

struct S3Flags {
    bool galois_S3_over_QT = false;
    bool delta_irreducible = false;
    bool leading_form_ok = false;
    bool branch_conjugate = false;
    bool regular = false;
    std::optional<BigInt> witness; ///< integer t0 with S3 specialization

    bool all() const { return galois_S3_over_QT && delta_irreducible && leading_form_ok && branch_conjugate && regular; }
};

/// Flags of a monic Y-cubic with T-degree bound D (D < 0: use the actual T-degree).
inline S3Flags s3_survey_predicates(const BiPolynomial &P, int D = -1)
{
    if (P.degree_y() != 3 || !P.monic_y())
        throw std::invalid_argument("survey predicates need a monic Y-cubic");
    if (D < 0)
        D = std::max(0, P.degree_t());
    S3Flags fl;
    // leading form a_{2,D} Y^2 + a_{1,D} Y + a_{0,D}
    BigInt a = P.coeff(2).coeff(D), b = P.coeff(1).coeff(D), cc = P.coeff(0).coeff(D);
    if (a != 0) {
        BigInt disc = b * b - 4 * a * cc;
        fl.leading_form_ok = disc < 0 || (disc > 0 && !mpz_perfect_square_p(disc.get_mpz_t()));
    }
    IntPolynomial delta = discriminant_y(P);
    if (delta.is_zero())
        return fl;
    for (int k = 0; k <= 80 && !fl.galois_S3_over_QT; ++k) {
        BigInt t = (k % 2) ? BigInt((k + 1) / 2) : BigInt(-(k / 2));
        if (delta.eval(t) == 0)
            continue;
        if (cubic_group_tag(detail::integral_specialization(P, ProjectivePoint::make(t, 1))) == "S3") {
            fl.galois_S3_over_QT = true;
            fl.witness = t;
        }
    }
    CubicCover cov = cubic_cover(P);
    const auto &fs = cov.delta_factors.factors;
    fl.delta_irreducible = fs.size() == 1 && fs[0].second == 1;
    fl.branch_conjugate = fl.delta_irreducible && !cov.infinity_branch;
    bool odd = false;
    for (auto &[f, mu] : fs)
        if (mu % 2)
            odd = true;
    fl.regular = fl.galois_S3_over_QT && odd;
    return fl;
}

// ---------------------------------------------------------------- Chebotarev sieve

struct ChebotarevSieve {
    std::vector<uint64_t> primes; ///< p with R mod p rootless
    uint64_t considered = 0;      ///< primes not dividing lc(R)
    double density = 0;
    double predicted_sn = 0;      ///< derangement proportion of S_deg
};

inline double derangement_proportion(int n)
{
    double s = 0, f = 1;
    for (int k = 0; k <= n; ++k) {
        if (k > 0)
            f *= k;
        s += ((k % 2) ? -1.0 : 1.0) / f;
    }
    return s;
}

inline ChebotarevSieve chebotarev_unramified_sieve(const IntPolynomial &R, uint64_t bound)
{
    if (R.degree() < 1)
        throw std::invalid_argument("sieve polynomial must be nonconstant");
    ChebotarevSieve out;
    for (uint64_t p : primes_up_to(bound)) {
        if (mpz_divisible_ui_p(R.lc().get_mpz_t(), (unsigned long)p))
            continue;
        ++out.considered;
        if (rootless_mod_p(R, p))
            out.primes.push_back(p);
    }
    out.density = out.considered ? double(out.primes.size()) / double(out.considered) : 0.0;
    out.predicted_sn = derangement_proportion(R.degree());
    return out;
}

/// Sieve attached to a cover: product of its branch minimal polynomials; empty when a branch point is rational.
template <class Cover>
inline std::vector<uint64_t> unramified_sieve(const Cover &c, uint64_t bound)
{
    IntPolynomial R = IntPolynomial::constant(1);
    for (auto &o : c.branch_orbits) {
        if (o.degree() == 1)
            return {};
        R = R * o.hom.dehomogenize();
    }
    if (R.degree() < 1)
        return {};
    return chebotarev_unramified_sieve(R, bound).primes;
}

struct UnramifiedViolation {
    ProjectivePoint t0;
    BigInt p;
};

/// Sieve primes outside `excluded` that still ramify in some sampled specialization.
template <class Cover>
inline std::vector<UnramifiedViolation> verify_unramified(const Cover &c, const std::vector<uint64_t> &sieve,
                                                          const std::vector<ProjectivePoint> &samples,
                                                          const PrimeSet &excluded)
{
    std::vector<UnramifiedViolation> bad;
    for (auto &t0 : samples) {
        SpecializationReport rep;
        try {
            rep = specialize(c, t0);
        } catch (const std::domain_error &) {
            continue;
        }
        for (uint64_t p : sieve) {
            BigInt pb((unsigned long)p);
            if (excluded.count(pb))
                continue;
            if (mpz_divisible_ui_p(rep.dF.get_mpz_t(), (unsigned long)p))
                bad.push_back({t0, pb});
        }
    }
    return bad;
}

} // namespace speclab
