#pragma once

#include "speclab/twistlab.hpp"

#include <cmath>
#include <array>
#include <functional>
#include <ostream>

namespace speclab {

// ---------------------------------------------------------------- polynomial sets

struct PolyCounts {
    int n = 2, N = 0;
    int64_t H = 0;
    uint64_t P = 0;  ///< degree N, root multiplicities <= n-1
    uint64_t P2 = 0; ///< and squarefree content
    int r = 0;       ///< branch point count matching degree N (N or N+1)
    std::optional<uint64_t> E; ///< quadratic extensions with r branch points, n = 2 only
};

namespace detail {

inline bool squarefree_small(int64_t c)
{
    c = c < 0 ? -c : c;
    for (int64_t p = 2; p * p <= c; ++p)
        if (c % (p * p) == 0)
            return false;
    return true;
}

/// Calls fn(coeffs) for every coefficient vector of length N+1 with entries in [-H, H] and a_N != 0.
template <class Fn>
void for_each_poly(int N, int64_t H, Fn &&fn)
{
    std::vector<int64_t> a(size_t(N) + 1, -H);
    while (true) {
        if (a[N] != 0)
            fn(a);
        size_t i = 0;
        while (i <= size_t(N) && a[i] == H)
            a[i++] = -H;
        if (i > size_t(N))
            return;
        ++a[i];
    }
}

inline IntPolynomial from_small(const std::vector<int64_t> &a)
{
    std::vector<BigInt> c;
    for (auto x : a)
        c.push_back(BigInt(long(x)));
    return IntPolynomial(c);
}

inline bool multiplicities_below(const IntPolynomial &P, int n)
{
    for (auto &[g, m] : squarefree_decomposition(P))
        if (m >= n)
            return false;
    return true;
}

/// |P(n,N,H)| and |P2(n,N,H)| by enumeration (word arithmetic up to degree 2).
inline std::pair<uint64_t, uint64_t> count_P(int n, int N, int64_t H)
{
    std::vector<char> sqf(size_t(H) + 1, 0);
    for (int64_t c = 1; c <= H; ++c)
        sqf[c] = squarefree_small(c);
    uint64_t all = 0, sq = 0;
    for_each_poly(N, H, [&](const std::vector<int64_t> &a) {
        bool in;
        if (N <= 1)
            in = true;
        else if (N == 2)
            in = n >= 3 || a[1] * a[1] - 4 * a[0] * a[2] != 0;
        else
            in = multiplicities_below(from_small(a), n);
        if (!in)
            return;
        ++all;
        int64_t g = 0;
        for (auto x : a)
            g = std::gcd(g, x);
        if (sqf[g])
            ++sq;
    });
    return {all, sq};
}

/// Regular quadratic extensions with r branch points: polynomials of degree <= r accepted by quad_cover.
inline uint64_t count_extensions(int r, int64_t H)
{
    uint64_t cnt = 0;
    for (int N = 1; N <= r; ++N)
        for_each_poly(N, H, [&](const std::vector<int64_t> &a) {
            try {
                if (quad_cover(from_small(a)).r == r)
                    ++cnt;
            } catch (const std::domain_error &) {
            }
        });
    return cnt;
}

} // namespace detail

inline PolyCounts count_poly_sets(int n, int N, int64_t H, bool extensions = true)
{
    if (n < 2 || N < 1 || H < 1)
        throw std::invalid_argument("count_poly_sets needs n >= 2, N >= 1, H >= 1");
    PolyCounts c;
    c.n = n;
    c.N = N;
    c.H = H;
    std::tie(c.P, c.P2) = detail::count_P(n, N, H);
    c.r = N % 2 == 0 ? N : N + 1;
    if (n == 2 && extensions)
        c.E = detail::count_extensions(c.r, H);
    return c;
}

// ---------------------------------------------------------------- quadratic fields

inline BigInt fundamental_discriminant(int64_t d)
{
    return quadratic_field_discriminant(BigInt(long(d)));
}

/// Fundamental discriminants D with |D| <= x, ascending.
inline std::vector<int64_t> quad_field_census(int64_t x)
{
    std::vector<int64_t> out;
    if (x < 3)
        return out;
    for (int64_t d : nfree_sieve(2, x)) {
        int64_t r = ((d % 4) + 4) % 4;
        int64_t D = r == 1 ? d : 4 * d;
        if (std::llabs(D) <= x)
            out.push_back(D);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline int64_t field_kernel(int64_t D) { return (((D % 4) + 4) % 4) == 1 ? D : D / 4; }

// ---------------------------------------------------------------- density series

struct DensitySeries {
    std::vector<int64_t> x;
    std::vector<uint64_t> numerator;
    std::vector<uint64_t> denominator;
    std::vector<uint64_t> unknowns;

    size_t size() const { return x.size(); }
    double lower(size_t i) const { return denominator[i] ? double(numerator[i]) / double(denominator[i]) : 0.0; }
    double upper(size_t i) const
    {
        return denominator[i] ? double(numerator[i] + unknowns[i]) / double(denominator[i]) : 0.0;
    }
};

inline void write_series_csv(std::ostream &os, const DensitySeries &s)
{
    os << "x,numerator,denominator,unknowns,lower,upper\n";
    char buf[64];
    for (size_t i = 0; i < s.size(); ++i) {
        os << s.x[i] << "," << s.numerator[i] << "," << s.denominator[i] << "," << s.unknowns[i] << ",";
        std::snprintf(buf, sizeof buf, "%.8f,%.8f", s.lower(i), s.upper(i));
        os << buf << "\n";
    }
}

enum class TwistStatus { Found, LocalObstruction, Certified, Unknown };

inline std::string to_string(TwistStatus s)
{
    switch (s) {
    case TwistStatus::Found:
        return "found";
    case TwistStatus::LocalObstruction:
        return "absent-local";
    case TwistStatus::Certified:
        return "absent-certificate";
    default:
        return "unknown";
    }
}

struct TwistRecord {
    int64_t D = 0; ///< fundamental discriminant
    int64_t d = 0; ///< squarefree kernel
    TwistStatus status = TwistStatus::Unknown;
    Solubility local = Solubility::Unknown;
    std::string place;   ///< obstructing place or certificate prime
    int64_t height = 0;  ///< height at which a point was found, or the last height searched
};

/// Classifies every quadratic field with |D| <= x for y^2 = d*P: point found within the H schedule,
/// absent (local obstruction or certificate), or unknown.
inline std::vector<TwistRecord> classify_twists(const QuadraticCover &cov, int64_t x, const std::vector<int64_t> &Hs,
                                                unsigned jobs = 1)
{
    std::vector<int64_t> Ds = quad_field_census(x);
    std::vector<TwistRecord> out(Ds.size());
    if (Ds.empty())
        return out;
    SuperellipticCurve curve = build_curve(2, cov.P);
    PointSearcher searcher(curve);
    LocalCache cache(curve);
    const std::vector<BigInt> bad = base_bad_primes(curve);
    const bool certifiable = curve.N % 2 == 0 && !has_rational_root(cov.P);
    parallel_for(Ds.size(), jobs, [&](size_t i) {
        TwistRecord &r = out[i];
        r.D = Ds[i];
        r.d = field_kernel(Ds[i]);
        BigInt d = BigInt(long(r.d));
        ELSResult els = everywhere_locally_soluble(curve, d, &cache, true, &bad);
        r.local = els.status;
        if (els.status == Solubility::Insoluble) {
            r.status = TwistStatus::LocalObstruction;
            for (auto &l : els.log)
                if (l.status == Solubility::Insoluble)
                    r.place = l.place;
            return;
        }
        if (certifiable)
            if (auto cert = obstruction_certificate(make_twist(curve, d))) {
                r.status = TwistStatus::Certified;
                r.place = cert->p.get_str();
                return;
            }
        for (int64_t H : Hs) {
            r.height = H;
            if (!searcher.search(d, H, true).empty()) {
                r.status = TwistStatus::Found;
                return;
            }
        }
        r.status = TwistStatus::Unknown;
    });
    std::sort(out.begin(), out.end(), [](const TwistRecord &a, const TwistRecord &b) {
        return std::llabs(a.D) != std::llabs(b.D) ? std::llabs(a.D) < std::llabs(b.D) : a.D < b.D;
    });
    return out;
}

inline void write_twist_csv(std::ostream &os, const std::vector<TwistRecord> &rows)
{
    os << "D,d,status,local,place,height\n";
    for (auto &r : rows)
        os << r.D << "," << r.d << "," << to_string(r.status) << "," << to_string(r.local) << "," << r.place << ","
           << r.height << "\n";
}

namespace detail {

/// Cumulative counts over the grid; pick(record) returns 0 (out), 1 (in) or 2 (unknown).
template <class Pick>
DensitySeries accumulate(const std::vector<TwistRecord> &recs, const std::vector<int64_t> &grid, Pick &&pick)
{
    DensitySeries s;
    size_t j = 0;
    uint64_t num = 0, den = 0, unk = 0;
    for (int64_t x : grid) {
        while (j < recs.size() && std::llabs(recs[j].D) <= x) {
            ++den;
            int k = pick(recs[j]);
            if (k == 1)
                ++num;
            else if (k == 2)
                ++unk;
            ++j;
        }
        s.x.push_back(x);
        s.numerator.push_back(num);
        s.denominator.push_back(den);
        s.unknowns.push_back(unk);
    }
    return s;
}

inline void check_grid(const std::vector<int64_t> &grid)
{
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("x grid must be increasing");
}

inline int pick_global(const TwistRecord &r)
{
    return r.status == TwistStatus::Found ? 1 : r.status == TwistStatus::Unknown ? 2 : 0;
}

inline int pick_local(const TwistRecord &r)
{
    return r.local == Solubility::Soluble ? 1 : r.local == Solubility::Unknown ? 2 : 0;
}

} // namespace detail

/// Proportion of quadratic fields with |d_F| <= x that are specializations of the cover.
inline DensitySeries twist_density_series(const QuadraticCover &cov, const std::vector<int64_t> &grid,
                                          const std::vector<int64_t> &Hs, unsigned jobs = 1,
                                          std::vector<TwistRecord> *records = nullptr)
{
    detail::check_grid(grid);
    if (grid.empty())
        return {};
    auto recs = classify_twists(cov, grid.back(), Hs, jobs);
    DensitySeries s = detail::accumulate(recs, grid, detail::pick_global);
    if (records)
        *records = std::move(recs);
    return s;
}

struct LocalGlobalSeries {
    DensitySeries global; ///< fields with a rational point found
    DensitySeries local;  ///< fields everywhere locally soluble
};

inline LocalGlobalSeries local_global_ratio_series(const QuadraticCover &cov, const std::vector<int64_t> &grid,
                                                   int64_t H, unsigned jobs = 1)
{
    detail::check_grid(grid);
    LocalGlobalSeries out;
    if (grid.empty())
        return out;
    auto recs = classify_twists(cov, grid.back(), {H}, jobs);
    out.global = detail::accumulate(recs, grid, detail::pick_global);
    out.local = detail::accumulate(recs, grid, detail::pick_local);
    return out;
}

struct LogFit {
    double alpha = 0;
    double intercept = 0;
    double residual = 0; ///< root mean square of the fit
};

enum class Envelope { Lower, Upper };

/// Least squares of log(ratio) against log(log(x)); the slope is -alpha.
inline LogFit fit_log_exponent(const DensitySeries &s, Envelope env = Envelope::Upper)
{
    if (s.size() < 4)
        throw std::invalid_argument("fit needs at least 4 grid points");
    std::vector<double> X, Y;
    for (size_t i = 0; i < s.size(); ++i) {
        double r = env == Envelope::Upper ? s.upper(i) : s.lower(i);
        if (!(r > 0) || s.x[i] < 3)
            throw std::domain_error("fit needs positive ratios at x >= 3");
        X.push_back(std::log(std::log(double(s.x[i]))));
        Y.push_back(std::log(r));
    }
    const double m = double(X.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        sx += X[i];
        sy += Y[i];
        sxx += X[i] * X[i];
        sxy += X[i] * Y[i];
    }
    double den = m * sxx - sx * sx;
    if (den == 0)
        throw std::domain_error("degenerate grid for the fit");
    double slope = (m * sxy - sx * sy) / den;
    LogFit f;
    f.alpha = -slope;
    f.intercept = (sy - slope * sx) / m;
    double ss = 0;
    for (size_t i = 0; i < X.size(); ++i) {
        double e = Y[i] - (f.intercept + slope * X[i]);
        ss += e * e;
    }
    f.residual = std::sqrt(ss / m);
    return f;
}

/// Series whose ratio is exactly r(x) on the grid (denominator 10^9), for fit checks.
inline DensitySeries synthetic_series(const std::vector<int64_t> &grid, const std::function<double(double)> &r)
{
    DensitySeries s;
    const uint64_t den = 1000000000ULL;
    for (int64_t x : grid) {
        s.x.push_back(x);
        s.denominator.push_back(den);
        s.numerator.push_back(uint64_t(std::llround(r(double(x)) * double(den))));
        s.unknowns.push_back(0);
    }
    return s;
}

// ---------------------------------------------------------------- S3 survey

struct SurveyFlag {
    std::string name;
    uint64_t hits = 0;
    double proportion = 0;
    double radius = 0; ///< 95% binomial radius, 0 when exhaustive
};

struct S3Survey {
    int D = 1;
    int64_t H = 1;
    uint64_t seed = 0;
    uint64_t samples = 0;
    bool exhaustive = false;
    std::vector<SurveyFlag> flags; ///< the five predicates then "all"

    const SurveyFlag &flag(const std::string &name) const
    {
        for (auto &f : flags)
            if (f.name == name)
                return f;
        throw std::out_of_range("no survey flag " + name);
    }
};

inline BiPolynomial survey_cubic(const std::vector<int64_t> &a, int D)
{
    BiPolynomial P;
    for (int i = 0; i < 3; ++i)
        P.y.push_back(detail::from_small(std::vector<int64_t>(a.begin() + i * (D + 1), a.begin() + (i + 1) * (D + 1))));
    P.y.push_back(IntPolynomial::constant(1));
    return P;
}

inline S3Survey s3_survey(int D, int64_t H, uint64_t sample_size, uint64_t seed, unsigned jobs = 1)
{
    if (D < 1)
        throw std::invalid_argument("survey needs D >= 1");
    if (H < 1)
        throw std::invalid_argument("survey needs H >= 1");
    if (sample_size < 1)
        throw std::invalid_argument("survey needs a positive sample size");
    S3Survey sv;
    sv.D = D;
    sv.H = H;
    sv.seed = seed;
    const int k = 3 * (D + 1);
    // exhaustive when the full box fits in the sample budget
    double box = std::pow(double(2 * H + 1), k);
    sv.exhaustive = box <= double(sample_size);
    sv.samples = sv.exhaustive ? uint64_t(box) : sample_size;
    std::vector<std::array<char, 6>> res(sv.samples);
    parallel_for(sv.samples, jobs, [&](size_t i) {
        std::vector<int64_t> a(static_cast<size_t>(k));
        if (sv.exhaustive) {
            uint64_t idx = i;
            for (int j = 0; j < k; ++j) {
                a[j] = int64_t(idx % uint64_t(2 * H + 1)) - H;
                idx /= uint64_t(2 * H + 1);
            }
        } else {
            SplitRng rng(seed, i);
            for (auto &x : a)
                x = rng.uniform(-H, H);
        }
        S3Flags f = s3_survey_predicates(survey_cubic(a, D), D);
        res[i] = {f.galois_S3_over_QT, f.delta_irreducible, f.leading_form_ok, f.branch_conjugate, f.regular, f.all()};
    });
    const char *names[6] = {"galois_S3", "delta_irreducible", "leading_form", "branch_conjugate", "regular", "all"};
    for (int j = 0; j < 6; ++j) {
        SurveyFlag fl;
        fl.name = names[j];
        for (auto &r : res)
            fl.hits += uint64_t(r[j]);
        fl.proportion = double(fl.hits) / double(sv.samples);
        if (!sv.exhaustive)
            fl.radius = 1.96 * std::sqrt(fl.proportion * (1 - fl.proportion) / double(sv.samples));
        sv.flags.push_back(fl);
    }
    return sv;
}

} // namespace speclab
