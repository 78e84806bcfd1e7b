// Acceptance suite: one PASS/FAIL line per criterion.
#include "speclab/beckmann.hpp"
#include "speclab/bounds.hpp"
#include "speclab/census.hpp"
#include "speclab/twistlab.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

using namespace speclab;

namespace {

unsigned g_jobs = 1;

struct Verdict {
    bool ok = false;
    std::string detail;
};

IntPolynomial random_poly(SplitRng &rng, int deg, int64_t bound, bool monic = false)
{
    std::vector<BigInt> c;
    for (int i = 0; i <= deg; ++i)
        c.push_back(BigInt(long(rng.uniform(-bound, bound))));
    while (c.back() == 0)
        c.back() = BigInt(long(rng.uniform(-bound, bound)));
    if (monic)
        c.back() = 1;
    return IntPolynomial(c);
}

IntPolynomial primitive_up_to_sign(const IntPolynomial &f)
{
    BigInt c = content(f);
    std::vector<BigInt> out;
    for (int i = 0; i <= f.degree(); ++i)
        out.push_back(f.coeff(i) / c);
    if (out.back() < 0)
        for (auto &x : out)
            x = -x;
    return IntPolynomial(out);
}

// ------------------------------------------------------------------ 1

Verdict branch_point_law()
{
    size_t bad = 0, done = 0;
    for (uint64_t i = 0; done < 500; ++i) {
        SplitRng rng(101, i);
        int deg = int(rng.uniform(2, 9));
        IntPolynomial P = random_poly(rng, deg, 10);
        if (!is_separable(P))
            continue;
        BigInt c = content(P);
        if (c != 1 && !is_nfree(c, 2))
            continue;
        ++done;
        auto cov = quad_cover(P);
        IntPolynomial prod = IntPolynomial::constant(1);
        int inf = 0, deg_sum = 0;
        bool irreducible = true;
        for (auto &o : cov.branch_orbits) {
            if (o.at_infinity()) {
                ++inf;
                continue;
            }
            IntPolynomial f = o.hom.dehomogenize();
            deg_sum += f.degree();
            if (f.degree() > 1 && detail::zassenhaus(f).size() != 1)
                irreducible = false;
            prod = prod * f;
        }
        bool ok = irreducible && deg_sum == deg && inf == (deg % 2) &&
                  primitive_up_to_sign(prod) == primitive_up_to_sign(P) && cov.r == deg + deg % 2;
        if (!ok)
            ++bad;
    }
    return {bad == 0, "500 covers, " + std::to_string(bad) + " disagreements"};
}

// ------------------------------------------------------------------ 2

Verdict beckmann()
{
    size_t mism = 0, checked = 0, families = 0;
    auto tally = [&](const ConsistencyStats &st) {
        mism += st.mismatches.size() + st.uniqueness_violations;
        checked += st.checked;
        ++families;
    };
    for (auto s : {"T^2-2", "3*T^2-2", "T^3-2", "T^4+T+1", "T^5-T+1", "T^6+T+1", "5*T^7-3*T+2", "T^8+1"})
        tally(consistency_check(quad_cover(parse_polynomial(s)), 1000, 1000, 7, g_jobs));
    tally(consistency_check(cubic_cover("Y^3+T*Y+T"), 1000, 1000, 7, g_jobs));
    int cubics = 0;
    for (uint64_t i = 0; cubics < 20; ++i) {
        SplitRng rng(202, i);
        std::vector<int64_t> a(6);
        for (auto &x : a)
            x = rng.uniform(-20, 20);
        BiPolynomial P = survey_cubic(a, 1);
        if (discriminant_y(P).is_zero() || !s3_survey_predicates(P, 1).galois_S3_over_QT)
            continue;
        ++cubics;
        tally(consistency_check(cubic_cover(P), 1000, 1000, 7 + i, g_jobs));
    }
    return {mism == 0, std::to_string(families) + " families, " + std::to_string(checked) + " specializations, " +
                           std::to_string(mism) + " mismatches"};
}

// ------------------------------------------------------------------ 3

Verdict certificate_soundness()
{
    struct Case {
        TwistedCurve tc;
        ObstructionCertificate cert;
    };
    std::vector<Case> cases;
    for (uint64_t i = 0; cases.size() < 200 && i < 200000; ++i) {
        SplitRng rng(303, i);
        int n = int(rng.uniform(2, 4));
        int N = n * int(rng.uniform(1, 8 / n));
        IntPolynomial P = random_poly(rng, N, 20);
        if (!is_separable(P) || has_rational_root(P))
            continue;
        BigInt d(long(rng.uniform(-200, 200)));
        if (d != 1 && !is_nfree(d, n))
            continue;
        auto tc = make_twist(build_curve(n, P), d);
        auto cert = obstruction_certificate(tc);
        if (cert)
            cases.push_back({tc, *cert});
    }
    size_t found = 0, soluble = 0;
    std::vector<char> pt(cases.size()), loc(cases.size());
    parallel_for(cases.size(), g_jobs, [&](size_t i) {
        pt[i] = !search_points(cases[i].tc, 10000, true).empty();
        loc[i] = local_solubility(cases[i].tc, cases[i].cert.p).status != Solubility::Insoluble;
    });
    for (size_t i = 0; i < cases.size(); ++i) {
        found += pt[i];
        soluble += loc[i];
    }
    return {cases.size() == 200 && found == 0 && soluble == 0,
            std::to_string(cases.size()) + " certified twists, " + std::to_string(found) + " with points, " +
                std::to_string(soluble) + " not insoluble at the certificate prime"};
}

// ------------------------------------------------------------------ 4

Verdict exponent_identities()
{
    bool chain = true;
    for (int r : {6, 8, 10}) {
        RamificationType rt{std::vector<int>(r, 2)};
        BigRat e = abc_exponent(rt, 2);
        int64_t g = rh_genus(2, rt);
        chain &= e == rat(2, r - 4) && 2 * (g - 1) == r - 4 && e == rat(1, g - 1);
    }
    size_t types = 0, bad = 0;
    for (uint64_t order = 2; order <= 24; ++order) {
        std::vector<int> divs;
        for (uint64_t k = 2; k <= order; ++k)
            if (order % k == 0)
                divs.push_back(int(k));
        GroupDescriptor G = make_group(order);
        BigRat alpha = malle_alpha(order);
        std::vector<int> e;
        std::function<void(size_t)> rec = [&](size_t from) {
            if (!e.empty()) {
                ++types;
                RamificationType rt{e};
                try {
                    auto c1 = condition_eq1(rt);
                    auto c2 = condition_eq2(rt, G);
                    bool below = c1.holds && abc_exponent(rt, order) < alpha;
                    if (c2.holds != below || (c2.holds && !c1.holds))
                        ++bad;
                } catch (const std::logic_error &) {
                    ++bad;
                }
            }
            if (e.size() == 12)
                return;
            for (size_t i = from; i < divs.size(); ++i) {
                e.push_back(divs[i]);
                rec(i);
                e.pop_back();
            }
        };
        rec(0);
    }
    return {chain && bad == 0, std::string("chain ") + (chain ? "exact" : "broken") + ", " + std::to_string(types) +
                                   " types swept, " + std::to_string(bad) + " disagreements"};
}

// ------------------------------------------------------------------ 5

Verdict counting()
{
    bool ident = true;
    std::ostringstream os;
    for (int64_t H = 1; H <= 5; ++H) {
        // left side: every squarefree-content separable polynomial of degree 1 or 2 gives a cover with r = 2
        uint64_t lhs = 0;
        for (int64_t a = -H; a <= H; ++a)
            for (int64_t b = -H; b <= H; ++b)
                for (int64_t c = -H; c <= H; ++c) {
                    IntPolynomial f({BigInt(long(c)), BigInt(long(b)), BigInt(long(a))});
                    if (f.degree() < 1 || !is_separable(f))
                        continue;
                    BigInt ct = content(f);
                    if (ct != 1 && !is_nfree(ct, 2))
                        continue;
                    lhs += quad_cover(f).r == 2;
                }
        uint64_t rhs = count_poly_sets(2, 2, H, false).P2 + count_poly_sets(2, 1, H, false).P2;
        ident &= lhs == rhs;
        os << (H > 1 ? " " : "") << lhs;
    }
    double r50 = double(count_poly_sets(2, 2, 50, false).P2) / 125000.0;
    double r100 = double(count_poly_sets(2, 2, 100, false).P2) / 1000000.0;
    double rel = std::abs(r100 - r50) / r100;
    char buf[160];
    std::snprintf(buf, sizeof buf, "; P2/H^3 %.4f (H=50) vs %.4f (H=100), drift %.2f%%", r50, r100, 100 * rel);
    return {ident && rel < 0.05, "E(2,H) for H=1..5: " + os.str() + (ident ? " (identity exact)" : " (identity broken)") + buf};
}

// ------------------------------------------------------------------ 6

Verdict density_trend()
{
    const std::vector<int64_t> grid{1000, 2000, 5000, 10000, 20000, 50000, 100000};
    const std::vector<int64_t> Hs{10, 100, 1000};
    auto s = twist_density_series(quad_cover(parse_polynomial("T^6+T+1")), grid, Hs, g_jobs);
    auto fit = fit_log_exponent(s, Envelope::Upper);
    auto c = twist_density_series(quad_cover(parse_polynomial("T^2-2")), grid, Hs, g_jobs);
    const size_t last = grid.size() - 1;
    bool decays = s.upper(last) < s.upper(0);
    bool control_flat = c.upper(last) >= c.upper(0);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "T^6+T+1 upper %.4f -> %.4f, alpha %.3f (residual %.3g); control T^2-2 upper %.4f -> %.4f (%s)",
                  s.upper(0), s.upper(last), fit.alpha, fit.residual, c.upper(0), c.upper(last),
                  control_flat ? "no decay" : "decays");
    return {decays && fit.alpha > 0 && control_flat, buf};
}

// ------------------------------------------------------------------ 7

Verdict s3_survey_trend()
{
    auto lo = s3_survey(1, 5, 10000, 1, g_jobs);
    auto hi = s3_survey(1, 20, 10000, 1, g_jobs);
    double a5 = lo.flag("all").proportion, a20 = hi.flag("all").proportion;
    auto cov = cubic_cover("Y^3+T*Y+T");
    std::set<std::string> pts;
    for (auto &o : cov.branch_orbits) {
        if (o.at_infinity()) {
            pts.insert("inf");
            continue;
        }
        IntPolynomial f = o.hom.dehomogenize();
        if (f.degree() == 1)
            pts.insert(rat(-f.coeff(0), f.coeff(1)).get_str());
        else
            pts.insert("deg" + std::to_string(f.degree()));
    }
    bool branch_ok = pts == std::set<std::string>{"0", "-27/4", "inf"};
    char buf[256];
    std::snprintf(buf, sizeof buf, "all-flags %.4f (H=5) -> %.4f (H=20, need >= 0.9); leading_form %.4f; branch set %s",
                  a5, a20, hi.flag("leading_form").proportion, branch_ok ? "{0, -27/4, inf}" : "wrong");
    return {a20 >= 0.9 && a20 > a5 && branch_ok, buf};
}

// ------------------------------------------------------------------ 8

Verdict odd_degree_local()
{
    auto b = build_curve(2, parse_polynomial("T^3-2"));
    size_t els = 0, total = 0;
    std::vector<BigInt> ds;
    for (uint64_t i = 0; ds.size() < 50; ++i) {
        SplitRng rng(808, i);
        BigInt d(long(rng.uniform(-1000000, 1000000)));
        if (is_nfree(d, 2))
            ds.push_back(d);
    }
    std::vector<char> ok(ds.size());
    parallel_for(ds.size(), g_jobs, [&](size_t i) {
        ok[i] = everywhere_locally_soluble(make_twist(b, ds[i])).status == Solubility::Soluble;
    });
    for (char x : ok)
        els += x, ++total;

    size_t compared = 0, disagree = 0;
    std::vector<std::pair<size_t, size_t>> per(100);
    parallel_for(100, g_jobs, [&](size_t i) {
        SplitRng rng(809, i);
        IntPolynomial P;
        do {
            P = random_poly(rng, 2 * int(rng.uniform(2, 4)), 20);
        } while (!is_separable(P));
        auto c = build_curve(2, P);
        BigInt d;
        do {
            d = BigInt(long(rng.uniform(-50, 50)));
        } while (!is_nfree(d, 2));
        size_t k = 0;
        for (int64_t p : primes_up_to(100000)) {
            BigInt pb = BigInt(long(p));
            if (!hasse_weil_applies(c, d, pb))
                continue;
            auto fast = local_solubility(c, d, pb, -1, true).status;
            auto slow = local_solubility(c, d, pb, -1, false).status;
            ++per[i].first;
            per[i].second += fast != slow;
            if (++k == 5)
                break;
        }
    });
    for (auto &[c, d] : per)
        compared += c, disagree += d;
    return {els == total && total == 50 && compared == 500 && disagree == 0,
            std::to_string(els) + "/" + std::to_string(total) + " twists of y^2 = t^3 - 2 soluble everywhere; " +
                std::to_string(compared) + " shortcut comparisons, " + std::to_string(disagree) + " disagreements"};
}

// ------------------------------------------------------------------ 9

Verdict local_global_candidates()
{
    auto cov = quad_cover(parse_polynomial("T^8+1"));
    auto scan = admissible_prime_scan(cov, first_nontrivial_point(cov), 10000);
    auto curve = build_curve(2, cov.P);
    size_t rechecked = 0;
    for (auto &t : scan.twists)
        rechecked += everywhere_locally_soluble(make_twist(curve, t.d)).status == Solubility::Soluble;
    auto cands = hasse_failure_candidates(cov, 1000, 10000, g_jobs);
    bool bounded = true;
    for (auto &c : cands)
        bounded &= c.height == 10000;
    std::string first = cands.empty() ? "none" : cands.front().d.get_str();
    return {!scan.twists.empty() && rechecked == scan.twists.size() && !cands.empty() && bounded,
            "T^8+1: " + std::to_string(scan.twists.size()) + " admissible twists below 10^4 (" +
                std::to_string(rechecked) + " locally soluble), " + std::to_string(cands.size()) +
                " candidates with no point of height <= 10^4 (first d = " + first + ")"};
}

// ------------------------------------------------------------------ 10

Verdict chebotarev()
{
    auto s = chebotarev_unramified_sieve(parse_polynomial("T^2+1"), 100000);
    double rel = std::abs(s.density - 0.5) / 0.5;
    auto cov = quad_cover(parse_polynomial("T^2+1"));
    auto sieve = unramified_sieve(cov, 1000);
    std::vector<ProjectivePoint> samples;
    SplitRng rng(1010, 0);
    while (samples.size() < 500)
        samples.push_back(random_point(rng, 1000));
    auto bad = verify_unramified(cov, sieve, samples, exceptional_superset(cov));
    char buf[160];
    std::snprintf(buf, sizeof buf, "density %.5f (%.2f%% from 1/2); %zu violations over 500 samples", s.density,
                  100 * rel, bad.size());
    return {rel < 0.02 && bad.empty() && !sieve.empty(), buf};
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"acceptance suite"};
    std::vector<int> known;
    std::vector<int> only;
    g_jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--jobs", g_jobs, "worker threads");
    app.add_option("--known-defect", known, "criteria whose FAIL does not change the exit status");
    app.add_option("--only", only, "run just these criteria");
    CLI11_PARSE(app, argc, argv);

    struct Criterion {
        int id;
        const char *name;
        double limit_s;
        Verdict (*fn)();
    };
    const std::vector<Criterion> all{
        {1, "branch-point law", 10, branch_point_law},
        {2, "ramification prediction consistency", 300, beckmann},
        {3, "no-point certificate soundness", 600, certificate_soundness},
        {4, "exponent identities", 60, exponent_identities},
        {5, "polynomial counting", 300, counting},
        {6, "density-zero trend", 1800, density_trend},
        {7, "S3 survey", 600, s3_survey_trend},
        {8, "odd-degree local solubility", 600, odd_degree_local},
        {9, "local-global candidates", 1800, local_global_candidates},
        {10, "Chebotarev sieve", 300, chebotarev},
    };
    int hard_fail = 0, fails = 0;
    for (auto &c : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end())
            continue;
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.fn();
        } catch (const std::exception &e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.limit_s;
        bool pass = v.ok && in_time;
        bool excused = !pass && std::find(known.begin(), known.end(), c.id) != known.end();
        char head[128];
        std::snprintf(head, sizeof head, "%s %2d %-38s %8.1fs/%.0fs  ", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                      c.limit_s);
        std::cout << head << v.detail << (in_time ? "" : " [over time limit]") << (excused ? " [known defect]" : "")
                  << std::endl;
        if (!pass) {
            ++fails;
            if (!excused)
                ++hard_fail;
        }
    }
    std::cout << fails << " criteria failed, " << (fails - hard_fail) << " of them known defects" << std::endl;
    return hard_fail ? 1 : 0;
}
