#pragma once

#include "speclab/covers.hpp"
#include "speclab/parallel.hpp"
#include "speclab/rng.hpp"

#include <ostream>

namespace speclab {

/// I_p(t0, t) = v_p(P(u, v)) for the orbit minimal polynomial P.
inline int intersection_number(const BranchOrbit &orbit, const ProjectivePoint &t0, const BigInt &p)
{
    if (orbit.hom.lead_u() % p == 0 || orbit.hom.lead_v() % p == 0)
        throw std::domain_error("orbit not p-integral");
    BigInt val = eval_proj(orbit.hom, t0);
    if (val == 0)
        throw std::domain_error("t0 lies on the branch orbit");
    return valuation(p, val);
}

namespace detail {

inline void add_prime_divisors(PrimeSet &s, const BigInt &n)
{
    if (n == 0)
        return;
    for (auto &p : prime_divisors(abs(n)))
        s.insert(p);
}

inline BigInt lowest_coefficient(const IntPolynomial &f)
{
    for (int i = 0; i <= f.degree(); ++i)
        if (f.coeff(i) != 0)
            return f.coeff(i);
    return 0;
}

inline void add_orbit_primes(PrimeSet &s, const std::vector<IntPolynomial> &polys)
{
    for (size_t i = 0; i < polys.size(); ++i) {
        add_prime_divisors(s, polys[i].lc());
        add_prime_divisors(s, lowest_coefficient(polys[i]));
        if (polys[i].degree() >= 2)
            add_prime_divisors(s, discriminant(polys[i]));
        for (size_t j = i + 1; j < polys.size(); ++j)
            add_prime_divisors(s, resultant(polys[i], polys[j]));
    }
}

} // namespace detail

/// Finite set of primes outside which the ramification prediction is claimed.
inline PrimeSet exceptional_superset(const QuadraticCover &c)
{
    PrimeSet s{BigInt(2)};
    detail::add_prime_divisors(s, content(c.P));
    detail::add_prime_divisors(s, c.P.lc());
    detail::add_prime_divisors(s, detail::lowest_coefficient(c.P));
    if (c.P.degree() >= 2)
        detail::add_prime_divisors(s, discriminant(c.P));
    std::vector<IntPolynomial> fin;
    for (auto &o : c.branch_orbits)
        if (!o.at_infinity())
            fin.push_back(o.hom.dehomogenize());
    detail::add_orbit_primes(s, fin);
    return s;
}

inline PrimeSet exceptional_superset(const CubicCover &c)
{
    PrimeSet s{BigInt(2), BigInt(3)};
    detail::add_prime_divisors(s, c.delta_factors.content);
    detail::add_prime_divisors(s, c.delta.lc());
    detail::add_prime_divisors(s, detail::lowest_coefficient(c.delta));
    // every factor of the discriminant, branched or not
    std::vector<IntPolynomial> fs;
    for (auto &[f, mu] : c.delta_factors.factors)
        fs.push_back(f);
    detail::add_orbit_primes(s, fs);
    return s;
}

struct PrimePrediction {
    int orbit = -1;
    int I = 0;
    int order = 1;
    bool exceptional = false;
};

struct RamificationReport {
    ProjectivePoint t0;
    std::map<BigInt, PrimePrediction> primes;
    int uniqueness_violations = 0;

    /// Predicted inertia order at a non-exceptional prime (1 when nothing meets t0).
    int predicted_order(const BigInt &p) const
    {
        auto it = primes.find(p);
        return it == primes.end() ? 1 : it->second.order;
    }
};

template <class Cover>
RamificationReport predict(const Cover &c, const ProjectivePoint &t0, const PrimeSet &superset)
{
    RamificationReport rep;
    rep.t0 = t0;
    std::vector<BigInt> vals;
    for (auto &o : c.branch_orbits) {
        vals.push_back(eval_proj(o.hom, t0));
        if (vals.back() == 0)
            throw std::domain_error("specialization at branch point");
    }
    for (size_t i = 0; i < vals.size(); ++i) {
        if (abs(vals[i]) == 1)
            continue;
        for (auto &p : prime_divisors(abs(vals[i]))) {
            auto &e = rep.primes[p];
            if (superset.count(p)) {
                e.exceptional = true;
                continue;
            }
            if (e.orbit >= 0) {
                // two orbits meet t0 at p: no prediction there
                e.exceptional = true;
                e.order = 1;
                ++rep.uniqueness_violations;
                continue;
            }
            e.orbit = int(i);
            e.I = valuation(p, vals[i]);
            e.order = c.branch_orbits[i].inertia_order(e.I);
        }
    }
    return rep;
}

template <class Cover>
RamificationReport predict(const Cover &c, const ProjectivePoint &t0)
{
    return predict(c, t0, exceptional_superset(c));
}

struct BeckmannRow {
    ProjectivePoint t0;
    BigInt p;
    int orbit = -1;
    int I = 0;
    int predicted_order = 1;
    int actual_order = 1;
    bool actual_ramified = false;
};

/// Per-prime comparison of predicted and actual inertia orders outside the superset.
inline std::vector<BeckmannRow> compare_rows(const RamificationReport &pred, const SpecializationReport &act,
                                             const PrimeSet &superset)
{
    std::set<BigInt> ps;
    for (auto &[p, e] : pred.primes)
        if (!e.exceptional)
            ps.insert(p);
    for (auto &p : act.ramified)
        if (!superset.count(p))
            ps.insert(p);
    std::vector<BeckmannRow> rows;
    for (auto &p : ps) {
        auto it = pred.primes.find(p);
        if (it != pred.primes.end() && it->second.exceptional)
            continue;
        BeckmannRow r;
        r.t0 = pred.t0;
        r.p = p;
        if (it != pred.primes.end()) {
            r.orbit = it->second.orbit;
            r.I = it->second.I;
            r.predicted_order = it->second.order;
        }
        auto ai = act.inertia.find(p);
        r.actual_order = ai == act.inertia.end() ? 1 : ai->second;
        r.actual_ramified = std::find(act.ramified.begin(), act.ramified.end(), p) != act.ramified.end();
        rows.push_back(r);
    }
    return rows;
}

struct BeckmannMismatch {
    ProjectivePoint t0;
    BigInt p;
    int predicted = 1;
    int actual = 1;
};

struct ConsistencyStats {
    size_t checked = 0;
    size_t matches = 0;
    size_t skipped_branch = 0;
    size_t uniqueness_violations = 0;
    size_t bound_violations = 0;
    std::vector<BeckmannMismatch> mismatches;
    std::vector<BeckmannRow> rows;
};

/// Random t0 = u/v with |u| <= H, 1 <= v <= H, gcd(u, v) = 1.
inline ProjectivePoint random_point(SplitRng &rng, int64_t H)
{
    while (true) {
        int64_t u = rng.uniform(-H, H), v = rng.uniform(1, H);
        if (std::gcd(u, v) == 1)
            return ProjectivePoint::make(u, v);
    }
}

template <class Cover>
ConsistencyStats consistency_check(const Cover &c, size_t samples, int64_t H, uint64_t seed, unsigned jobs = 1,
                                   bool keep_rows = false)
{
    const PrimeSet superset = exceptional_superset(c);
    struct Slot {
        bool branch = false;
        int uniq = 0;
        bool bound_bad = false;
        std::vector<BeckmannRow> rows;
    };
    std::vector<Slot> slots(samples);
    parallel_for(samples, jobs, [&](size_t i) {
        SplitRng rng(seed, i);
        ProjectivePoint t0 = random_point(rng, H);
        Slot &s = slots[i];
        SpecializationReport act;
        RamificationReport pred;
        try {
            act = specialize(c, t0);
            pred = predict(c, t0, superset);
        } catch (const std::domain_error &) {
            s.branch = true;
            return;
        }
        s.uniq = pred.uniqueness_violations;
        s.rows = compare_rows(pred, act, superset);
        // |d| is at least the product of odd non-exceptional primes met with I = 1
        BigInt prod = 1;
        for (auto &[p, e] : pred.primes)
            if (!e.exceptional && e.I == 1 && p != 2)
                prod *= p;
        s.bound_bad = abs(act.dF) < prod;
    });
    ConsistencyStats st;
    for (auto &s : slots) {
        if (s.branch) {
            ++st.skipped_branch;
            continue;
        }
        ++st.checked;
        st.uniqueness_violations += size_t(s.uniq);
        if (s.bound_bad)
            ++st.bound_violations;
        bool ok = true;
        for (auto &r : s.rows) {
            if (r.predicted_order != r.actual_order) {
                ok = false;
                st.mismatches.push_back({r.t0, r.p, r.predicted_order, r.actual_order});
            }
        }
        if (ok)
            ++st.matches;
        if (keep_rows)
            st.rows.insert(st.rows.end(), s.rows.begin(), s.rows.end());
    }
    return st;
}

inline void write_beckmann_csv(std::ostream &os, const std::vector<BeckmannRow> &rows)
{
    os << "t0,prime,orbit,I_p,predicted_order,actual_ramified\n";
    for (auto &r : rows)
        os << r.t0.to_string() << "," << r.p.get_str() << "," << r.orbit << "," << r.I << "," << r.predicted_order
           << "," << (r.actual_ramified ? "true" : "false") << "\n";
}

} // namespace speclab
