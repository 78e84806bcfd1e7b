#pragma once

#include "speclab/bounds.hpp"
#include "speclab/census.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace speclab::cli {

inline constexpr const char *kVersion = "speclab 1.0.0";

struct OptSpec {
    std::string name;
    std::string help;
    std::string def; ///< empty: required
};

using Params = std::map<std::string, std::string>;

struct Outcome {
    std::string body;    ///< written to --out or stdout
    std::string summary; ///< one line on stderr
    bool unknowns = false;
};

inline const std::map<std::string, std::pair<std::string, std::vector<OptSpec>>> &commands()
{
    static const std::map<std::string, std::pair<std::string, std::vector<OptSpec>>> cmds = {
        {"specialize",
         {"specialization report of a quadratic (T only) or cubic (with Y) cover at t0; JSON {cover,t0,group,m,dK,dF,ramified}",
          {{"cover", "polynomial in T, or monic cubic in Y over Z[T]", ""}, {"t0", "rational point, e.g. 3, 1/3, inf", ""}}}},
        {"beckmann",
         {"ramification prediction vs actual data on random t0; JSON summary, or CSV t0,prime,orbit,I_p,predicted_order,actual_ramified with --format rows",
          {{"cover", "cover polynomial", ""},
           {"samples", "number of random t0", "1000"},
           {"height", "height bound for t0", "1000"},
           {"format", "summary or rows", "summary"}}}},
        {"twist-scan",
         {"admissible primes for a quadratic cover; JSON {m0,S,S1,twists:[{p,d,verified}]}",
          {{"cover", "even-degree polynomial without rational roots", ""},
           {"t0", "base point (default: first small integer with a nontrivial field)", "auto"},
           {"bound", "prime bound", "10000"},
           {"orbit", "branch orbit index", "0"}}}},
        {"local",
         {"local solubility of y^n = d*P at one place or all places; JSON {curve,status,places:[{place,status,method,witness,depth_cap}]}",
          {{"n", "exponent", "2"},
           {"poly", "polynomial in T", ""},
           {"d", "twist parameter", "1"},
           {"p", "prime, inf, or all", "all"},
           {"depth", "depth cap (-1 for the default bound)", "-1"}}}},
        {"certify",
         {"no-point certificate for y^n = d*P; JSON {curve,certificate:{p,v_d}|null}",
          {{"n", "exponent", "2"}, {"poly", "polynomial in T", ""}, {"d", "twist parameter", ""}}}},
        {"hasse-scan",
         {"everywhere locally soluble twists without points up to the height bound; JSON {candidates:[{d,admissible,height}]}",
          {{"cover", "degree >= 8 even polynomial without rational roots", ""},
           {"x", "bound on |d|", "1000"},
           {"height", "search height", "10000"}}}},
        {"density",
         {"twist density series over quadratic fields; CSV x,numerator,denominator,unknowns,lower,upper",
          {{"cover", "quadratic cover polynomial", ""},
           {"grid", "increasing x values", "1000,2000,5000,10000"},
           {"heights", "search height schedule", "10,100,1000"}}}},
        {"s3-survey",
         {"S3 predicate proportions over random monic cubics; JSON {flags:[{name,hits,proportion,radius}]}",
          {{"degree", "T-degree bound D", "1"}, {"height", "coefficient bound H", "20"}, {"samples", "sample size", "10000"}}}},
        {"exponent",
         {"exponent table; CSV r,e,alpha,beta,genus,eq1,eq1_cases,eq2,eq2_cases",
          {{"order", "group order", ""}, {"indices", "ramification indices, comma separated", ""}, {"q", "central prime for beta (default: least prime)", "0"}}}},
        {"census",
         {"exact polynomial set counts (JSON {P,P2,E,r}) or quadratic field census with --fields x",
          {{"n", "exponent", "2"}, {"degree", "degree N", "2"}, {"height", "height bound", "3"}, {"fields", "field census bound (0: off)", "0"}}}},
        {"lgratio",
         {"global vs everywhere-local twist counts; CSV x,denominator,global,global_unknown,local,local_unknown,ratio_lower,ratio_upper",
          {{"cover", "quadratic cover polynomial", ""}, {"grid", "increasing x values", "100,1000,10000"}, {"height", "search height", "1000"}}}},
    };
    return cmds;
}

inline std::vector<int64_t> parse_list(const std::string &s)
{
    std::vector<int64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty())
            out.push_back(std::stoll(tok));
    return out;
}

inline int64_t as_int(const Params &p, const std::string &k)
{
    try {
        size_t pos = 0;
        long long v = std::stoll(p.at(k), &pos);
        if (pos != p.at(k).size())
            throw std::invalid_argument(k);
        return v;
    } catch (const std::logic_error &) {
        throw std::invalid_argument("--" + k + " expects an integer");
    }
}

inline BigInt as_big(const Params &p, const std::string &k)
{
    BigInt v;
    if (v.set_str(p.at(k), 10) != 0)
        throw std::invalid_argument("--" + k + " expects an integer");
    return v;
}

inline bool is_cubic_text(const std::string &s) { return s.find('Y') != std::string::npos || s.find('y') != std::string::npos; }

inline nlohmann::json places_json(const std::vector<LocalResult> &log)
{
    auto arr = nlohmann::json::array();
    for (auto &l : log)
        arr.push_back({{"place", l.place},
                       {"status", to_string(l.status)},
                       {"method", l.method},
                       {"witness", l.witness},
                       {"depth_cap", l.depth_cap}});
    return arr;
}

inline std::string dump(const nlohmann::json &j) { return j.dump(2) + "\n"; }

inline Outcome cmd_specialize(const Params &p)
{
    ProjectivePoint t0 = ProjectivePoint::parse(p.at("t0"));
    SpecializationReport rep;
    if (is_cubic_text(p.at("cover")))
        rep = specialize(cubic_cover(p.at("cover")), t0);
    else
        rep = specialize(quad_cover(parse_polynomial(p.at("cover"))), t0);
    nlohmann::json j = to_json(rep);
    j["cover"] = p.at("cover");
    return {dump(j), "specialize: group=" + rep.group + " m=" + rep.m.get_str() + " dF=" + rep.dF.get_str(), false};
}

template <class Cover>
Outcome beckmann_run(const Cover &c, const Params &p, uint64_t seed, unsigned jobs)
{
    const bool rows = p.at("format") == "rows";
    if (!rows && p.at("format") != "summary")
        throw std::invalid_argument("--format must be summary or rows");
    auto st = consistency_check(c, size_t(as_int(p, "samples")), as_int(p, "height"), seed, jobs, rows);
    std::string summary = "beckmann: checked=" + std::to_string(st.checked) + " mismatches=" +
                          std::to_string(st.mismatches.size()) + " skipped=" + std::to_string(st.skipped_branch);
    if (rows) {
        std::ostringstream os;
        write_beckmann_csv(os, st.rows);
        return {os.str(), summary, false};
    }
    nlohmann::json j;
    j["cover"] = p.at("cover");
    j["samples"] = as_int(p, "samples");
    j["height"] = as_int(p, "height");
    j["seed"] = seed;
    j["checked"] = st.checked;
    j["matches"] = st.matches;
    j["skipped_branch"] = st.skipped_branch;
    j["uniqueness_violations"] = st.uniqueness_violations;
    j["bound_violations"] = st.bound_violations;
    auto mm = nlohmann::json::array();
    for (auto &m : st.mismatches)
        mm.push_back({{"t0", m.t0.to_string()}, {"p", m.p.get_str()}, {"predicted", m.predicted}, {"actual", m.actual}});
    j["mismatches"] = mm;
    auto sup = nlohmann::json::array();
    for (auto &q : exceptional_superset(c))
        sup.push_back(q.get_str());
    j["superset"] = sup;
    return {dump(j), summary, false};
}

inline Outcome cmd_beckmann(const Params &p, uint64_t seed, unsigned jobs)
{
    if (is_cubic_text(p.at("cover")))
        return beckmann_run(cubic_cover(p.at("cover")), p, seed, jobs);
    return beckmann_run(quad_cover(parse_polynomial(p.at("cover"))), p, seed, jobs);
}

inline Outcome cmd_twist_scan(const Params &p)
{
    QuadraticCover cov = quad_cover(parse_polynomial(p.at("cover")));
    ProjectivePoint t0 = p.at("t0") == "auto" ? first_nontrivial_point(cov) : ProjectivePoint::parse(p.at("t0"));
    auto sc = admissible_prime_scan(cov, t0, uint64_t(as_int(p, "bound")), size_t(as_int(p, "orbit")));
    nlohmann::json j;
    j["cover"] = p.at("cover");
    j["t0"] = t0.to_string();
    j["m0"] = sc.m0.get_str();
    auto S = nlohmann::json::array(), S1 = nlohmann::json::array(), tw = nlohmann::json::array();
    for (auto &l : sc.S)
        S.push_back(l.get_str());
    for (auto &l : sc.S1)
        S1.push_back(l.get_str());
    bool unk = false;
    for (auto &t : sc.twists) {
        tw.push_back({{"p", t.p}, {"d", t.d.get_str()}, {"verified", to_string(t.verified)}});
        unk = unk || t.verified == Solubility::Unknown;
    }
    j["S"] = S;
    j["S1"] = S1;
    j["twists"] = tw;
    return {dump(j), "twist-scan: m0=" + sc.m0.get_str() + " twists=" + std::to_string(sc.twists.size()), unk};
}

inline Outcome cmd_local(const Params &p)
{
    SuperellipticCurve c = build_curve(int(as_int(p, "n")), parse_polynomial(p.at("poly")));
    TwistedCurve tc = make_twist(c, as_big(p, "d"));
    std::vector<LocalResult> log;
    Solubility st;
    const std::string &pl = p.at("p");
    if (pl == "all") {
        ELSResult r = everywhere_locally_soluble(tc);
        log = r.log;
        st = r.status;
    } else if (pl == "inf") {
        log.push_back(local_solubility_real(tc));
        st = log.back().status;
    } else {
        log.push_back(local_solubility(tc, as_big(p, "p"), int(as_int(p, "depth"))));
        st = log.back().status;
    }
    nlohmann::json j;
    j["curve"] = tc.to_string();
    j["status"] = to_string(st);
    j["places"] = places_json(log);
    return {dump(j), "local: " + to_string(st) + " over " + std::to_string(log.size()) + " places",
            st == Solubility::Unknown};
}

inline Outcome cmd_certify(const Params &p)
{
    SuperellipticCurve c = build_curve(int(as_int(p, "n")), parse_polynomial(p.at("poly")));
    TwistedCurve tc = make_twist(c, as_big(p, "d"));
    auto cert = obstruction_certificate(tc);
    nlohmann::json j;
    j["curve"] = tc.to_string();
    if (cert)
        j["certificate"] = {{"p", cert->p.get_str()}, {"v_d", cert->v_d}};
    else
        j["certificate"] = nullptr;
    return {dump(j), std::string("certify: ") + (cert ? "p=" + cert->p.get_str() : "none"), false};
}

inline Outcome cmd_hasse_scan(const Params &p, unsigned jobs)
{
    QuadraticCover cov = quad_cover(parse_polynomial(p.at("cover")));
    auto cands = hasse_failure_candidates(cov, as_int(p, "x"), as_int(p, "height"), jobs);
    nlohmann::json j;
    j["cover"] = p.at("cover");
    j["x"] = as_int(p, "x");
    j["height"] = as_int(p, "height");
    j["note"] = "candidates are height-bounded searches, not proofs of global insolubility";
    auto arr = nlohmann::json::array();
    size_t adm = 0;
    for (auto &c : cands) {
        arr.push_back({{"d", c.d.get_str()}, {"admissible", c.admissible}, {"height", c.height}});
        adm += c.admissible;
    }
    j["candidates"] = arr;
    return {dump(j),
            "hasse-scan: candidates=" + std::to_string(cands.size()) + " admissible=" + std::to_string(adm), false};
}

inline Outcome cmd_density(const Params &p, unsigned jobs)
{
    QuadraticCover cov = quad_cover(parse_polynomial(p.at("cover")));
    auto s = twist_density_series(cov, parse_list(p.at("grid")), parse_list(p.at("heights")), jobs);
    std::ostringstream os;
    write_series_csv(os, s);
    std::string summary = "density: points=" + std::to_string(s.size());
    try {
        auto f = fit_log_exponent(s);
        std::ostringstream fs;
        fs << std::setprecision(6) << " alpha=" << f.alpha << " residual=" << f.residual;
        summary += fs.str();
    } catch (const std::exception &) {
        summary += " alpha=n/a";
    }
    bool unk = !s.unknowns.empty() && s.unknowns.back() > 0;
    return {os.str(), summary, unk};
}

inline Outcome cmd_s3_survey(const Params &p, uint64_t seed, unsigned jobs)
{
    auto sv = s3_survey(int(as_int(p, "degree")), as_int(p, "height"), uint64_t(as_int(p, "samples")), seed, jobs);
    nlohmann::json j;
    j["D"] = sv.D;
    j["H"] = sv.H;
    j["seed"] = sv.seed;
    j["samples"] = sv.samples;
    j["exhaustive"] = sv.exhaustive;
    auto arr = nlohmann::json::array();
    for (auto &f : sv.flags)
        arr.push_back({{"name", f.name}, {"hits", f.hits}, {"proportion", f.proportion}, {"radius", f.radius}});
    j["flags"] = arr;
    std::ostringstream s;
    s << "s3-survey: all=" << sv.flag("all").proportion << " samples=" << sv.samples;
    return {dump(j), s.str(), false};
}

inline Outcome cmd_exponent(const Params &p)
{
    int64_t order = as_int(p, "order");
    if (order < 2)
        throw std::invalid_argument("--order must be >= 2");
    RamificationType rt;
    for (auto x : parse_list(p.at("indices")))
        rt.e.push_back(int(x));
    GroupDescriptor G = make_group(uint64_t(order));
    uint64_t q = uint64_t(as_int(p, "q"));
    if (q == 0)
        q = G.least_prime;
    auto eq1 = condition_eq1(rt);
    auto eq2 = condition_eq2(rt, G);
    auto join = [](const std::vector<std::string> &v) {
        std::string s;
        for (auto &x : v)
            s += (s.empty() ? "" : ";") + x;
        return s;
    };
    std::string e = eq2.e ? to_string(*eq2.e) : "undefined";
    std::string genus;
    try {
        genus = std::to_string(rh_genus(uint64_t(order), rt));
    } catch (const std::domain_error &) {
        genus = "inconsistent";
    }
    std::ostringstream os;
    os << "r,e,alpha,beta,genus,eq1,eq1_cases,eq2,eq2_cases\n";
    os << rt.r() << "," << e << "," << to_string(malle_alpha(G)) << "," << to_string(beta_exponent(q, G.order).beta)
       << "," << genus << "," << (eq1.holds ? "true" : "false") << "," << join(eq1.cases) << ","
       << (eq2.holds ? "true" : "false") << "," << join(eq2.cases) << "\n";
    return {os.str(), "exponent: e=" + e + " alpha=" + to_string(malle_alpha(G)) + " g=" + genus, false};
}

inline Outcome cmd_census(const Params &p)
{
    nlohmann::json j;
    int64_t fx = as_int(p, "fields");
    if (fx > 0) {
        auto ds = quad_field_census(fx);
        j["x"] = fx;
        j["count"] = ds.size();
        if (ds.size() <= 10000)
            j["discriminants"] = ds;
        return {dump(j), "census: fields=" + std::to_string(ds.size()), false};
    }
    auto c = count_poly_sets(int(as_int(p, "n")), int(as_int(p, "degree")), as_int(p, "height"));
    j["n"] = c.n;
    j["N"] = c.N;
    j["H"] = c.H;
    j["P"] = c.P;
    j["P2"] = c.P2;
    j["r"] = c.r;
    if (c.E)
        j["E"] = *c.E;
    else
        j["E"] = nullptr;
    return {dump(j), "census: P=" + std::to_string(c.P) + " P2=" + std::to_string(c.P2), false};
}

inline Outcome cmd_lgratio(const Params &p, unsigned jobs)
{
    QuadraticCover cov = quad_cover(parse_polynomial(p.at("cover")));
    auto r = local_global_ratio_series(cov, parse_list(p.at("grid")), as_int(p, "height"), jobs);
    std::ostringstream os;
    os << "x,denominator,global,global_unknown,local,local_unknown,ratio_lower,ratio_upper\n";
    char buf[64];
    for (size_t i = 0; i < r.global.size(); ++i) {
        uint64_t g = r.global.numerator[i], gu = r.global.unknowns[i], l = r.local.numerator[i],
                 lu = r.local.unknowns[i];
        double lo = (l + lu) ? double(g) / double(l + lu) : 0.0;
        double hi = l ? double(g + gu) / double(l) : 0.0;
        std::snprintf(buf, sizeof buf, "%.8f,%.8f", lo, hi);
        os << r.global.x[i] << "," << r.global.denominator[i] << "," << g << "," << gu << "," << l << "," << lu << ","
           << buf << "\n";
    }
    bool unk = !r.global.size() ? false : (r.global.unknowns.back() + r.local.unknowns.back()) > 0;
    return {os.str(), "lgratio: points=" + std::to_string(r.global.size()), unk};
}

inline Outcome dispatch(const std::string &sub, const Params &p, uint64_t seed, unsigned jobs)
{
    if (sub == "specialize")
        return cmd_specialize(p);
    if (sub == "beckmann")
        return cmd_beckmann(p, seed, jobs);
    if (sub == "twist-scan")
        return cmd_twist_scan(p);
    if (sub == "local")
        return cmd_local(p);
    if (sub == "certify")
        return cmd_certify(p);
    if (sub == "hasse-scan")
        return cmd_hasse_scan(p, jobs);
    if (sub == "density")
        return cmd_density(p, jobs);
    if (sub == "s3-survey")
        return cmd_s3_survey(p, seed, jobs);
    if (sub == "exponent")
        return cmd_exponent(p);
    if (sub == "census")
        return cmd_census(p);
    if (sub == "lgratio")
        return cmd_lgratio(p, jobs);
    throw std::invalid_argument("unknown subcommand " + sub);
}

inline std::string utc_now()
{
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Flat key = value lines; '#' starts a comment.
inline Params read_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot read config " + path);
    Params out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument("config line without '=': " + line);
            continue;
        }
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

inline void write_text(const std::string &path, const std::string &text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << text;
}

inline uint64_t default_seed()
{
    if (const char *s = std::getenv("SPECLAB_SEED"))
        return std::strtoull(s, nullptr, 10);
    return 0;
}

/// Runs one invocation; returns the exit code (0 ok, 2 unknowns present, 1 usage or error).
inline int run(std::vector<std::string> args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Galois cover specialization laboratory"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path, manifest_path, config_path;
    uint64_t seed = default_seed();
    unsigned jobs = 1;
    app.add_option("--out", out_path, "write the main output to this file");
    app.add_option("--manifest", manifest_path, "write (or, for replay, read) the experiment manifest JSON");
    app.add_option("--config", config_path, "flat key = value file mirroring the flags");
    app.add_option("--seed", seed, "random seed (default: $SPECLAB_SEED or 0)");
    app.add_option("--jobs", jobs, "worker threads; outputs do not depend on it")->check(CLI::PositiveNumber);

    std::map<std::string, Params> values;
    std::map<std::string, CLI::App *> subs;
    for (auto &[name, spec] : commands()) {
        CLI::App *s = app.add_subcommand(name, spec.first);
        subs[name] = s;
        for (auto &o : spec.second) {
            auto *opt = s->add_option("--" + o.name, values[name][o.name], o.help);
            if (o.def.empty())
                opt->required();
            else
                values[name][o.name] = o.def;
            opt->capture_default_str();
        }
    }
    CLI::App *replay = app.add_subcommand("replay", "rerun the invocation recorded in --manifest");
    app.footer("Exit codes: 0 completed, 2 unknowns present, 1 usage or input error.\n"
               "Summary line goes to stderr; outputs are independent of --jobs.");

    // config keys fill in flags not given on the command line
    for (size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") {
            try {
                for (auto &[k, v] : read_config(args[i + 1]))
                    if (std::find(args.begin(), args.end(), "--" + k) == args.end()) {
                        args.push_back("--" + k);
                        args.push_back(v);
                    }
            } catch (const std::exception &e) {
                err << "error: " << e.what() << "\n";
                return 1;
            }
            break;
        }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    std::string sub;
    Params params;
    if (replay->parsed()) {
        if (manifest_path.empty()) {
            err << "error: replay needs --manifest\n";
            return 1;
        }
        std::ifstream in(manifest_path);
        if (!in) {
            err << "error: cannot read manifest " << manifest_path << "\n";
            return 1;
        }
        nlohmann::json m;
        try {
            in >> m;
            sub = m.at("subcommand").get<std::string>();
            for (auto &[k, v] : m.at("params").items())
                params[k] = v.get<std::string>();
            seed = m.at("seed").get<uint64_t>();
            if (out_path.empty() && m.contains("out"))
                out_path = m.at("out").get<std::string>();
        } catch (const std::exception &e) {
            err << "error: malformed manifest: " << e.what() << "\n";
            return 1;
        }
        if (!commands().count(sub)) {
            err << "error: manifest names unknown subcommand " << sub << "\n";
            return 1;
        }
        manifest_path.clear();
    } else {
        for (auto &[name, s] : subs)
            if (s->parsed()) {
                sub = name;
                params = values[name];
            }
    }

    const std::string started = utc_now();
    Outcome oc;
    try {
        oc = dispatch(sub, params, seed, jobs);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        if (out_path.empty())
            out << oc.body;
        else
            write_text(out_path, oc.body);
        if (!manifest_path.empty()) {
            nlohmann::json m;
            m["tool"] = "speclab";
            m["version"] = kVersion;
            m["subcommand"] = sub;
            m["params"] = params;
            m["seed"] = seed;
            m["jobs"] = jobs;
            if (!out_path.empty())
                m["out"] = out_path;
            auto inputs = nlohmann::json::array();
            for (const char *k : {"cover", "poly"})
                if (params.count(k))
                    inputs.push_back(params.at(k));
            m["inputs"] = inputs;
            m["timestamps"] = {{"started", started}, {"finished", utc_now()}};
            write_text(manifest_path, m.dump(2) + "\n");
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << oc.summary << "\n";
    return oc.unknowns ? 2 : 0;
}

} // namespace speclab::cli
