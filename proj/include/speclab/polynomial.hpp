#pragma once

#include "speclab/exactmath.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace speclab {

/// Dense univariate polynomial over Z, c[i] is the coefficient of T^i.
class IntPolynomial
{
  public:
    IntPolynomial() = default;
    explicit IntPolynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }
    IntPolynomial(std::initializer_list<long> coeffs)
    {
        for (long v : coeffs)
            c_.emplace_back(v);
        trim();
    }

    static IntPolynomial constant(const BigInt &a) { return IntPolynomial(std::vector<BigInt>{a}); }
    static IntPolynomial monomial(const BigInt &a, int k)
    {
        std::vector<BigInt> v(size_t(k) + 1, BigInt(0));
        v[k] = a;
        return IntPolynomial(std::move(v));
    }
    static IntPolynomial x() { return monomial(1, 1); }

    int degree() const { return int(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<BigInt> &coeffs() const { return c_; }
    BigInt coeff(int i) const { return (i >= 0 && i < int(c_.size())) ? c_[i] : BigInt(0); }
    const BigInt &lc() const { return c_.back(); }
    void set_coeff(int i, const BigInt &a)
    {
        if (i >= int(c_.size()))
            c_.resize(size_t(i) + 1, BigInt(0));
        c_[i] = a;
        trim();
    }

    BigInt eval(const BigInt &t) const
    {
        BigInt r = 0;
        for (int i = degree(); i >= 0; --i)
            r = r * t + c_[i];
        return r;
    }
    BigRat eval(const BigRat &t) const
    {
        BigRat r = 0;
        for (int i = degree(); i >= 0; --i)
            r = r * t + c_[i];
        return r;
    }

    IntPolynomial derivative() const
    {
        std::vector<BigInt> d;
        for (int i = 1; i <= degree(); ++i)
            d.push_back(c_[i] * i);
        return IntPolynomial(std::move(d));
    }

    IntPolynomial operator-() const
    {
        IntPolynomial r = *this;
        for (auto &a : r.c_)
            a = -a;
        return r;
    }
    IntPolynomial &operator+=(const IntPolynomial &o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size(), BigInt(0));
        for (size_t i = 0; i < o.c_.size(); ++i)
            c_[i] += o.c_[i];
        trim();
        return *this;
    }
    IntPolynomial &operator-=(const IntPolynomial &o)
    {
        if (o.c_.size() > c_.size())
            c_.resize(o.c_.size(), BigInt(0));
        for (size_t i = 0; i < o.c_.size(); ++i)
            c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    friend IntPolynomial operator+(IntPolynomial a, const IntPolynomial &b) { return a += b; }
    friend IntPolynomial operator-(IntPolynomial a, const IntPolynomial &b) { return a -= b; }
    friend IntPolynomial operator*(const IntPolynomial &a, const IntPolynomial &b)
    {
        if (a.is_zero() || b.is_zero())
            return {};
        std::vector<BigInt> r(a.c_.size() + b.c_.size() - 1, BigInt(0));
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0)
                continue;
            for (size_t j = 0; j < b.c_.size(); ++j)
                r[i + j] += a.c_[i] * b.c_[j];
        }
        return IntPolynomial(std::move(r));
    }
    friend IntPolynomial operator*(const BigInt &s, IntPolynomial a)
    {
        for (auto &x : a.c_)
            x *= s;
        a.trim();
        return a;
    }
    friend bool operator==(const IntPolynomial &a, const IntPolynomial &b) { return a.c_ == b.c_; }
    friend bool operator!=(const IntPolynomial &a, const IntPolynomial &b) { return !(a == b); }
    friend bool operator<(const IntPolynomial &a, const IntPolynomial &b)
    {
        if (a.degree() != b.degree())
            return a.degree() < b.degree();
        for (int i = a.degree(); i >= 0; --i)
            if (a.c_[i] != b.c_[i])
                return a.c_[i] < b.c_[i];
        return false;
    }

    std::string to_string(char var = 'T') const;

  private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
    }
    std::vector<BigInt> c_;
};

inline IntPolynomial pow(const IntPolynomial &a, int e)
{
    IntPolynomial r = IntPolynomial::constant(1);
    for (int i = 0; i < e; ++i)
        r = r * a;
    return r;
}

inline std::string IntPolynomial::to_string(char var) const
{
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const BigInt &a = c_[i];
        if (a == 0)
            continue;
        BigInt m = abs(a);
        if (a < 0)
            os << "-";
        else if (!first)
            os << "+";
        first = false;
        if (i == 0) {
            os << m.get_str();
            continue;
        }
        if (m != 1)
            os << m.get_str() << "*";
        os << var;
        if (i > 1)
            os << "^" << i;
    }
    return os.str();
}

/// Positive gcd of the coefficients; 0 for the zero polynomial.
inline BigInt content(const IntPolynomial &p)
{
    BigInt g = 0;
    for (const auto &a : p.coeffs())
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
    return g;
}

/// p / content with positive leading coefficient.
inline IntPolynomial primitive_part(const IntPolynomial &p)
{
    if (p.is_zero())
        return p;
    BigInt g = content(p);
    if (p.lc() < 0)
        g = -g;
    std::vector<BigInt> v = p.coeffs();
    for (auto &a : v)
        mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    return IntPolynomial(std::move(v));
}

/// Quotient when b divides a in Z[T], nullopt otherwise.
inline std::optional<IntPolynomial> divide_exact(const IntPolynomial &a, const IntPolynomial &b)
{
    if (b.is_zero())
        throw std::domain_error("division by zero polynomial");
    if (a.is_zero())
        return IntPolynomial{};
    if (a.degree() < b.degree())
        return std::nullopt;
    std::vector<BigInt> r = a.coeffs();
    const int db = b.degree();
    std::vector<BigInt> q(size_t(a.degree() - db) + 1, BigInt(0));
    const BigInt &lb = b.lc();
    for (int i = a.degree(); i >= db; --i) {
        if (r[i] == 0)
            continue;
        if (!mpz_divisible_p(r[i].get_mpz_t(), lb.get_mpz_t()))
            return std::nullopt;
        BigInt f;
        mpz_divexact(f.get_mpz_t(), r[i].get_mpz_t(), lb.get_mpz_t());
        q[i - db] = f;
        for (int j = 0; j <= db; ++j)
            r[i - db + j] -= f * b.coeff(j);
    }
    for (int i = 0; i < db; ++i)
        if (r[i] != 0)
            return std::nullopt;
    return IntPolynomial(std::move(q));
}

inline IntPolynomial exact_div(const IntPolynomial &a, const IntPolynomial &b)
{
    auto q = divide_exact(a, b);
    if (!q)
        throw std::logic_error("inexact polynomial division");
    return *q;
}

/// Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b.
inline IntPolynomial pseudo_rem(const IntPolynomial &a, const IntPolynomial &b)
{
    if (b.is_zero())
        throw std::domain_error("division by zero polynomial");
    if (a.degree() < b.degree())
        return a;
    std::vector<BigInt> r = a.coeffs();
    const int db = b.degree();
    const BigInt &lb = b.lc();
    for (int i = a.degree(); i >= db; --i) {
        BigInt f = r[i];
        for (auto &x : r)
            x *= lb;
        for (int j = 0; j <= db; ++j)
            r[i - db + j] -= f * b.coeff(j);
    }
    r.resize(size_t(db));
    return IntPolynomial(std::move(r));
}

/// Primitive gcd over Q (content 1, positive lc).
inline IntPolynomial gcd(const IntPolynomial &a0, const IntPolynomial &b0)
{
    IntPolynomial a = primitive_part(a0), b = primitive_part(b0);
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    if (a.degree() < b.degree())
        std::swap(a, b);
    while (!b.is_zero()) {
        IntPolynomial r = pseudo_rem(a, b);
        a = b;
        b = primitive_part(r);
    }
    return primitive_part(a);
}

/// p(a + b*s) as a polynomial in s.
inline IntPolynomial compose_linear(const IntPolynomial &p, const BigInt &a, const BigInt &b)
{
    IntPolynomial lin(std::vector<BigInt>{a, b});
    IntPolynomial r;
    for (int i = p.degree(); i >= 0; --i)
        r = r * lin + IntPolynomial::constant(p.coeff(i));
    return r;
}

/// T^n p(1/T).
inline IntPolynomial reverse(const IntPolynomial &p, int n)
{
    std::vector<BigInt> v(size_t(n) + 1, BigInt(0));
    for (int i = 0; i <= p.degree(); ++i)
        v[n - i] = p.coeff(i);
    return IntPolynomial(std::move(v));
}

namespace detail {

/// Fraction-free determinant; Div(a, b) must return the exact quotient.
template <class R, class Div>
R bareiss_det(std::vector<std::vector<R>> m, const R &one, const R &zero, Div div)
{
    const size_t n = m.size();
    if (n == 0)
        return one;
    R prev = one;
    bool neg = false;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == zero) {
            size_t s = k + 1;
            while (s < n && m[s][k] == zero)
                ++s;
            if (s == n)
                return zero;
            std::swap(m[k], m[s]);
            neg = !neg;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j)
                m[i][j] = div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
        }
        prev = m[k][k];
    }
    R d = m[n - 1][n - 1];
    if (neg)
        d = zero - d;
    return d;
}

template <class R>
std::vector<std::vector<R>> sylvester(const std::vector<R> &a, const std::vector<R> &b, const R &zero)
{
    // a, b coefficient lists low -> high
    const int m = int(a.size()) - 1, n = int(b.size()) - 1;
    std::vector<std::vector<R>> s(size_t(m + n), std::vector<R>(size_t(m + n), zero));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= m; ++j)
            s[i][i + j] = a[m - j];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= n; ++j)
            s[n + i][i + j] = b[n - j];
    return s;
}

} // namespace detail

inline BigInt resultant(const IntPolynomial &a, const IntPolynomial &b)
{
    if (a.is_zero() || b.is_zero())
        return 0;
    if (a.degree() == 0 && b.degree() == 0)
        return 1;
    auto s = detail::sylvester(a.coeffs(), b.coeffs(), BigInt(0));
    return detail::bareiss_det(std::move(s), BigInt(1), BigInt(0), [](const BigInt &x, const BigInt &y) {
        BigInt q;
        mpz_divexact(q.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        return q;
    });
}

/// disc(p) = (-1)^(n(n-1)/2) Res(p, p') / lc(p).
inline BigInt discriminant(const IntPolynomial &p)
{
    const int n = p.degree();
    if (n < 1)
        throw std::domain_error("discriminant of a constant");
    if (n == 1)
        return 1;
    BigInt r = resultant(p, p.derivative());
    BigInt q;
    mpz_divexact(q.get_mpz_t(), r.get_mpz_t(), p.lc().get_mpz_t());
    if ((n * (n - 1) / 2) % 2)
        q = -q;
    return q;
}

/// Bivariate polynomial in T and Y, stored as coefficients of Y^j in Z[T].
struct BiPolynomial {
    std::vector<IntPolynomial> y;

    int degree_y() const
    {
        int d = int(y.size()) - 1;
        while (d >= 0 && y[d].is_zero())
            --d;
        return d;
    }
    int degree_t() const
    {
        int d = -1;
        for (auto &c : y)
            d = std::max(d, c.degree());
        return d;
    }
    bool monic_y() const
    {
        int d = degree_y();
        return d >= 0 && y[d] == IntPolynomial::constant(1);
    }
    IntPolynomial coeff(int j) const { return j < int(y.size()) ? y[j] : IntPolynomial{}; }
    BiPolynomial derivative_y() const
    {
        BiPolynomial r;
        for (int j = 1; j < int(y.size()); ++j)
            r.y.push_back(BigInt(j) * y[j]);
        return r;
    }
    /// Specialization at T = t, a polynomial in Y with rational coefficients.
    std::vector<BigRat> at(const BigRat &t) const
    {
        std::vector<BigRat> out;
        for (int j = 0; j <= degree_y(); ++j)
            out.push_back(y[j].eval(t));
        return out;
    }
    std::string to_string() const;
};

inline std::string BiPolynomial::to_string() const
{
    std::ostringstream os;
    bool first = true;
    for (int j = degree_y(); j >= 0; --j) {
        const IntPolynomial &c = y[j];
        for (int i = c.degree(); i >= 0; --i) {
            BigInt a = c.coeff(i);
            if (a == 0)
                continue;
            if (a < 0)
                os << "-";
            else if (!first)
                os << "+";
            first = false;
            BigInt m = abs(a);
            bool unit = (i > 0 || j > 0);
            if (m != 1 || !unit) {
                os << m.get_str();
                if (unit)
                    os << "*";
            }
            if (i > 0) {
                os << "T";
                if (i > 1)
                    os << "^" << i;
                if (j > 0)
                    os << "*";
            }
            if (j > 0) {
                os << "Y";
                if (j > 1)
                    os << "^" << j;
            }
        }
    }
    return first ? "0" : os.str();
}

/// Discriminant with respect to Y of a polynomial monic in Y.
inline IntPolynomial discriminant_y(const BiPolynomial &p)
{
    const int n = p.degree_y();
    if (n < 2)
        throw std::domain_error("discriminant needs Y-degree >= 2");
    if (!p.monic_y())
        throw std::domain_error("discriminant_y needs a polynomial monic in Y");
    std::vector<IntPolynomial> a(p.y.begin(), p.y.begin() + n + 1);
    BiPolynomial dp = p.derivative_y();
    std::vector<IntPolynomial> b(dp.y.begin(), dp.y.begin() + n);
    auto s = detail::sylvester(a, b, IntPolynomial{});
    IntPolynomial r = detail::bareiss_det(std::move(s), IntPolynomial::constant(1), IntPolynomial{},
                                          [](const IntPolynomial &x, const IntPolynomial &y) { return exact_div(x, y); });
    if ((n * (n - 1) / 2) % 2)
        r = -r;
    return r;
}

/// Homogeneous form sum c[i] U^i V^(d-i).
struct HomogPolynomial {
    int d = 0;
    std::vector<BigInt> c;

    static HomogPolynomial from(const IntPolynomial &p, int deg)
    {
        if (p.degree() > deg)
            throw std::invalid_argument("homogenization degree below polynomial degree");
        HomogPolynomial h;
        h.d = deg;
        h.c.assign(size_t(deg) + 1, BigInt(0));
        for (int i = 0; i <= p.degree(); ++i)
            h.c[i] = p.coeff(i);
        return h;
    }
    static HomogPolynomial infinity()
    {
        HomogPolynomial h;
        h.d = 1;
        h.c = {BigInt(1), BigInt(0)};
        return h;
    }
    bool is_infinity() const { return d == 1 && c[0] == 1 && c[1] == 0; }

    BigInt eval(const BigInt &u, const BigInt &v) const
    {
        BigInt r = 0;
        std::vector<BigInt> vpow(size_t(d) + 1);
        vpow[0] = 1;
        for (int i = 1; i <= d; ++i)
            vpow[i] = vpow[i - 1] * v;
        BigInt up = 1;
        for (int i = 0; i <= d; ++i) {
            if (c[i] != 0)
                r += c[i] * up * vpow[d - i];
            up *= u;
        }
        return r;
    }
    /// Coefficient of the nonzero monomial with the largest U-power.
    BigInt lead_u() const
    {
        for (int i = d; i >= 0; --i)
            if (c[i] != 0)
                return c[i];
        return 0;
    }
    /// Coefficient of the nonzero monomial with the largest V-power.
    BigInt lead_v() const
    {
        for (int i = 0; i <= d; ++i)
            if (c[i] != 0)
                return c[i];
        return 0;
    }
    /// Dehomogenized polynomial P(T, 1).
    IntPolynomial dehomogenize() const { return IntPolynomial(c); }

    std::string to_string() const
    {
        std::ostringstream os;
        bool first = true;
        for (int i = d; i >= 0; --i) {
            if (c[i] == 0)
                continue;
            BigInt m = abs(c[i]);
            if (c[i] < 0)
                os << "-";
            else if (!first)
                os << "+";
            first = false;
            if (m != 1 || d == 0)
                os << m.get_str() << (d > 0 ? "*" : "");
            std::string mono;
            if (i > 0)
                mono += "U" + (i > 1 ? "^" + std::to_string(i) : std::string());
            if (d - i > 0)
                mono += std::string(i > 0 ? "*" : "") + "V" + (d - i > 1 ? "^" + std::to_string(d - i) : std::string());
            os << mono;
        }
        return first ? "0" : os.str();
    }
    friend bool operator==(const HomogPolynomial &a, const HomogPolynomial &b) { return a.d == b.d && a.c == b.c; }
};

/// Point [u:v] of P^1(Q) with coprime integer coordinates.
struct ProjectivePoint {
    BigInt u = 1, v = 0;

    static ProjectivePoint make(BigInt u, BigInt v)
    {
        if (u == 0 && v == 0)
            throw std::invalid_argument("[0:0] is not a projective point");
        BigInt g;
        mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t());
        u /= g;
        v /= g;
        if (v < 0 || (v == 0 && u < 0)) {
            u = -u;
            v = -v;
        }
        return {u, v};
    }
    static ProjectivePoint from(const BigRat &t) { return make(t.get_num(), t.get_den()); }
    static ProjectivePoint infinity() { return {1, 0}; }
    bool is_infinity() const { return v == 0; }
    BigRat rational() const
    {
        if (v == 0)
            throw std::domain_error("infinity has no affine coordinate");
        BigRat r(u, v);
        r.canonicalize();
        return r;
    }
    /// "u/v", "1/0" for infinity.
    std::string to_string() const { return u.get_str() + "/" + v.get_str(); }
    /// Accepts "inf", "u/v", "u", "[u:v]".
    static ProjectivePoint parse(std::string s)
    {
        std::string t;
        for (char ch : s)
            if (!std::isspace(static_cast<unsigned char>(ch)))
                t += ch;
        if (t == "inf" || t == "oo" || t == "infinity" || t == "∞")
            return infinity();
        try {
            if (!t.empty() && t.front() == '[' && t.back() == ']') {
                auto colon = t.find(':');
                if (colon == std::string::npos)
                    throw std::invalid_argument("bad point");
                return make(BigInt(t.substr(1, colon - 1)), BigInt(t.substr(colon + 1, t.size() - colon - 2)));
            }
            auto slash = t.find('/');
            if (slash == std::string::npos)
                return make(BigInt(t), 1);
            return make(BigInt(t.substr(0, slash)), BigInt(t.substr(slash + 1)));
        } catch (const std::invalid_argument &) {
            throw std::invalid_argument("malformed point: " + s);
        }
    }
    friend bool operator==(const ProjectivePoint &a, const ProjectivePoint &b) { return a.u == b.u && a.v == b.v; }
};

inline BigInt eval_proj(const HomogPolynomial &p, const ProjectivePoint &t0) { return p.eval(t0.u, t0.v); }

namespace detail {

/// Parses a sparse sum of monomials c*T^a*Y^b into a map (a, b) -> c.
inline std::map<std::pair<int, int>, BigInt> parse_monomials(const std::string &text, bool allow_y)
{
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s += ch;
    if (s.empty())
        throw std::invalid_argument("malformed polynomial: empty text");
    auto fail = [&](const std::string &why) { throw std::invalid_argument("malformed polynomial '" + text + "': " + why); };
    std::map<std::pair<int, int>, BigInt> out;
    size_t i = 0;
    auto read_int = [&]() {
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
            ++j;
        if (j == i)
            fail("expected a number");
        std::string num = s.substr(i, j - i);
        i = j;
        return num;
    };
    bool first = true;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        } else if (!first) {
            fail("expected + or -");
        }
        first = false;
        BigInt coef = sign;
        int a = 0, b = 0;
        bool any = false;
        while (true) {
            if (i >= s.size())
                break;
            char ch = s[i];
            if (std::isdigit(static_cast<unsigned char>(ch))) {
                coef *= BigInt(read_int());
            } else if (ch == 'T' || ch == 't' || ((ch == 'Y' || ch == 'y') && allow_y)) {
                bool isy = (ch == 'Y' || ch == 'y');
                ++i;
                int e = 1;
                if (i < s.size() && s[i] == '^') {
                    ++i;
                    std::string num = read_int();
                    if (num.size() > 3)
                        fail("exponent too large");
                    e = std::stoi(num);
                }
                (isy ? b : a) += e;
            } else {
                fail(std::string("unexpected character '") + ch + "'");
            }
            any = true;
            if (i < s.size() && s[i] == '*') {
                ++i;
                if (i >= s.size())
                    fail("dangling '*'");
                continue;
            }
            if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || std::isalpha(static_cast<unsigned char>(s[i]))))
                continue;
            break;
        }
        if (!any)
            fail("empty term");
        out[{a, b}] += coef;
    }
    return out;
}

} // namespace detail

/// Parses text such as "3*T^4 - 2*T + 1" into an IntPolynomial.
inline IntPolynomial parse_polynomial(const std::string &text)
{
    auto mons = detail::parse_monomials(text, false);
    IntPolynomial p;
    for (auto &[ab, c] : mons)
        p.set_coeff(ab.first, p.coeff(ab.first) + c);
    return p;
}

/// Parses text in T and Y such as "Y^3+T*Y+T".
inline BiPolynomial parse_bivariate(const std::string &text)
{
    auto mons = detail::parse_monomials(text, true);
    BiPolynomial p;
    for (auto &[ab, c] : mons) {
        auto [a, b] = ab;
        if (b >= int(p.y.size()))
            p.y.resize(size_t(b) + 1);
        p.y[b].set_coeff(a, p.y[b].coeff(a) + c);
    }
    return p;
}

inline bool mentions_y(const std::string &text)
{
    return text.find('Y') != std::string::npos || text.find('y') != std::string::npos;
}

} // namespace speclab
