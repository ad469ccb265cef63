#ifndef QUADTWIST_SERIES_HPP
#define QUADTWIST_SERIES_HPP

#include <quadtwist/error.hpp>
#include <quadtwist/quadrature.hpp>
#include <quadtwist/shifts.hpp>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace quadtwist
{

// Magnitude used for residuals; specialized for exact scalars in exact.hpp.
template <typename S>
double scalar_abs(const S &x)
{
    return std::abs(x);
}

// Truncated power series c_0 + c_1 z + ... + c_M z^M.
template <typename S>
class FormalSeries
{
public:
    explicit FormalSeries(int order) : c_(static_cast<std::size_t>(check(order)) + 1, S(0)) {}
    FormalSeries(int order, std::vector<S> coef) : FormalSeries(order)
    {
        for (std::size_t i = 0; i < coef.size() && i < c_.size(); ++i) {
            c_[i] = coef[i];
        }
    }

    // c z^power, or zero when power exceeds the order.
    static FormalSeries monomial(int order, const S &c, int power)
    {
        FormalSeries f(order);
        if (power >= 0 && power <= order) {
            f.c_[static_cast<std::size_t>(power)] = c;
        }
        return f;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const S &operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    S &operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    const std::vector<S> &coefficients() const { return c_; }

    // Adds c z^power; terms beyond the order are dropped.
    void add_term(const S &c, int power)
    {
        if (power >= 0 && power <= order()) {
            c_[static_cast<std::size_t>(power)] += c;
        }
    }

    FormalSeries &operator+=(const FormalSeries &g)
    {
        same_order(g);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] += g.c_[i];
        }
        return *this;
    }
    FormalSeries &operator-=(const FormalSeries &g)
    {
        same_order(g);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            c_[i] -= g.c_[i];
        }
        return *this;
    }
    FormalSeries &operator*=(const S &x)
    {
        for (auto &c : c_) {
            c *= x;
        }
        return *this;
    }

    friend FormalSeries operator+(FormalSeries f, const FormalSeries &g) { return f += g; }
    friend FormalSeries operator-(FormalSeries f, const FormalSeries &g) { return f -= g; }
    friend FormalSeries operator*(FormalSeries f, const S &x) { return f *= x; }
    friend FormalSeries operator*(const S &x, FormalSeries f) { return f *= x; }

    friend FormalSeries operator*(const FormalSeries &f, const FormalSeries &g)
    {
        f.same_order(g);
        FormalSeries h(f.order());
        int m = f.order();
        for (int i = 0; i <= m; ++i) {
            if (f[i] == S(0)) {
                continue;
            }
            for (int j = 0; i + j <= m; ++j) {
                h[i + j] += f[i] * g[j];
            }
        }
        return h;
    }

    // 1/f; DomainError when the constant term vanishes.
    FormalSeries inverse() const
    {
        if (c_[0] == S(0)) {
            throw DomainError("series inverse needs a nonzero constant term");
        }
        FormalSeries g(order());
        S inv0 = S(1) / c_[0];
        g[0] = inv0;
        for (int n = 1; n <= order(); ++n) {
            S acc(0);
            for (int i = 1; i <= n; ++i) {
                acc += (*this)[i] * g[n - i];
            }
            g[n] = -acc * inv0;
        }
        return g;
    }

    S evaluate(const S &z) const
    {
        S acc(0);
        for (int i = order(); i >= 0; --i) {
            acc = acc * z + c_[static_cast<std::size_t>(i)];
        }
        return acc;
    }

private:
    static int check(int order)
    {
        if (order < 0) {
            throw ParameterError("series order must be nonnegative");
        }
        return order;
    }
    void same_order(const FormalSeries &g) const
    {
        if (g.order() != order()) {
            throw ParameterError("series orders differ");
        }
    }

    std::vector<S> c_;
};

// max_n |f_n - g_n| / max(1, max_n |g_n|)
template <typename S>
double series_residual(const FormalSeries<S> &f, const FormalSeries<S> &g)
{
    double diff = 0;
    double scale = 1;
    for (int i = 0; i <= f.order(); ++i) {
        diff = std::max(diff, scalar_abs(S(f[i] - g[i])));
        scale = std::max(scale, scalar_abs(g[i]));
    }
    return diff / scale;
}

// h_0 .. h_{e_max} of the given variables.
template <typename S>
std::vector<S> homogeneous_sums(const std::vector<S> &x, int e_max)
{
    std::vector<S> h(static_cast<std::size_t>(e_max) + 1, S(0));
    h[0] = S(1);
    for (const S &v : x) {
        for (int e = 1; e <= e_max; ++e) {
            h[static_cast<std::size_t>(e)] += v * h[static_cast<std::size_t>(e - 1)];
        }
    }
    return h;
}

// T(n) = tau_A(p^n), U(n) = tau_{A' u {-alpha}}(p^n), t_n = tau_{A'}(p^n), with the shifts
// given through x_i = p^{-alpha_i} and X = x[alpha].
template <typename S>
struct LocalSequences
{
    S x_alpha;
    std::vector<S> t;
    std::vector<S> big_t;
    std::vector<S> big_u;
};

template <typename S>
LocalSequences<S> series_T_U(const std::vector<S> &x, std::size_t alpha, int n_max)
{
    if (alpha >= x.size()) {
        throw ParameterError("alpha is not an entry of the shift set");
    }
    if (n_max < 0) {
        throw ParameterError("sequence length must be nonnegative");
    }
    std::vector<S> rest;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i != alpha) {
            rest.push_back(x[i]);
        }
    }
    LocalSequences<S> out;
    out.x_alpha = x[alpha];
    out.t = homogeneous_sums(rest, n_max);
    out.big_t = homogeneous_sums(x, n_max);
    std::vector<S> swapped = rest;
    swapped.push_back(S(1) / x[alpha]);
    out.big_u = homogeneous_sums(swapped, n_max);
    return out;
}

// Largest residual of T(2n) = t_2n + X t_2n-1 + X^2 T(2n-2), T(2n-1) = t_2n-1 + X T(2n-2),
// U(2n) = t_2n + t_2n-1 / X + U(2n-2) / X^2 and tau_A(p^n) = t_n + X T(n-1).
template <typename S>
double recurrence_residual(const LocalSequences<S> &q)
{
    const S &x = q.x_alpha;
    int n_max = static_cast<int>(q.t.size()) - 1;
    double worst = 0;
    auto at = [](const std::vector<S> &v, int i) { return v[static_cast<std::size_t>(i)]; };
    for (int n = 1; 2 * n <= n_max; ++n) {
        worst = std::max(worst, scalar_abs(S(at(q.big_t, 2 * n) - at(q.t, 2 * n) - x * at(q.t, 2 * n - 1)
                                             - x * x * at(q.big_t, 2 * n - 2))));
        worst = std::max(worst,
                         scalar_abs(S(at(q.big_t, 2 * n - 1) - at(q.t, 2 * n - 1) - x * at(q.big_t, 2 * n - 2))));
        worst = std::max(worst, scalar_abs(S(at(q.big_u, 2 * n) - at(q.t, 2 * n) - at(q.t, 2 * n - 1) / x
                                             - at(q.big_u, 2 * n - 2) / (x * x))));
    }
    for (int n = 1; n <= n_max; ++n) {
        worst = std::max(worst, scalar_abs(S(at(q.big_t, n) - at(q.t, n) - x * at(q.big_t, n - 1))));
    }
    return worst;
}

template <typename S>
struct IdentityCheck
{
    FormalSeries<S> lhs;
    FormalSeries<S> rhs;
    double residual = 0;
};

// Coefficientwise T(2n) - T(2n-2) + (1/X - X) T(2n-1) = U(2n) - U(2n-2)/X^2 for 3 <= n <= M,
// and the full nu = 0 series equality in z to order M (which covers n = 0, 1, 2).
template <typename S>
IdentityCheck<S> verify_identity0(const std::vector<S> &x, std::size_t alpha, int m)
{
    if (m < 3) {
        throw ParameterError("identity order must be at least 3");
    }
    LocalSequences<S> q = series_T_U(x, alpha, 2 * m + 1);
    const S &xa = q.x_alpha;
    auto t = [&](int i) { return q.big_t[static_cast<std::size_t>(i)]; };
    auto u = [&](int i) { return q.big_u[static_cast<std::size_t>(i)]; };
    IdentityCheck<S> out{FormalSeries<S>(m), FormalSeries<S>(m), 0};
    for (int n = 3; n <= m; ++n) {
        out.lhs[n] = t(2 * n) - t(2 * n - 2) + (S(1) / xa - xa) * t(2 * n - 1);
        out.rhs[n] = u(2 * n) - u(2 * n - 2) / (xa * xa);
    }
    double coef = series_residual(out.lhs, out.rhs);

    // -z^2/X^2 + 1 + (1-z) sum_{k>=1} T(2k) z^k + (1/X - X) z sum_k T(2k+1) z^k
    //   = (1+z)(1 - z/X^2)(1 + (1/(1+z)) sum_{k>=1} U(2k) z^k)
    FormalSeries<S> one_minus_z(m, {S(1), S(-1)});
    FormalSeries<S> one_plus_z(m, {S(1), S(1)});
    FormalSeries<S> even_t(m), odd_t(m), even_u(m);
    for (int k = 0; k <= m; ++k) {
        if (k >= 1) {
            even_t[k] = t(2 * k);
            even_u[k] = u(2 * k);
        }
        odd_t.add_term(t(2 * k + 1), k + 1);
    }
    FormalSeries<S> left = FormalSeries<S>::monomial(m, S(1), 0) - FormalSeries<S>::monomial(m, S(1) / (xa * xa), 2)
                           + one_minus_z * even_t + odd_t * (S(1) / xa - xa);
    FormalSeries<S> factor(m, {S(1), -S(1) / (xa * xa)});
    FormalSeries<S> right =
        one_plus_z * factor * (FormalSeries<S>::monomial(m, S(1), 0) + one_plus_z.inverse() * even_u);
    double full = series_residual(left, right);
    out.residual = std::max(coef, full);
    return out;
}

// Both sides of the local identity at p for nu = v_p(ell), as series in z = 1/p with the
// shifts held fixed through x_i = p^{-alpha_i} and sp = p^{-s}. The c-sum keeps only
// min{c, n + nu} = 0. For odd nu both sides are multiplied by sqrt(p).
// `odd_form` selects the right side with tau(p^{2n+1}) and must match the parity of nu.
template <typename S>
IdentityCheck<S> local_identity(const std::vector<S> &x, std::size_t alpha, const S &sp, int nu, int m,
                                bool odd_form)
{
    if (nu < 0) {
        throw ParameterError("nu must be nonnegative");
    }
    if (m < 1) {
        throw ParameterError("series order must be positive");
    }
    if (alpha >= x.size()) {
        throw ParameterError("alpha is not an entry of the shift set");
    }
    if (odd_form != (nu % 2 == 1)) {
        throw ParameterError("right-hand form does not match the parity of nu");
    }
    int n_max = 2 * m + 2;
    std::vector<S> xs;
    for (const S &v : x) {
        xs.push_back(v * sp);
    }
    S xa = xs[alpha];
    std::vector<S> tau_a = homogeneous_sums(x, n_max);
    // tau_{A_s}(p^n) = p^{-ns} tau_A(p^n)
    S spn(1);
    for (int n = 0; n <= n_max; ++n) {
        tau_a[static_cast<std::size_t>(n)] *= spn;
        spn *= sp;
    }
    int norm = nu % 2;
    S inv_geom = S(1) / (S(1) - xa * xa);

    FormalSeries<S> sum(m);
    auto add = [&](const S &c, int e2, bool times_one_minus_z) {
        e2 -= norm;
        if (e2 < 0 || e2 % 2 != 0) {
            throw DomainError("local identity term has a fractional power of z");
        }
        sum.add_term(c, e2 / 2);
        if (times_one_minus_z) {
            sum.add_term(-c, e2 / 2 + 1);
        }
    };
    S xa_inv = S(1) / xa;
    S xa_pow_nu(1);
    for (int i = 0; i < nu; ++i) {
        xa_pow_nu *= xa_inv;
    }
    for (int n = 0; n <= n_max; ++n) {
        int mm = n + nu;
        // X^{-n}
        S xn(1);
        for (int i = 0; i < n; ++i) {
            xn *= xa_inv;
        }
        S base = tau_a[static_cast<std::size_t>(n)] * xn * xa_pow_nu;
        if (mm % 2 == 0) {
            // sum_{k >= m/2} X^{2k} = X^m / (1 - X^2)
            S xm(1);
            for (int i = 0; i < mm; ++i) {
                xm *= xa;
            }
            S c = base * xm * inv_geom;
            add(c, 2 * nu + 3 * n - 2 * mm, mm > 0);
            if (mm == 0) {
                // c = 1: -p^{-(2 - 2(s+alpha))} sum_k X^{2k}
                add(-c * xa_inv * xa_inv, 4, false);
            }
        } else {
            // k = (m-1)/2, G = p^{2k+1/2}
            S xk(1);
            for (int i = 0; i < mm - 1; ++i) {
                xk *= xa;
            }
            add(base * xk, 2 * nu + 3 * n - 2 * mm + 1, false);
        }
    }
    FormalSeries<S> ratio = FormalSeries<S>(m, {S(1) - xa * xa}) * FormalSeries<S>(m, {S(1), -xa_inv * xa_inv}).inverse();
    FormalSeries<S> lhs = ratio * FormalSeries<S>(m, {S(1), S(-1)}) * sum;

    std::vector<S> swapped;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i != alpha) {
            swapped.push_back(xs[i]);
        }
    }
    swapped.push_back(xa_inv);
    std::vector<S> tau_b = homogeneous_sums(swapped, 2 * m + 1);
    FormalSeries<S> a_inv = FormalSeries<S>(m, {S(1), S(1)}).inverse();
    FormalSeries<S> rsum(m);
    for (int n = 0; n <= m; ++n) {
        S tb = tau_b[static_cast<std::size_t>(odd_form ? 2 * n + 1 : 2 * n)];
        if (n + nu == 0) {
            rsum.add_term(tb, n);
        } else {
            rsum += FormalSeries<S>::monomial(m, S(1), n) * a_inv * tb;
        }
    }
    FormalSeries<S> rhs = FormalSeries<S>(m, {S(1), S(0), S(-1)}) * rsum;
    IdentityCheck<S> out{lhs, rhs, series_residual(lhs, rhs)};
    return out;
}

// The nu-even (c-sum) identity for nu even and the odd-nu identity for nu odd.
template <typename S>
IdentityCheck<S> verify_identity34(const std::vector<S> &x, std::size_t alpha, const S &sp, int nu, int m)
{
    return local_identity(x, alpha, sp, nu, m, nu % 2 == 1);
}

// Complex-double front ends with x_i = p^{-alpha_i}, sp = p^{-s}.
LocalSequences<Complex> series_T_U(const ShiftSet &a, std::size_t alpha, std::uint64_t p, int n_max);
IdentityCheck<Complex> verify_identity0(const ShiftSet &a, std::size_t alpha, std::uint64_t p, int m = 12);
IdentityCheck<Complex> verify_identity34(const ShiftSet &a, std::size_t alpha, Complex s, std::uint64_t p, int nu,
                                         int m = 12);

// The same sides summed directly at z = 1/p from G_{p^{2k}}(p^m) and tau values, truncated at
// n, k <= terms. Returns {lhs, rhs}.
std::pair<Complex, Complex> identity34_direct(const ShiftSet &a, std::size_t alpha, Complex s, std::uint64_t p,
                                              int nu, int terms = 200);

} // namespace quadtwist

#endif
