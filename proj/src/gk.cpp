#include <quadtwist/error.hpp>
#include <quadtwist/gk.hpp>
#include <quadtwist/weights.hpp>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

namespace quadtwist
{

namespace
{

std::uint64_t ipow(std::uint64_t p, int e)
{
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= p;
    }
    return r;
}

// kappa = v_p(k) capped at mu, and the residue symbol of k p^{-kappa} mod p.
std::pair<int, int> kappa_symbol(std::int64_t k, std::uint64_t p, int mu)
{
    if (k == 0) {
        return {mu, 0};
    }
    std::int64_t q = k;
    auto pp = static_cast<std::int64_t>(p);
    int kappa = 0;
    while (q % pp == 0 && kappa < mu) {
        q /= pp;
        ++kappa;
    }
    int sym = kappa == mu ? 0 : kronecker(q, pp);
    return {kappa, sym};
}

double table_value(std::uint64_t p, int mu, int kappa, int sym)
{
    if (mu <= kappa) {
        return mu % 2 == 0 ? static_cast<double>(ipow(p, mu) - (mu == 0 ? 0 : ipow(p, mu - 1))) : 0.0;
    }
    if (mu == kappa + 1) {
        double pk = static_cast<double>(ipow(p, kappa));
        if (mu % 2 == 0) {
            return -pk;
        }
        return sym * pk * std::sqrt(static_cast<double>(p));
    }
    return 0.0;
}

void require_odd(std::uint64_t m)
{
    if (m == 0 || m % 2 == 0) {
        throw ParameterError("G_k(m) needs odd positive m, got " + std::to_string(m));
    }
}

} // namespace

double g_prime_power(std::int64_t k, std::uint64_t p, int mu)
{
    auto [kappa, sym] = kappa_symbol(k, p, mu);
    return table_value(p, mu, kappa, sym);
}

double g_k(std::int64_t k, std::uint64_t m)
{
    require_odd(m);
    double r = 1;
    for (const auto &pp : factorize(m).factors) {
        r *= g_prime_power(k, pp.prime, pp.exponent);
        if (r == 0) {
            break;
        }
    }
    return r;
}

double g_square_prime_power(int k, std::uint64_t p, int m)
{
    if (m <= 2 * k && m % 2 == 0) {
        return m == 0 ? 1.0 : static_cast<double>(ipow(p, m) - ipow(p, m - 1));
    }
    if (m == 2 * k + 1) {
        return std::pow(static_cast<double>(p), 2 * k + 0.5);
    }
    return 0;
}

double GkEvaluator::factor(std::int64_t k, std::uint64_t p, int mu) const
{
    auto [kappa, sym] = kappa_symbol(k, p, mu);
    auto key = std::make_tuple(p, mu, kappa, sym);
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
        return it->second;
    }
    double v = table_value(p, mu, kappa, sym);
    cache_.emplace(key, v);
    return v;
}

double GkEvaluator::operator()(std::int64_t k, std::uint64_t m) const
{
    require_odd(m);
    double r = 1;
    for (const auto &pp : factorize(m).factors) {
        r *= factor(k, pp.prime, pp.exponent);
        if (r == 0) {
            break;
        }
    }
    return r;
}

std::vector<double> GkEvaluator::row(std::uint64_t m) const
{
    require_odd(m);
    std::vector<double> out(m, 1.0);
    for (const auto &pp : factorize(m).factors) {
        std::uint64_t q = ipow(pp.prime, pp.exponent);
        std::vector<double> local(q);
        for (std::uint64_t r = 0; r < q; ++r) {
            local[r] = factor(static_cast<std::int64_t>(r), pp.prime, pp.exponent);
        }
        for (std::uint64_t r = 0; r < m; ++r) {
            out[r] *= local[r % q];
        }
    }
    return out;
}

PoissonKSum poisson_k_sum(const std::vector<double> &row, double x0, std::int64_t k_limit)
{
    const TildePsiTable &tpsi = TildePsiTable::instance();
    std::uint64_t m = row.size();
    PoissonKSum out;
    out.k0 = row[0] * tpsi(0);
    double sum = out.k0;
    auto k_end = static_cast<std::int64_t>(std::ceil(tpsi.range() / x0));
    std::int64_t lo = 1;
    while (lo <= k_end) {
        if (lo > k_limit) {
            throw ConvergenceError("Poisson k-sum needs more than K = " + std::to_string(k_limit) + " terms");
        }
        std::int64_t hi = std::min(2 * lo, k_end + 1);
        double oct = 0;
        auto r = static_cast<std::uint64_t>(lo) % m;
        for (std::int64_t k = lo; k < hi; ++k) {
            double x = k * x0;
            double term = row[r] * tpsi(x) + row[r == 0 ? 0 : m - r] * tpsi(-x);
            oct += (k % 2 == 0) ? term : -term;
            if (++r == m) {
                r = 0;
            }
        }
        sum += oct;
        out.k_max = hi - 1;
        if (lo * x0 >= 8 && std::abs(oct) <= 1e-12 * std::abs(sum)) {
            break;
        }
        lo = hi;
    }
    out.total = sum;
    return out;
}

PoissonCheck poisson_check(std::uint64_t big_d, std::uint64_t m, double y, std::int64_t k_limit)
{
    require_odd(m);
    if (big_d == 0 || y < 1) {
        throw ParameterError("poisson_check needs D >= 1 and Y >= 1");
    }
    SmoothWeight psi = make_psi();
    auto c_max = static_cast<std::uint64_t>(std::floor(y));
    PoissonCheck out;

    double lhs = 0;
    for (std::uint64_t d = big_d + 1; d < 2 * big_d; ++d) {
        if (d % 2 == 0) {
            continue;
        }
        int sieve = 0;
        for (std::uint64_t c = 1; c <= c_max && c * c <= d; ++c) {
            if (d % (c * c) == 0) {
                sieve += mobius(c);
            }
        }
        if (sieve != 0) {
            lhs += sieve * psi(static_cast<double>(d) / big_d) *
                   kronecker(static_cast<std::int64_t>(d), static_cast<std::int64_t>(m));
        }
    }
    out.lhs = lhs;

    GkEvaluator gk;
    std::vector<double> row = gk.row(m);
    double pref = static_cast<double>(big_d) * kronecker(2, static_cast<std::int64_t>(m)) / (2.0 * m);
    double rhs = 0, rhs0 = 0;
    for (std::uint64_t c = 1; c <= c_max; ++c) {
        if (std::gcd(c, 2 * m) != 1) {
            continue;
        }
        int mu = mobius(c);
        if (mu == 0) {
            continue;
        }
        double x0 = static_cast<double>(big_d) / (2.0 * c * c * m);
        PoissonKSum ks = poisson_k_sum(row, x0, k_limit);
        out.k_max = std::max(out.k_max, ks.k_max);
        double sum = ks.total;
        double zero = ks.k0;
        rhs += mu * sum / (static_cast<double>(c) * c);
        rhs0 += mu * zero / (static_cast<double>(c) * c);
    }
    out.rhs = pref * rhs;
    out.rhs_k0 = pref * rhs0;
    return out;
}

} // namespace quadtwist
