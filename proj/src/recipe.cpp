#include <quadtwist/arith.hpp>
#include <quadtwist/empirical.hpp>
#include <quadtwist/parallel.hpp>
#include <quadtwist/recipe.hpp>
#include <quadtwist/special.hpp>
#include <quadtwist/symmetric.hpp>

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

namespace quadtwist
{

namespace
{

const double log2_ = std::log(2.0);
const double logpi = std::log(pi);

bool near_integer(Complex z, int parity)
{
    double n = std::round(z.real());
    if (n < 1 || static_cast<long>(n) % 2 != parity) {
        return false;
    }
    return std::abs(z - n) < pole_radius;
}

Complex exp_or_zero(Complex x)
{
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
        return 0;
    }
    return std::exp(x);
}

} // namespace

Complex x_plus(Complex z)
{
    if (near_integer(z, 1)) {
        std::ostringstream os;
        os << "X_+ has a pole at " << std::round(z.real());
        throw SingularityError(os.str());
    }
    if (z.real() >= 0.5) {
        return exp_or_zero((z - 1.0) * log2_ + z * logpi - log_gamma(z) - log_cos(pi * z / 2.0));
    }
    return exp_or_zero(z * log2_ + (z - 1.0) * logpi + log_cos(pi * (1.0 - z) / 2.0) + log_gamma(1.0 - z));
}

Complex x_minus(Complex z)
{
    if (near_integer(z, 0)) {
        std::ostringstream os;
        os << "X_- has a pole at " << std::round(z.real());
        throw SingularityError(os.str());
    }
    if (z.real() >= 0.5) {
        return exp_or_zero((z - 1.0) * log2_ + z * logpi - log_gamma(z) - log_sin(pi * z / 2.0));
    }
    return exp_or_zero(z * log2_ + (z - 1.0) * logpi + log_sin(pi * (1.0 - z) / 2.0) + log_gamma(1.0 - z));
}

Complex gamma_factor(GammaKind kind, Complex z)
{
    return kind == GammaKind::plus ? x_plus(z) : x_minus(z);
}

Complex x_disc(std::int64_t d, Complex z)
{
    if (d == 0) {
        throw ParameterError("X_d needs d != 0");
    }
    double ad = std::abs(static_cast<double>(d));
    Complex g = d > 0 ? x_plus(z) : x_minus(z);
    return std::exp((0.5 - z) * std::log(ad)) * g;
}

Complex chi(Complex s)
{
    return x_plus(s);
}

Complex x_mellin(Complex u)
{
    // cos x + sin x = sqrt 2 sin(x + pi/4)
    return exp_or_zero(-u * std::log(2 * pi) + log_gamma(u) + log_sin(pi * u / 2.0 + pi / 4) + 0.5 * std::log(2.0));
}

Complex b_prefactor(const ShiftSet &b)
{
    Complex r = 1;
    auto check = [](Complex x, std::size_t i, std::size_t j) {
        if (std::abs(x) < pole_radius) {
            std::ostringstream os;
            os << "zeta(1 + b_" << i << " + b_" << j << ") is within " << pole_radius << " of its pole";
            throw SingularityError(os.str());
        }
    };
    for (std::size_t i = 0; i < b.size(); ++i) {
        check(2.0 * b[i], i, i);
        r *= zeta(1.0 + 2.0 * b[i]);
        for (std::size_t j = i + 1; j < b.size(); ++j) {
            check(b[i] + b[j], i, j);
            r *= zeta(1.0 + b[i] + b[j]);
        }
    }
    return r;
}

namespace
{

// 1 - w_p, the weight deficit of the tilde modes.
Complex weight_gap(BMode mode, double logp, Complex w)
{
    switch (mode) {
    case BMode::plain:
        return 0;
    case BMode::tilde:
        return 1.0 / (std::exp(logp) + 1.0);
    case BMode::tilde_w: {
        Complex q = std::exp(-w * logp);
        return q / (1.0 + q);
    }
    }
    return 0;
}

struct LocalParts
{
    Complex even_minus_one;
    Complex odd;
    Complex removed; // prod (1 - z_i^2) prod (1 - z_i z_j)
};

LocalParts local_parts(const ShiftSet &b, double logp, std::vector<Complex> &z)
{
    std::size_t k = b.size();
    z.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        z[i] = std::exp(-(0.5 + b[i]) * logp);
    }
    Complex fp = 1, fm = 1, removed = 1;
    for (std::size_t i = 0; i < k; ++i) {
        fp /= 1.0 - z[i];
        fm /= 1.0 + z[i];
        removed *= 1.0 - z[i] * z[i];
        for (std::size_t j = i + 1; j < k; ++j) {
            removed *= 1.0 - z[i] * z[j];
        }
    }
    // f(r) f(-r) = 1 / prod(1 - z^2), so (f(r) + f(-r))/2 - 1 = (f(r) - 1 + f(-r) - 1)/2.
    Complex em1 = 0.5 * ((fp - 1.0) + (fm - 1.0));
    return {em1, 0.5 * (fp - fm), removed};
}

Complex local_value(const LocalParts &lp, int nu, bool in_modulus, Complex gap)
{
    if (in_modulus) {
        return nu % 2 == 0 ? 1.0 : 0.0;
    }
    Complex w = 1.0 - gap;
    if (nu == 0) {
        return 1.0 + lp.even_minus_one - gap * lp.even_minus_one;
    }
    if (nu % 2 == 0) {
        return w * (1.0 + lp.even_minus_one);
    }
    return w * lp.odd;
}

int valuation_signed(std::int64_t ell, std::uint64_t p)
{
    return valuation(static_cast<std::uint64_t>(ell < 0 ? -ell : ell), p);
}

std::vector<std::uint64_t> prime_divisors(std::uint64_t n)
{
    std::vector<std::uint64_t> r;
    for (const auto &pp : factorize(n).factors) {
        r.push_back(pp.prime);
    }
    return r;
}

} // namespace

Complex b_local(const ShiftSet &b, std::uint64_t p, int nu, BMode mode, Complex w)
{
    std::vector<Complex> z;
    double logp = std::log(static_cast<double>(p));
    LocalParts lp = local_parts(b, logp, z);
    return local_value(lp, nu, false, weight_gap(mode, logp, w));
}

// Dense multivariate truncated series in mixed radix.
namespace
{

class DenseSeries
{
public:
    DenseSeries(std::size_t nvars, const std::vector<int> &weight, int degree)
        : n_(nvars), weight_(weight), degree_(degree)
    {
        radix_.assign(n_, 1);
        std::size_t size = 1;
        for (std::size_t i = 0; i < n_; ++i) {
            radix_[i] = size;
            size *= static_cast<std::size_t>(degree_ / weight_[i] + 1);
        }
        coef_.assign(size, 0.0);
        deg_.assign(size, -1);
        std::vector<int> e(n_, 0);
        enumerate(0, 0, 0, e);
        std::sort(order_.begin(), order_.end(),
                  [&](std::size_t x, std::size_t y) { return deg_[x] < deg_[y] || (deg_[x] == deg_[y] && x < y); });
    }

    std::size_t index(const std::vector<int> &e) const
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            idx += radix_[i] * e[i];
        }
        return idx;
    }
    double &operator[](std::size_t i) { return coef_[i]; }
    double operator[](std::size_t i) const { return coef_[i]; }
    const std::vector<std::size_t> &monomials() const { return order_; }
    int deg(std::size_t i) const { return deg_[i]; }
    std::vector<int> exponent(std::size_t idx) const
    {
        std::vector<int> e(n_);
        for (std::size_t i = n_; i-- > 0;) {
            e[i] = static_cast<int>(idx / radix_[i]);
            idx %= radix_[i];
        }
        return e;
    }

    DenseSeries zero() const
    {
        DenseSeries r = *this;
        std::fill(r.coef_.begin(), r.coef_.end(), 0.0);
        return r;
    }

    DenseSeries operator*(const DenseSeries &o) const
    {
        DenseSeries r = zero();
        std::vector<std::size_t> lhs, rhs;
        for (std::size_t i : order_) {
            if (coef_[i] != 0) {
                lhs.push_back(i);
            }
            if (o.coef_[i] != 0) {
                rhs.push_back(i);
            }
        }
        for (std::size_t i : lhs) {
            int di = deg_[i];
            for (std::size_t j : rhs) {
                if (di + deg_[j] > degree_) {
                    break;
                }
                r.coef_[i + j] += coef_[i] * o.coef_[j];
            }
        }
        return r;
    }

    void axpy(double a, const DenseSeries &o)
    {
        for (std::size_t i : order_) {
            coef_[i] += a * o.coef_[i];
        }
    }

private:
    void enumerate(std::size_t v, int used, std::size_t idx, std::vector<int> &e)
    {
        if (v == n_) {
            order_.push_back(idx);
            deg_[idx] = used;
            return;
        }
        for (int x = 0; used + x * weight_[v] <= degree_; ++x) {
            e[v] = x;
            enumerate(v + 1, used + x * weight_[v], idx + radix_[v] * x, e);
        }
        e[v] = 0;
    }

    std::size_t n_;
    std::vector<int> weight_;
    int degree_;
    std::vector<std::size_t> radix_;
    std::vector<double> coef_;
    std::vector<std::size_t> order_;
    std::vector<int> deg_;
};

} // namespace

LocalLogSeries::LocalLogSeries(std::size_t k, bool weighted, int degree) : k_(k), weighted_(weighted), degree_(degree)
{
    std::size_t nv = k + (weighted ? 1 : 0);
    std::vector<int> weight(nv, 1);
    if (weighted) {
        weight[k] = 2;
    }
    DenseSeries proto(nv, weight, degree);
    // E - 1: every z-monomial of positive even degree, coefficient 1.
    DenseSeries em1 = proto.zero();
    for (std::size_t idx : proto.monomials()) {
        auto e = proto.exponent(idx);
        int d = proto.deg(idx);
        if (d > 0 && d % 2 == 0 && (!weighted || e[k] == 0)) {
            em1[idx] = 1;
        }
    }
    DenseSeries x = em1;
    if (weighted) {
        // 1 - w = u - u^2 + u^3 - ...
        DenseSeries gap = proto.zero();
        std::vector<int> e(nv, 0);
        for (int n = 1; 2 * n <= degree; ++n) {
            e[k] = n;
            gap[proto.index(e)] = n % 2 == 1 ? 1.0 : -1.0;
        }
        x.axpy(-1.0, gap * em1);
    }
    DenseSeries logs = proto.zero();
    DenseSeries power = x;
    for (int n = 1; 2 * n <= degree; ++n) {
        logs.axpy((n % 2 == 1 ? 1.0 : -1.0) / n, power);
        power = power * x;
    }
    // minus sum_m (P_{2m} + P_m^2) / (2m)
    for (int m = 1; 2 * m <= degree; ++m) {
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<int> e(nv, 0);
            e[i] = 2 * m;
            logs[proto.index(e)] -= 1.0 / m;
            for (std::size_t j = i + 1; j < k; ++j) {
                std::vector<int> f(nv, 0);
                f[i] = m;
                f[j] = m;
                logs[proto.index(f)] -= 1.0 / m;
            }
        }
    }
    for (std::size_t idx : proto.monomials()) {
        if (std::abs(logs[idx]) > 1e-12) {
            terms_.push_back({proto.exponent(idx), logs[idx]});
        }
    }
}

std::shared_ptr<const LocalLogSeries> LocalLogSeries::get(std::size_t k, bool weighted, int degree)
{
    static std::mutex mu;
    static std::map<std::tuple<std::size_t, bool, int>, std::shared_ptr<const LocalLogSeries>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(k, weighted, degree);
    auto it = cache.find(key);
    if (it != cache.end()) {
        return it->second;
    }
    auto s = std::make_shared<const LocalLogSeries>(k, weighted, degree);
    cache.emplace(key, s);
    return s;
}

Complex LocalLogSeries::eval(std::span<const Complex> z, Complex u) const
{
    Complex acc = 0;
    for (const auto &t : terms_) {
        Complex m = t.coef;
        for (std::size_t i = 0; i < k_; ++i) {
            for (int e = 0; e < t.exponent[i]; ++e) {
                m *= z[i];
            }
        }
        if (weighted_) {
            for (int e = 0; e < t.exponent[k_]; ++e) {
                m *= u;
            }
        }
        acc += m;
    }
    return acc;
}

namespace
{

struct EulerResult
{
    Complex euler = 1;
    Complex log_tail = 0;
    double tail_error = 0;
    bool vanishes = false;
};

int series_degree_for(std::size_t k, int requested)
{
    // Keep the dense series small for large shift sets.
    if (k >= 6) {
        return std::min(requested, 8);
    }
    if (k == 5) {
        return std::min(requested, 10);
    }
    return requested;
}

// Sum over primes p > P of p^{-s}, against the density of Riemann's R plus a boundary term.
Complex prime_tail(Complex s, double log_p, double boundary)
{
    Complex r = expint_e1((s - 1.0) * log_p) - 0.5 * expint_e1((s - 0.5) * log_p) -
                expint_e1((s - 1.0 / 3.0) * log_p) / 3.0;
    return r + boundary * std::exp(-s * log_p);
}

const std::vector<double> &prime_logs(const std::vector<std::uint32_t> &primes)
{
    static std::mutex mu;
    static std::vector<double> logs;
    std::lock_guard<std::mutex> lock(mu);
    if (logs.size() < primes.size()) {
        logs.resize(primes.size());
        for (std::size_t i = 0; i < primes.size(); ++i) {
            logs[i] = std::log(static_cast<double>(primes[i]));
        }
    }
    return logs;
}

// Euler product over p <= P with the remaining primes through the log series.
// `local_out`, if given, receives the local factor L_p for the first local_out->size() primes.
EulerResult euler_product(const ShiftSet &b, std::int64_t ell, std::uint64_t modulus, BMode mode, Complex w,
                          const BOptions &opt, std::vector<Complex> *local_out = nullptr)
{
    if (ell == 0) {
        throw ParameterError("ell must be nonzero");
    }
    if (modulus == 0) {
        throw ParameterError("modulus must be positive");
    }
    for (Complex x : b) {
        if (!(x.real() > -0.25)) {
            throw DomainError("Euler product needs Re b > -1/4");
        }
    }
    if (mode == BMode::tilde_w && !(w.real() >= 0.5)) {
        throw DomainError("weighted Euler product needs Re w >= 1/2");
    }
    if (opt.prime_cutoff < 100) {
        throw ParameterError("prime cutoff must be at least 100");
    }
    std::uint64_t big_p = opt.prime_cutoff;
    const Sieve &sv = shared_sieve(big_p);
    const auto &primes = sv.primes();
    const auto &logs = prime_logs(primes);
    EulerResult res;
    std::vector<Complex> z;
    std::size_t n_out = local_out ? local_out->size() : 0;
    std::uint64_t abs_ell = static_cast<std::uint64_t>(ell < 0 ? -ell : ell);
    std::size_t count = 0;
    for (std::size_t i = 0; i < primes.size() && primes[i] <= big_p; ++i) {
        std::uint64_t p = primes[i];
        ++count;
        LocalParts lp = local_parts(b, logs[i], z);
        int nu = abs_ell % p == 0 ? valuation(abs_ell, p) : 0;
        Complex lv = local_value(lp, nu, modulus % p == 0, weight_gap(mode, logs[i], w));
        if (i < n_out) {
            (*local_out)[i] = local_value(lp, 0, false, weight_gap(mode, logs[i], w));
        }
        res.euler *= lv * lp.removed;
    }
    if (res.euler == 0.0) {
        res.vanishes = true;
        return res;
    }
    // Primes beyond the cutoff that divide the modulus or ell.
    std::vector<std::uint64_t> special = prime_divisors(modulus);
    for (std::uint64_t p : prime_divisors(abs_ell)) {
        special.push_back(p);
    }
    std::sort(special.begin(), special.end());
    special.erase(std::unique(special.begin(), special.end()), special.end());
    for (std::uint64_t p : special) {
        if (p <= big_p) {
            continue;
        }
        double lgp = std::log(static_cast<double>(p));
        LocalParts lp = local_parts(b, lgp, z);
        Complex gap = weight_gap(mode, lgp, w);
        Complex actual = local_value(lp, valuation_signed(ell, p), modulus % p == 0, gap);
        Complex generic = local_value(lp, 0, false, gap);
        res.euler *= actual / generic;
    }
    if (res.euler == 0.0) {
        res.vanishes = true;
        return res;
    }
    if (!opt.tail) {
        return res;
    }
    bool weighted = mode != BMode::plain;
    int degree = series_degree_for(b.size(), opt.series_degree);
    auto series = LocalLogSeries::get(b.size(), weighted, degree);
    double lp = std::log(static_cast<double>(big_p));
    double boundary = riemann_r(static_cast<double>(big_p)) - static_cast<double>(count);
    std::vector<Complex> expo(b.size() + 1);
    for (std::size_t i = 0; i < b.size(); ++i) {
        expo[i] = 0.5 + b[i];
    }
    expo[b.size()] = mode == BMode::tilde_w ? w : Complex(1.0);
    Complex tail = 0;
    double at_cutoff = 0;
    for (const auto &t : series->terms()) {
        Complex s = 0;
        for (std::size_t i = 0; i < t.exponent.size(); ++i) {
            s += static_cast<double>(t.exponent[i]) * expo[i];
        }
        double mag = std::abs(t.coef) * std::exp(-s.real() * lp);
        if (mag < 1e-22) {
            continue;
        }
        at_cutoff += mag;
        tail += t.coef * prime_tail(s, lp, boundary);
    }
    // Truncation: the first omitted degree, counted by the number of monomials of that degree.
    double zmax = 0;
    for (Complex x : expo) {
        zmax = std::max(zmax, std::exp(-(x.real() * lp)));
    }
    double omitted_sigma = (degree + 2) * (0.5 + std::min_element(b.begin(), b.end(), [](Complex x, Complex y) {
                                                    return x.real() < y.real();
                                                })->real());
    double monos = 1;
    for (std::size_t i = 1; i < b.size() + (weighted ? 1 : 0); ++i) {
        monos = monos * (degree + 2 + i) / i;
    }
    double trunc = 0;
    if (!b.empty()) {
        trunc = monos * std::pow(zmax, degree + 2) * big_p / std::max(omitted_sigma - 1.0, 1e-3) / lp;
    }
    res.log_tail = tail;
    // Scale of pi(x) - R(x) near the cutoff.
    res.tail_error = at_cutoff * std::sqrt(static_cast<double>(big_p)) / lp + trunc;
    if (res.tail_error > opt.tail_tolerance) {
        std::ostringstream os;
        os << "Euler product tail estimate " << res.tail_error << " exceeds " << opt.tail_tolerance
           << "; increase the prime cutoff";
        throw ConvergenceError(os.str());
    }
    res.euler *= std::exp(tail);
    return res;
}

BSeries finish(const ShiftSet &b, std::int64_t ell, std::uint64_t modulus, BMode mode, Complex w,
               const BOptions &opt)
{
    BSeries r;
    r.b = b;
    r.ell = ell;
    r.modulus = modulus;
    r.mode = mode;
    r.w = w;
    r.prime_cutoff = opt.prime_cutoff;
    r.prefactor = b_prefactor(b);
    EulerResult e = euler_product(b, ell, modulus, mode, w, opt);
    r.euler = e.euler;
    r.log_tail = e.log_tail;
    r.tail_error = e.tail_error;
    r.value = r.prefactor * r.euler;
    return r;
}

} // namespace

BSeries b_series(const ShiftSet &b, std::int64_t ell, std::uint64_t modulus, const BOptions &opt)
{
    return finish(b, ell, modulus, BMode::plain, 0, opt);
}

BSeries b_tilde(const ShiftSet &b, std::int64_t ell, const BOptions &opt)
{
    return finish(b, ell, 2, BMode::tilde, 1.0, opt);
}

BSeries b_tilde_w(const ShiftSet &b, std::int64_t ell, Complex w, const BOptions &opt)
{
    return finish(b, ell, 2, BMode::tilde_w, w, opt);
}

Complex f_ratio(const ShiftSet &b, std::int64_t ell, Complex w, const BOptions &opt)
{
    EulerResult num = euler_product(b, ell, 2, BMode::tilde_w, w, opt);
    EulerResult den = euler_product(b, ell, 2, BMode::plain, 0, opt);
    if (den.vanishes) {
        throw SingularityError("B^{(2)} Euler product vanishes at this ell");
    }
    return num.euler / den.euler;
}

namespace
{

std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t k, std::size_t j)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto rec = [&](auto &&self, std::size_t start) -> void {
        if (cur.size() == j) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < k; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

double factorial(std::size_t n)
{
    double r = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        r *= static_cast<double>(i);
    }
    return r;
}

Complex swap_factor(std::span<const Complex> u, std::uint64_t d)
{
    Complex r = 1;
    for (Complex x : u) {
        r *= x_disc(static_cast<std::int64_t>(8 * d), 0.5 + x);
    }
    return r;
}

Complex direct_j_term(const ShiftSet &as, std::uint64_t d, std::int64_t ell, std::size_t j, const BOptions &opt)
{
    Complex acc = 0;
    for (const auto &u : subsets_of_size(as.size(), j)) {
        std::vector<Complex> uv;
        for (std::size_t i : u) {
            uv.push_back(as[i]);
        }
        acc += swap_factor(uv, d) * b_series(swap_set(as, u), ell, 2 * d, opt).value;
    }
    return acc;
}

// The |U| = j sum as (1/j!(k-j)!) times the symmetric double contour sum of
// F(z; w) = prod X_{8d}(1/2 + z) B^{(2d)}(-z, w) Delta(z; w), where the cross poles of B
// cancel against Delta(z; w).
Complex condensed_j_term(const ShiftSet &as, std::uint64_t d, std::int64_t ell, std::size_t j,
                         const SwapOptions &opt, double merge_gap)
{
    std::size_t k = as.size();
    auto f = [&](std::span<const Complex> z, std::span<const Complex> w) -> Complex {
        std::vector<Complex> vals;
        for (Complex x : z) {
            vals.push_back(-x);
        }
        for (Complex x : w) {
            vals.push_back(x);
        }
        ShiftSet bset(vals);
        Complex pre = 1;
        for (std::size_t r = 0; r < z.size(); ++r) {
            pre *= zeta(1.0 - 2.0 * z[r]);
            for (std::size_t q = r + 1; q < z.size(); ++q) {
                pre *= zeta(1.0 - z[r] - z[q]);
            }
            for (Complex x : w) {
                pre *= -zeta_pole_free(1.0 + x - z[r]);
            }
        }
        for (std::size_t r = 0; r < w.size(); ++r) {
            pre *= zeta(1.0 + 2.0 * w[r]);
            for (std::size_t q = r + 1; q < w.size(); ++q) {
                pre *= zeta(1.0 + w[r] + w[q]);
            }
        }
        EulerResult e = euler_product(bset, ell, 2 * d, BMode::plain, 0, opt.b);
        return swap_factor(z, d) * pre * e.euler;
    };
    ContourSpec spec = ContourSpec::for_shifts(as, merge_gap, opt.nodes);
    CondenseOptions co;
    co.symmetric = true;
    return condensed_sum_double(f, as, j, spec, co) / (factorial(j) * factorial(k - j));
}

} // namespace

Complex swap_term_sum(const ShiftSet &a, Complex s, std::uint64_t d, std::int64_t ell, std::size_t max_swap,
                      const SwapOptions &opt)
{
    if (max_swap > a.size()) {
        throw ParameterError("swap order exceeds the number of shifts");
    }
    ShiftSet as = a.shifted(s);
    bool degenerate = a.size() > 1 && a.min_gap() < opt.degenerate_gap;
    if (degenerate && !opt.allow_condensed && max_swap > 0) {
        throw DegeneracyError("shifts closer than the degeneracy gap need the contour path");
    }
    Complex acc = b_series(as, ell, 2 * d, opt.b).value;
    for (std::size_t j = 1; j <= max_swap; ++j) {
        acc += degenerate ? condensed_j_term(as, d, ell, j, opt, opt.degenerate_gap)
                          : direct_j_term(as, d, ell, j, opt.b);
    }
    return acc;
}

Complex jswap_magnitude(const ShiftSet &a, Complex s, std::uint64_t d, std::int64_t ell, std::size_t j,
                       const SwapOptions &opt)
{
    if (j > a.size()) {
        throw ParameterError("swap order exceeds the number of shifts");
    }
    ShiftSet as = a.shifted(s);
    if (j == 0) {
        return b_series(as, ell, 2 * d, opt.b).value;
    }
    return condensed_j_term(as, d, ell, j, opt, std::min(opt.degenerate_gap, 1e-4));
}

std::vector<Complex> recipe_poles(const ShiftSet &a)
{
    std::vector<Complex> poles;
    for (std::size_t i = 0; i < a.size(); ++i) {
        poles.push_back(-a[i]);
        poles.push_back(0.5 - a[i]);
        poles.push_back(-0.25 - a[i]);
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            poles.push_back(-(a[i] + a[j]) / 2.0);
        }
    }
    return poles;
}

std::vector<RecipeTermSet> recipe_predictions(const ShiftSet &a, const std::vector<std::uint64_t> &big_ds, double eta,
                                              std::int64_t ell, std::size_t max_swap, const RecipeOptions &opt)
{
    auto start = std::chrono::steady_clock::now();
    if (big_ds.empty()) {
        return {};
    }
    if (max_swap > a.size()) {
        throw ParameterError("swap order exceeds the number of shifts");
    }
    if (ell <= 0 || ell % 2 == 0) {
        throw ParameterError("ell must be a positive odd integer");
    }
    if (!(eta > 1 && eta < 2)) {
        throw ParameterError("eta must lie in (1, 2)");
    }
    if (a.size() > 1 && a.min_gap() < 1e-3) {
        throw DegeneracyError("recipe prediction needs shifts separated by at least 1e-3");
    }
    std::size_t nd = big_ds.size();
    std::vector<std::uint64_t> ns(nd);
    std::vector<std::vector<std::uint64_t>> fams(nd);
    std::vector<std::vector<double>> psi_w(nd);
    SmoothWeight psi = make_psi();
    std::uint64_t d_max = 3;
    for (std::size_t i = 0; i < nd; ++i) {
        ns[i] = poly_length(big_ds[i], eta);
        for (std::uint64_t d : make_family(big_ds[i]).members) {
            if (std::gcd(d, static_cast<std::uint64_t>(ell)) != 1) {
                continue;
            }
            double pw = psi(static_cast<double>(d) / static_cast<double>(big_ds[i]));
            if (pw == 0) {
                continue;
            }
            fams[i].push_back(d);
            psi_w[i].push_back(pw);
            d_max = std::max(d_max, d);
        }
    }
    BOptions bopt = opt.b;
    bopt.prime_cutoff = std::max<std::uint64_t>(bopt.prime_cutoff, d_max);
    const Sieve &sv = shared_sieve(std::max<std::uint64_t>(bopt.prime_cutoff, d_max));
    const auto &primes = sv.primes();
    std::size_t n_local = 0;
    while (n_local < primes.size() && primes[n_local] <= d_max) {
        ++n_local;
    }
    std::map<std::uint32_t, std::size_t> prime_index;
    for (std::size_t i = 0; i < n_local; ++i) {
        prime_index[primes[i]] = i;
    }
    std::vector<std::vector<std::vector<std::size_t>>> fac(nd);
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::uint64_t d : fams[i]) {
            std::vector<std::size_t> f;
            for (const auto &pp : sv.factorize(d).factors) {
                f.push_back(prime_index.at(static_cast<std::uint32_t>(pp.prime)));
            }
            fac[i].push_back(f);
        }
    }
    std::uint64_t n_max = *std::max_element(ns.begin(), ns.end());
    SmoothWeight wgt = make_w(opt.ramp);
    GridOptions go;
    go.log_scale = std::log(static_cast<double>(n_max));
    go.poles = recipe_poles(a);
    TransformGrid grid = vertical_line_grid(wgt, opt.a_line, opt.grid_tail, go);

    struct Subset
    {
        std::vector<std::size_t> idx;
        std::size_t order;
    };
    std::vector<Subset> subsets;
    for (std::size_t j = 0; j <= max_swap; ++j) {
        for (auto &u : subsets_of_size(a.size(), j)) {
            subsets.push_back({u, j});
        }
    }
    bool real_case = a.conjugation_closed();
    std::size_t width = nd * (max_swap + 1);

    // G^{(j)}_D(s) for one s, laid out as [D][j].
    auto evaluate = [&](Complex s) {
        std::vector<Complex> g(width, 0.0);
        ShiftSet as = a.shifted(s);
        std::vector<Complex> local(n_local);
        for (const auto &sub : subsets) {
            ShiftSet bset = swap_set(as, sub.idx);
            EulerResult e = euler_product(bset, ell, 2, BMode::plain, 0, bopt, &local);
            Complex b2 = b_prefactor(bset) * e.euler;
            std::vector<Complex> inv(n_local);
            for (std::size_t i = 0; i < n_local; ++i) {
                inv[i] = 1.0 / local[i];
            }
            Complex usum = 0;
            Complex xprod = 1;
            for (std::size_t i : sub.idx) {
                usum += as[i];
                xprod *= x_plus(0.5 + as[i]);
            }
            for (std::size_t di = 0; di < nd; ++di) {
                Complex acc = 0;
                for (std::size_t m = 0; m < fams[di].size(); ++m) {
                    Complex v = psi_w[di][m];
                    for (std::size_t pi_ : fac[di][m]) {
                        v *= inv[pi_];
                    }
                    if (sub.order > 0) {
                        v *= std::exp(-usum * std::log(8.0 * static_cast<double>(fams[di][m])));
                    }
                    acc += v;
                }
                g[di * (max_swap + 1) + sub.order] += b2 * xprod * acc;
            }
        }
        return g;
    };

    auto node_values = parallel_map<std::vector<Complex>>(
        grid.t.size(),
        [&](std::size_t i) {
            Complex s(grid.a, grid.t[i]);
            std::vector<Complex> out(width);
            std::vector<Complex> gp = evaluate(s);
            std::vector<Complex> gm;
            if (!real_case) {
                gm = evaluate(std::conj(s));
            }
            for (std::size_t di = 0; di < nd; ++di) {
                double logn = std::log(static_cast<double>(ns[di]));
                Complex np = std::exp(s * logn);
                for (std::size_t j = 0; j <= max_swap; ++j) {
                    std::size_t c = di * (max_swap + 1) + j;
                    Complex hp = grid.value[i] * np * gp[c];
                    if (real_case) {
                        out[c] = grid.weight[i] * hp.real() / pi;
                    } else {
                        Complex hm = std::conj(grid.value[i]) * std::conj(np) * gm[c];
                        out[c] = grid.weight[i] * (hp + hm) / (2 * pi);
                    }
                }
            }
            return out;
        },
        opt.threads);

    std::vector<RecipeTermSet> out(nd);
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    for (std::size_t di = 0; di < nd; ++di) {
        RecipeTermSet &r = out[di];
        r.a = a;
        r.big_d = big_ds[di];
        r.eta = eta;
        r.ell = ell;
        r.n = ns[di];
        r.a_line = opt.a_line;
        r.max_swap = max_swap;
        r.nodes = grid.t.size();
        r.truncation = grid.truncation;
        r.prime_cutoff = bopt.prime_cutoff;
        r.elapsed_ms = ms;
        r.swap_terms.assign(max_swap + 1, 0.0);
        for (std::size_t j = 0; j <= max_swap; ++j) {
            std::vector<Complex> col(grid.t.size());
            for (std::size_t i = 0; i < grid.t.size(); ++i) {
                col[i] = node_values[i][di * (max_swap + 1) + j];
            }
            r.swap_terms[j] = tree_sum(col);
            r.total += r.swap_terms[j];
        }
    }
    return out;
}

RecipeTermSet recipe_prediction(const ShiftSet &a, std::uint64_t big_d, double eta, std::int64_t ell,
                                std::size_t max_swap, const RecipeOptions &opt)
{
    return recipe_predictions(a, {big_d}, eta, ell, max_swap, opt).front();
}

} // namespace quadtwist
