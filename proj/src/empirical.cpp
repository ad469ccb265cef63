#include <quadtwist/arith.hpp>
#include <quadtwist/empirical.hpp>
#include <quadtwist/error.hpp>
#include <quadtwist/gk.hpp>
#include <quadtwist/parallel.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace quadtwist
{

namespace
{

void check_eta_ell(double eta, std::int64_t ell)
{
    if (!(eta > 1 && eta < 2)) {
        throw ParameterError("eta must lie in (1, 2)");
    }
    if (ell <= 0) {
        throw ParameterError("ell must be a positive integer");
    }
}

double ms_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::uint64_t poly_length(std::uint64_t big_d, double eta)
{
    double n = std::ceil(std::pow(static_cast<double>(big_d), eta) - 1e-9);
    if (n > 1e12) {
        throw BudgetError("polynomial length D^eta too large");
    }
    return static_cast<std::uint64_t>(n);
}

DirichletPoly::DirichletPoly(const ShiftSet &a, std::uint64_t n, const SmoothWeight &w) : n_(n), first_(1)
{
    if (n == 0) {
        throw ParameterError("polynomial length must be positive");
    }
    TauTable tau(a, n);
    coef_.assign(n + 1, 0);
    for (std::uint64_t k = 1; k <= n; k += 2) {
        double wk = w(static_cast<double>(k) / n);
        if (wk != 0) {
            coef_[k] = wk * tau[k] / std::sqrt(static_cast<double>(k));
        }
    }
    const Sieve &sv = shared_sieve(std::max<std::uint64_t>(n, 16));
    for (auto p : sv.primes()) {
        if (p > n) {
            break;
        }
        if (p > 2) {
            primes_.push_back(p);
        }
    }
}

Complex DirichletPoly::operator()(std::uint64_t d, std::int64_t ell, std::uint64_t *work) const
{
    if (ell % 2 == 0) {
        return 0;
    }
    auto disc = static_cast<std::int64_t>(8 * d);
    int chi_ell = kronecker(disc, ell);
    if (chi_ell == 0) {
        return 0;
    }
    const Sieve &sv = shared_sieve(std::max<std::uint64_t>(n_, 16));
    std::vector<std::int8_t> chi(n_ + 1, 0);
    for (auto p : primes_) {
        chi[p] = static_cast<std::int8_t>(kronecker(disc, p));
    }
    chi[1] = 1;
    Complex acc = coef_[1];
    for (std::uint64_t k = 3; k <= n_; k += 2) {
        std::uint32_t p = sv.lpf(k);
        if (p != k) {
            chi[k] = static_cast<std::int8_t>(chi[p] * chi[k / p]);
        }
        if (chi[k] != 0) {
            acc += static_cast<double>(chi[k]) * coef_[k];
        }
    }
    if (work) {
        *work += (n_ + 1) / 2;
    }
    return static_cast<double>(chi_ell) * acc;
}

Complex dirichlet_poly(const ShiftSet &a, std::uint64_t d, std::uint64_t n, std::int64_t ell, double ramp)
{
    return DirichletPoly(a, n, make_w(ramp))(d, ell);
}

EmpiricalRun empirical_average(const ShiftSet &a, std::uint64_t big_d, double eta, std::int64_t ell,
                               const EmpiricalOptions &opt)
{
    check_eta_ell(eta, ell);
    auto t0 = std::chrono::steady_clock::now();
    EmpiricalRun run;
    run.a = a;
    run.big_d = big_d;
    run.eta = eta;
    run.ell = ell;
    run.n = poly_length(big_d, eta);
    run.threads = resolve_threads(opt.threads);
    DiscriminantFamily fam = make_family(big_d);
    double est = static_cast<double>(fam.members.size()) * static_cast<double>(run.n) / 2;
    if (est > opt.budget) {
        throw BudgetError("empirical average needs about " + std::to_string(est) + " terms, budget " +
                          std::to_string(opt.budget));
    }
    std::vector<std::uint64_t> ds = fam.members;
    if (opt.order_seed != 0) {
        std::mt19937_64 rng(opt.order_seed);
        std::shuffle(ds.begin(), ds.end(), rng);
    }
    if (ell % 2 == 0 || ds.empty()) {
        run.elapsed_ms = ms_since(t0);
        return run;
    }
    DirichletPoly poly(a, run.n, make_w(opt.ramp));
    SmoothWeight psi = make_psi();
    std::vector<std::uint64_t> work(ds.size(), 0);
    std::vector<Complex> vals = parallel_map<Complex>(
        ds.size(),
        [&](std::size_t i) {
            std::uint64_t d = ds[i];
            return psi(static_cast<double>(d) / big_d) * poly(d, ell, &work[i]);
        },
        run.threads);
    run.value = tree_sum(vals);
    run.work = std::accumulate(work.begin(), work.end(), std::uint64_t{0});
    if (opt.keep_per_d) {
        run.d = ds;
        run.per_d = std::move(vals);
    }
    run.elapsed_ms = ms_since(t0);
    return run;
}

PoissonSide poisson_side_average(const ShiftSet &a, std::uint64_t big_d, double eta, std::int64_t ell, double y,
                                 std::int64_t k_limit, const EmpiricalOptions &opt)
{
    check_eta_ell(eta, ell);
    if (y < 1) {
        throw ParameterError("sieve parameter Y must be at least 1");
    }
    auto t0 = std::chrono::steady_clock::now();
    PoissonSide out;
    out.n = poly_length(big_d, eta);
    if (ell % 2 == 0) {
        return out;
    }
    // Terms with c^2 >= 2D vanish identically: no odd multiple of c^2 lies in (D, 2D).
    double c_top = std::min(y, std::sqrt(2.0 * big_d));
    auto c_max = static_cast<std::uint64_t>(std::floor(c_top));
    if (static_cast<double>(c_max * c_max) >= 2.0 * big_d && c_max > 0) {
        --c_max;
    }
    double est = 0;
    for (std::uint64_t c = 1; c <= c_max; c += 2) {
        est += 64.0 * 2 * c * c / big_d;
    }
    est *= static_cast<double>(out.n) * out.n * ell / 4;
    if (est > opt.budget) {
        throw BudgetError("Poisson-side average needs about " + std::to_string(est) + " terms, budget " +
                          std::to_string(opt.budget));
    }
    TauTable tau(a, out.n);
    SmoothWeight w = make_w(opt.ramp);
    std::vector<std::uint64_t> ns;
    for (std::uint64_t n = 1; n <= out.n; n += 2) {
        if (w(static_cast<double>(n) / out.n) != 0) {
            ns.push_back(n);
        }
    }
    GkEvaluator gk;
    std::vector<std::int64_t> kmax(ns.size(), 0);
    auto parts = parallel_map<std::pair<Complex, Complex>>(
        ns.size(),
        [&](std::size_t i) {
            std::uint64_t n = ns[i];
            std::uint64_t m = n * static_cast<std::uint64_t>(ell);
            std::vector<double> row = gk.row(m);
            double s = 0, s0 = 0;
            for (std::uint64_t c = 1; c <= c_max; c += 2) {
                int mu = mobius(c);
                if (mu == 0 || std::gcd(c, m) != 1) {
                    continue;
                }
                double x0 = static_cast<double>(big_d) / (2.0 * c * c * m);
                PoissonKSum ks = poisson_k_sum(row, x0, k_limit);
                kmax[i] = std::max(kmax[i], ks.k_max);
                s += mu * ks.total / (static_cast<double>(c) * c);
                s0 += mu * ks.k0 / (static_cast<double>(c) * c);
            }
            Complex coef = w(static_cast<double>(n) / out.n) * tau[n] / std::sqrt(static_cast<double>(n)) *
                           (static_cast<double>(big_d) / (2.0 * m));
            return std::make_pair(coef * s, coef * s0);
        },
        opt.threads);
    std::vector<Complex> tot(parts.size()), zero(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        tot[i] = parts[i].first;
        zero[i] = parts[i].second;
    }
    out.total = tree_sum(tot);
    out.k0 = tree_sum(zero);
    out.knonzero = out.total - out.k0;
    out.k_max = kmax.empty() ? 0 : *std::max_element(kmax.begin(), kmax.end());
    out.elapsed_ms = ms_since(t0);
    return out;
}

} // namespace quadtwist
