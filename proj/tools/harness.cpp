#include "harness.hpp"

#include <quadtwist/arith.hpp>
#include <quadtwist/empirical.hpp>
#include <quadtwist/gk.hpp>
#include <quadtwist/parallel.hpp>
#include <quadtwist/recipe.hpp>
#include <quadtwist/replay.hpp>
#include <quadtwist/series.hpp>
#include <quadtwist/special.hpp>
#include <quadtwist/symmetric.hpp>
#include <quadtwist/weights.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

namespace quadtwist::harness
{

namespace
{

using clock_type = std::chrono::steady_clock;

double elapsed_ms(clock_type::time_point t0)
{
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

double rel(Complex a, Complex b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

void add_check(Suite &s, const SuiteOptions &opt, std::string name, double value, double tol, std::string oracle)
{
    double t = opt.tolerance > 0 ? opt.tolerance : tol;
    s.checks.push_back({std::move(name), value, t, std::move(oracle), std::isfinite(value) && value < t});
}

Complex random_complex(std::mt19937_64 &rng, double re, double im)
{
    std::uniform_real_distribution<double> u(-1, 1);
    return {re * u(rng), im * u(rng)};
}

using LongComplex = std::complex<long double>;

std::vector<LongComplex> powers_long(const ShiftSet &a, long double p)
{
    std::vector<LongComplex> x;
    for (Complex v : a) {
        x.push_back(std::exp(-LongComplex(v) * std::log(p)));
    }
    return x;
}

std::vector<Complex> powers_of(const ShiftSet &a, double p)
{
    std::vector<Complex> x;
    for (Complex v : a) {
        x.push_back(std::exp(-v * std::log(p)));
    }
    return x;
}

// Left side after the k-sum in closed form (nu > 0, s = 0).
template <typename S>
FormalSeries<S> left_closed_form(const std::vector<S> &x, std::size_t alpha, int nu, int m)
{
    LocalSequences<S> q = series_T_U(x, alpha, 2 * m + 2);
    S xa = q.x_alpha;
    FormalSeries<S> even(m), odd(m);
    for (int n = 0; n <= m; ++n) {
        even[n] = q.big_t[2 * n];
        odd[n] = q.big_t[2 * n + 1];
    }
    FormalSeries<S> one_minus_z(m, {S(1), S(-1)});
    FormalSeries<S> z = FormalSeries<S>::monomial(m, S(1), 1);
    FormalSeries<S> inner(m);
    if (nu % 2 == 0) {
        inner = one_minus_z * even * (S(1) / (S(1) - xa * xa)) + z * odd * (S(1) / xa);
    } else {
        inner = even * (S(1) / xa) + one_minus_z * odd * (S(1) / (S(1) - xa * xa));
    }
    FormalSeries<S> ratio =
        FormalSeries<S>(m, {S(1) - xa * xa}) * FormalSeries<S>(m, {S(1), S(-1) / (xa * xa)}).inverse();
    return ratio * one_minus_z * inner;
}

void for_tuples(std::size_t k, std::size_t j, const std::function<void(const std::vector<std::size_t> &)> &fn)
{
    std::vector<std::size_t> t;
    std::vector<bool> used(k, false);
    std::function<void()> rec = [&] {
        if (t.size() == j) {
            fn(t);
            return;
        }
        for (std::size_t i = 0; i < k; ++i) {
            if (!used[i]) {
                used[i] = true;
                t.push_back(i);
                rec();
                t.pop_back();
                used[i] = false;
            }
        }
    };
    rec();
}

Complex direct_single(const SingleSampler &g, const ShiftSet &a, std::size_t j)
{
    Complex acc = 0;
    for_tuples(a.size(), j, [&](const std::vector<std::size_t> &t) {
        std::vector<Complex> u, rest;
        for (auto i : t) {
            u.push_back(a[i]);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::find(t.begin(), t.end(), i) == t.end()) {
                rest.push_back(a[i]);
            }
        }
        acc += g(u) / cross_vandermonde(u, rest);
    });
    return acc;
}

Complex direct_double(const DoubleSampler &f, const ShiftSet &a, std::size_t j)
{
    Complex acc = 0;
    for_tuples(a.size(), a.size(), [&](const std::vector<std::size_t> &t) {
        std::vector<Complex> u, v;
        for (std::size_t r = 0; r < t.size(); ++r) {
            (r < j ? u : v).push_back(a[t[r]]);
        }
        acc += f(u, v) / cross_vandermonde(u, v);
    });
    return acc;
}

Complex g_asym(std::span<const Complex> z)
{
    Complex r = 1;
    for (std::size_t i = 0; i < z.size(); ++i) {
        r *= std::exp(static_cast<double>(i + 1) * z[i]) + 0.5 * z[i] * z[i];
    }
    return r;
}

Complex g_sym(std::span<const Complex> z)
{
    Complex s = 0, p = 1;
    for (Complex x : z) {
        s += x;
        p *= 1.0 + x;
    }
    return std::exp(s) * p;
}

Complex f_asym(std::span<const Complex> z, std::span<const Complex> w)
{
    Complex r = 1;
    for (std::size_t i = 0; i < z.size(); ++i) {
        r *= std::cos(static_cast<double>(i + 1) * z[i]);
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        r *= 1.0 + static_cast<double>(i) * w[i];
    }
    return r;
}

ShiftSet separated_set(std::mt19937_64 &rng, std::size_t k)
{
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<Complex> v;
    while (v.size() < k) {
        Complex c(u(rng), u(rng));
        bool ok = true;
        for (Complex x : v) {
            ok = ok && std::abs(x - c) > 0.05;
        }
        if (ok) {
            v.push_back(c);
        }
    }
    return ShiftSet(v);
}

// sum over n = q m^2 (q the squarefree kernel of ell), (n, modulus) = 1, m <= m_max, of tau_B(n)/sqrt(n),
// with tau_B(p^e) = h_e(p^{-b}) from explicit power sums.
Complex direct_b(const ShiftSet &b, std::uint64_t ell, std::uint64_t modulus, const Sieve &sv, std::uint64_t m_max)
{
    std::uint64_t q = 1;
    for (const PrimePower &pp : factorize(ell).factors) {
        if (pp.exponent % 2 == 1) {
            q *= pp.prime;
        }
    }
    if (std::gcd(q, modulus) != 1) {
        return 0;
    }
    auto tau = [&](std::uint64_t p, int e) {
        std::vector<Complex> x = powers_of(b, static_cast<double>(p));
        std::vector<Complex> h(static_cast<std::size_t>(e) + 1, 0.0);
        h[0] = 1;
        for (Complex xi : x) {
            for (int i = 1; i <= e; ++i) {
                h[i] += xi * h[i - 1];
            }
        }
        return h[e];
    };
    Factorization qf = factorize(q);
    Complex acc = 0;
    for (std::uint64_t m = 1; m <= m_max; ++m) {
        if (std::gcd(m, modulus) != 1) {
            continue;
        }
        Factorization mf = sv.factorize(m);
        Complex t = 1;
        for (const PrimePower &pp : mf.factors) {
            int extra = q % pp.prime == 0 ? 1 : 0;
            t *= tau(pp.prime, 2 * pp.exponent + extra);
        }
        for (const PrimePower &pp : qf.factors) {
            if (m % pp.prime != 0) {
                t *= tau(pp.prime, 1);
            }
        }
        acc += t / (static_cast<double>(m) * std::sqrt(static_cast<double>(q)));
    }
    return acc;
}

std::string csv_complex(Complex z)
{
    return format_double(z.real()) + "," + format_double(z.imag());
}

} // namespace

bool Suite::pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
}

std::vector<Complex> parse_shifts(const std::string &text)
{
    std::vector<Complex> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        double re = 0;
        double im = 0;
        auto comma = item.find(',');
        try {
            std::size_t used = 0;
            re = std::stod(item.substr(0, comma), &used);
            if (comma != std::string::npos) {
                im = std::stod(item.substr(comma + 1));
            }
        } catch (const std::exception &) {
            throw ConfigError("cannot parse shift '" + item + "'");
        }
        out.emplace_back(re, im);
    }
    if (out.empty()) {
        throw ConfigError("empty shift list");
    }
    return out;
}

std::string format_shifts(const std::vector<Complex> &shifts)
{
    std::string out;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        if (i > 0) {
            out += ":";
        }
        out += format_double(shifts[i].real()) + "," + format_double(shifts[i].imag());
    }
    return out;
}

std::string format_double(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

int inversions(const std::vector<double> &gaps)
{
    int n = 0;
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        if (gaps[i + 1] > gaps[i]) {
            ++n;
        }
    }
    return n;
}

void validate(const RunConfig &cfg)
{
    static const std::vector<std::string> commands{"compare", "verify", "swap-decay", "poisson-check", "identities"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end()) {
        throw ConfigError("unknown command '" + cfg.command + "'");
    }
    for (Complex a : cfg.shifts) {
        if (!(std::abs(a.real()) < 0.25)) {
            throw ConfigError("shifts need |Re alpha| < 1/4");
        }
    }
    if (cfg.threads < 0) {
        throw ConfigError("threads must be nonnegative");
    }
    if (cfg.tolerance < 0) {
        throw ConfigError("tolerance must be nonnegative");
    }
    if (cfg.command == "compare") {
        if (!(cfg.eta > 1 && cfg.eta < 2)) {
            throw ConfigError("eta must lie in the open interval (1, 2)");
        }
        if (cfg.ell % 2 == 0) {
            throw ConfigError("ell must be odd");
        }
        if (cfg.big_d.empty() || std::any_of(cfg.big_d.begin(), cfg.big_d.end(), [](auto d) { return d < 2; })) {
            throw ConfigError("D grid must be nonempty with D >= 2");
        }
        if (!(cfg.a_line > 0 && cfg.a_line < 0.25)) {
            throw ConfigError("a-line must lie in (0, 1/4)");
        }
        if (cfg.max_swap > 1) {
            throw ConfigError("compare uses 0- and 1-swaps only (j <= 1)");
        }
        if (!(cfg.ramp > 0 && cfg.ramp < 1)) {
            throw ConfigError("ramp must lie in (0, 1)");
        }
        if (cfg.prime_cutoff < 100) {
            throw ConfigError("prime cutoff must be at least 100");
        }
    }
    if (cfg.command == "swap-decay") {
        if (cfg.max_swap > cfg.shifts.size()) {
            throw ConfigError("swap order j exceeds |A|");
        }
        if (cfg.ell % 2 == 0) {
            throw ConfigError("ell must be odd");
        }
        if (cfg.points < 3) {
            throw ConfigError("swap-decay needs at least 3 grid points");
        }
        if (!(cfg.a_line > 0 && cfg.a_line < 0.25)) {
            throw ConfigError("a-line must lie in (0, 1/4)");
        }
    }
    if (cfg.command == "poisson-check") {
        if (cfg.big_d.empty() || cfg.moduli.empty()) {
            throw ConfigError("poisson-check needs D and m lists");
        }
        for (auto m : cfg.moduli) {
            if (m == 0 || m % 2 == 0) {
                throw ConfigError("moduli must be odd and positive");
            }
        }
        if (cfg.k_limit < 1) {
            throw ConfigError("K limit must be positive");
        }
    }
    if (cfg.command == "identities" && cfg.order < 3) {
        throw ConfigError("order M must be at least 3");
    }
}

nlohmann::ordered_json config_json(const RunConfig &cfg)
{
    nlohmann::ordered_json j;
    j["command"] = cfg.command;
    nlohmann::ordered_json sh = nlohmann::ordered_json::array();
    for (Complex a : cfg.shifts) {
        sh.push_back({a.real(), a.imag()});
    }
    j["shifts"] = sh;
    j["big_d"] = cfg.big_d;
    j["eta"] = cfg.eta;
    j["ell"] = cfg.ell;
    j["a_line"] = cfg.a_line;
    j["ramp"] = cfg.ramp;
    j["prime_cutoff"] = cfg.prime_cutoff;
    j["y"] = cfg.y;
    j["k_limit"] = cfg.k_limit;
    j["order"] = cfg.order;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["out"] = cfg.out;
    j["max_swap"] = cfg.max_swap;
    j["moduli"] = cfg.moduli;
    j["s_im"] = cfg.s_im;
    j["points"] = cfg.points;
    j["tolerance"] = cfg.tolerance;
    j["budget"] = cfg.budget;
    j["timing"] = cfg.timing;
    return j;
}

nlohmann::ordered_json report_json(const Report &r)
{
    nlohmann::ordered_json j;
    j["config"] = config_json(r.config);
    nlohmann::ordered_json res = nlohmann::ordered_json::array();
    for (const Quantity &q : r.results) {
        nlohmann::ordered_json e;
        e["name"] = q.name;
        e["value"] = {q.value.real(), q.value.imag()};
        e["oracle"] = {q.oracle.real(), q.oracle.imag()};
        e["oracle_name"] = q.oracle_name;
        e["relative_gap"] = q.gap;
        e["tolerance"] = q.tolerance;
        e["truncation"] = q.truncation;
        e["pass"] = q.pass;
        res.push_back(e);
    }
    j["results"] = res;
    j["timings"] = r.timings;
    j["pass"] = r.pass;
    return j;
}

Report cmd_compare(const RunConfig &cfg)
{
    validate(cfg);
    Report rep;
    rep.config = cfg;
    ShiftSet a(cfg.shifts);
    std::vector<std::uint64_t> ds = cfg.big_d;
    std::sort(ds.begin(), ds.end());

    auto t0 = clock_type::now();
    RecipeOptions ro;
    ro.a_line = cfg.a_line;
    ro.ramp = cfg.ramp;
    ro.b.prime_cutoff = cfg.prime_cutoff;
    ro.threads = cfg.threads;
    std::vector<RecipeTermSet> rec = recipe_predictions(a, ds, cfg.eta, cfg.ell, cfg.max_swap, ro);
    double recipe_ms = elapsed_ms(t0);

    EmpiricalOptions eo;
    eo.ramp = cfg.ramp;
    eo.threads = cfg.threads;
    eo.budget = cfg.budget;

    double tol = cfg.tolerance > 0 ? cfg.tolerance : 0.15;
    std::ostringstream csv;
    csv << "D,S_empirical_re,S_empirical_im,S_recipe_re,S_recipe_im,rel_gap,runtime_ms\r\n";
    std::vector<double> gaps;
    nlohmann::ordered_json per_d = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto te = clock_type::now();
        EmpiricalRun emp = empirical_average(a, ds[i], cfg.eta, cfg.ell, eo);
        double ms = elapsed_ms(te);
        double gap = rel(emp.value, rec[i].total);
        gaps.push_back(gap);
        double shown = cfg.timing ? ms : 0.0;
        csv << ds[i] << "," << csv_complex(emp.value) << "," << csv_complex(rec[i].total) << "," << format_double(gap)
            << "," << format_double(shown) << "\r\n";
        Quantity q;
        q.name = "S_A(D=" + std::to_string(ds[i]) + ")";
        q.value = emp.value;
        q.oracle = rec[i].total;
        q.oracle_name = "recipe_prediction (j <= " + std::to_string(cfg.max_swap) + ")";
        q.gap = gap;
        q.tolerance = tol;
        q.truncation = rec[i].truncation;
        q.pass = true;
        rep.results.push_back(q);
        per_d.push_back({{"D", ds[i]}, {"empirical_ms", shown}});
    }
    bool ok = !gaps.empty() && gaps.back() < tol && inversions(gaps) <= 1;
    if (!rep.results.empty()) {
        rep.results.back().pass = gaps.back() < tol;
    }
    Quantity trend;
    trend.name = "gap inversions across D";
    trend.value = inversions(gaps);
    trend.oracle = 1;
    trend.oracle_name = "at most one inversion";
    trend.tolerance = 1;
    trend.pass = inversions(gaps) <= 1;
    rep.results.push_back(trend);
    rep.pass = ok;
    rep.csv = csv.str();
    rep.timings["recipe_ms"] = cfg.timing ? recipe_ms : 0.0;
    rep.timings["per_d"] = per_d;
    return rep;
}

DecayFit fit_swap_decay(const std::vector<Complex> &shifts, Complex s, std::size_t j, std::int64_t ell, double d_lo,
                        double d_hi, int points)
{
    ShiftSet a(shifts);
    DecayFit fit;
    const Sieve &sv = shared_sieve(static_cast<std::uint64_t>(2 * d_hi) + 100);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < points; ++i) {
        double target = d_lo * std::pow(d_hi / d_lo, static_cast<double>(i) / (points - 1));
        auto d = static_cast<std::uint64_t>(std::llround(target)) | 1;
        while (!sv.is_prime(d) || std::gcd(d, static_cast<std::uint64_t>(std::llabs(ell))) != 1) {
            d += 2;
        }
        double m = std::abs(jswap_magnitude(a, s, d, ell, j));
        fit.d.push_back(d);
        fit.magnitude.push_back(m);
        double x = std::log(static_cast<double>(d));
        double y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = points;
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

Report cmd_swap_decay(const RunConfig &cfg)
{
    validate(cfg);
    Report rep;
    rep.config = cfg;
    double tol = cfg.tolerance > 0 ? cfg.tolerance : 0.05;
    Complex s(cfg.a_line, cfg.s_im);
    DecayFit fit = fit_swap_decay(cfg.shifts, s, cfg.max_swap, cfg.ell, 1e3, 1e5, cfg.points);
    std::ostringstream csv;
    csv << "d,jswap_magnitude\r\n";
    for (std::size_t i = 0; i < fit.d.size(); ++i) {
        csv << fit.d[i] << "," << format_double(fit.magnitude[i]) << "\r\n";
    }
    double predicted = -static_cast<double>(cfg.max_swap) * cfg.a_line;
    Quantity q;
    q.name = "fitted d-exponent (j=" + std::to_string(cfg.max_swap) + ")";
    q.value = fit.exponent;
    q.oracle = predicted;
    q.oracle_name = "-j sigma trend";
    q.gap = std::abs(fit.exponent - predicted);
    q.tolerance = tol;
    q.pass = q.gap < tol;
    rep.results.push_back(q);
    rep.pass = q.pass;
    rep.csv = csv.str();
    return rep;
}

Report cmd_poisson_check(const RunConfig &cfg)
{
    validate(cfg);
    Report rep;
    rep.config = cfg;
    double tol = cfg.tolerance > 0 ? cfg.tolerance : 1e-6;
    std::ostringstream csv;
    csv << "D,m,lhs,rhs,rel_gap,k_max\r\n";
    rep.pass = true;
    for (std::uint64_t big_d : cfg.big_d) {
        double y = cfg.y > 0 ? cfg.y : 4 * std::sqrt(2.0 * static_cast<double>(big_d));
        for (std::uint64_t m : cfg.moduli) {
            PoissonCheck pc = poisson_check(big_d, m, y, cfg.k_limit);
            double gap = rel(pc.rhs, pc.lhs);
            csv << big_d << "," << m << "," << format_double(pc.lhs) << "," << format_double(pc.rhs) << ","
                << format_double(gap) << "," << pc.k_max << "\r\n";
            Quantity q;
            q.name = "Poisson D=" + std::to_string(big_d) + " m=" + std::to_string(m);
            q.value = pc.rhs;
            q.oracle = pc.lhs;
            q.oracle_name = "direct character sum";
            q.gap = gap;
            q.tolerance = tol;
            q.pass = gap < tol;
            rep.pass = rep.pass && q.pass;
            rep.results.push_back(q);
        }
    }
    rep.csv = csv.str();
    return rep;
}

namespace
{

Report suites_report(const RunConfig &cfg, const std::vector<Suite> &suites)
{
    Report rep;
    rep.config = cfg;
    rep.pass = true;
    std::ostringstream csv;
    csv << "suite,check,value,tolerance,pass\r\n";
    for (const Suite &s : suites) {
        for (const Check &c : s.checks) {
            csv << s.name << ",\"" << c.name << "\"," << format_double(c.value) << "," << format_double(c.tolerance)
                << "," << (c.pass ? 1 : 0) << "\r\n";
            Quantity q;
            q.name = s.name + ": " + c.name;
            q.value = c.value;
            q.oracle = 0;
            q.oracle_name = c.oracle;
            q.gap = c.value;
            q.tolerance = c.tolerance;
            q.pass = c.pass;
            rep.results.push_back(q);
            rep.pass = rep.pass && c.pass;
        }
        rep.timings[s.name + "_ms"] = cfg.timing ? s.runtime_ms : 0.0;
    }
    rep.csv = csv.str();
    return rep;
}

} // namespace

Report cmd_verify(const RunConfig &cfg)
{
    validate(cfg);
    SuiteOptions so{.seed = cfg.seed, .tolerance = cfg.tolerance, .order = cfg.order};
    std::vector<Suite> suites;
    suites.push_back(suite_poisson(so));
    suites.push_back(suite_local_identities(so));
    suites.push_back(suite_contours(so));
    suites.push_back(suite_replay(so));
    return suites_report(cfg, suites);
}

Report cmd_identities(const RunConfig &cfg)
{
    validate(cfg);
    SuiteOptions so{.seed = cfg.seed, .tolerance = cfg.tolerance, .order = cfg.order};
    return suites_report(cfg, {suite_local_identities(so)});
}

Report dispatch(const RunConfig &cfg)
{
    if (cfg.command == "compare") {
        return cmd_compare(cfg);
    }
    if (cfg.command == "verify") {
        return cmd_verify(cfg);
    }
    if (cfg.command == "swap-decay") {
        return cmd_swap_decay(cfg);
    }
    if (cfg.command == "poisson-check") {
        return cmd_poisson_check(cfg);
    }
    if (cfg.command == "identities") {
        return cmd_identities(cfg);
    }
    validate(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

Suite suite_poisson(const SuiteOptions &opt)
{
    Suite s{"gk_poisson", {}, 0};
    auto t0 = clock_type::now();
    double worst = 0;
    for (std::uint64_t big_d : {200, 500}) {
        double y = 4 * std::sqrt(2.0 * static_cast<double>(big_d));
        for (std::uint64_t m : {1, 3, 9, 15, 45}) {
            PoissonCheck pc = poisson_check(big_d, m, y);
            worst = std::max(worst, rel(pc.rhs, pc.lhs));
        }
    }
    add_check(s, opt, "Poisson formula, D in {200,500}, m in {1,3,9,15,45}", worst, 1e-6, "direct character sum");
    s.runtime_ms = elapsed_ms(t0);
    return s;
}

Suite suite_local_identities(const SuiteOptions &opt)
{
    Suite s{"formal_series", {}, 0};
    auto t0 = clock_type::now();
    std::mt19937_64 rng(opt.seed * 7919 + 41);
    int m = opt.order;
    double worst34 = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t k = 2 + trial % 2;
        std::vector<Complex> v;
        for (std::size_t i = 0; i < k; ++i) {
            v.push_back(random_complex(rng, 0.2, 0.5));
        }
        ShiftSet a(v);
        Complex sv = random_complex(rng, 0.15, 2.0);
        for (std::uint64_t p : {3ULL, 5ULL, 7ULL}) {
            for (int nu = 0; nu <= 3; ++nu) {
                worst34 = std::max(worst34, verify_identity34(a, trial % k, sv, p, nu, m).residual);
            }
        }
    }
    add_check(s, opt, "identity3/identity4, 50 draws, p in {3,5,7}, nu in 0..3", worst34, 1e-9,
              "series equality");

    double worst0 = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t k = 1 + trial % 4;
        std::vector<Complex> v;
        for (std::size_t i = 0; i < k; ++i) {
            v.push_back(random_complex(rng, 0.2, 0.5));
        }
        ShiftSet a(v);
        for (std::uint64_t p : {3ULL, 5ULL, 7ULL}) {
            worst0 = std::max(worst0, verify_identity0(a, trial % k, p, m).residual);
        }
    }
    add_check(s, opt, "identity0, 20 draws, p in {3,5,7}", worst0, 1e-10, "series equality");

    double s_red = 0;
    double closed = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> v;
        for (int i = 0; i < 2 + trial % 2; ++i) {
            v.push_back(random_complex(rng, 0.2, 0.5));
        }
        ShiftSet a(v);
        Complex sv = random_complex(rng, 0.15, 1.0);
        for (long double p : {3.0L, 5.0L, 7.0L}) {
            std::vector<LongComplex> x = powers_long(a, p);
            std::vector<LongComplex> xs = powers_long(a.shifted(sv), p);
            LongComplex sp = std::exp(-LongComplex(sv) * std::log(p));
            for (int nu = 0; nu <= 3; ++nu) {
                auto with_s = verify_identity34(x, 0, sp, nu, m);
                auto reduced = verify_identity34(xs, 0, LongComplex(1), nu, m);
                s_red = std::max(s_red, series_residual(with_s.lhs, reduced.lhs));
                s_red = std::max(s_red, series_residual(with_s.rhs, reduced.rhs));
                if (nu > 0) {
                    closed = std::max(closed, series_residual(reduced.lhs, left_closed_form(xs, 0, nu, m)));
                }
            }
        }
    }
    add_check(s, opt, "s-reduction (A, s) against (A_s, 0)", s_red, 1e-12, "series equality");
    add_check(s, opt, "c-sum left side against closed k-sum forms", closed, 1e-12, "series equality");
    s.runtime_ms = elapsed_ms(t0);
    return s;
}

Suite suite_contours(const SuiteOptions &opt)
{
    Suite s{"symmetric_sums", {}, 0};
    auto t0 = clock_type::now();
    std::mt19937_64 rng(opt.seed * 104729 + 3);
    double worst_single = 0;
    double worst_double = 0;
    for (std::size_t k = 1; k <= 4; ++k) {
        for (int rep = 0; rep < 2; ++rep) {
            ShiftSet a = separated_set(rng, k);
            ContourSpec spec = ContourSpec::for_shifts(a, 1e-4, 64);
            for (std::size_t j = 0; j <= k; ++j) {
                if (j >= 1) {
                    worst_single =
                        std::max(worst_single, rel(condensed_sum_single(g_asym, a, j, spec), direct_single(g_asym, a, j)));
                }
                worst_double =
                    std::max(worst_double, rel(condensed_sum_double(f_asym, a, j, spec), direct_double(f_asym, a, j)));
            }
        }
    }
    add_check(s, opt, "condensed_sum_single vs distinct-shift sums, k <= 4", worst_single, 1e-8, "direct sum");
    add_check(s, opt, "condensed_sum_double vs distinct-shift sums, k <= 4", worst_double, 1e-8, "direct sum");

    auto single_at = [](double eps) {
        ShiftSet a{0.0, eps, 0.3};
        return condensed_sum_single(g_asym, a, 2, ContourSpec::for_shifts(a, 1e-4, 256));
    };
    Complex exact = single_at(0.0);
    double cont = std::abs(single_at(1e-5) - exact) / std::abs(exact);
    add_check(s, opt, "coincident-shift continuity, separation 1e-5", cont, 1e-4, "value at coincidence");
    ShiftSet dup{0.0, 0.0, 0.25, Complex(0.1, 0.2)};
    Complex n128 = condensed_sum_single(g_sym, dup, 2, ContourSpec::for_shifts(dup, 1e-4, 128));
    Complex n256 = condensed_sum_single(g_sym, dup, 2, ContourSpec::for_shifts(dup, 1e-4, 256));
    add_check(s, opt, "coincident-shift node doubling 128 -> 256", std::abs(n128 - n256) / std::abs(n256), 1e-10,
              "Cauchy integral at doubled nodes");
    s.runtime_ms = elapsed_ms(t0);
    return s;
}

Suite suite_replay(const SuiteOptions &opt)
{
    Suite s{"analytic_replay", {}, 0};
    auto t0 = clock_type::now();
    std::mt19937_64 rng(opt.seed * 15485863 + 5);
    std::uniform_real_distribution<double> uc(1.0, 10.0), ure(0.0, 0.4), uim(-1.0, 1.0);
    double worst_int = 0;
    for (int i = 0; i < 10; ++i) {
        Complex w(ure(rng), uim(rng));
        ReplayResult r = check_integral_identity(uc(rng), w, w.real() + 0.8);
        worst_int = std::max(worst_int, r.gap);
    }
    add_check(s, opt, "integral identity, 10 random (C, w)", worst_int, 1e-6, "adaptive quadrature in t");

    ShiftSet a{0.05, 0.1};
    double worst_uc = 0;
    for (auto [c, ell] : {std::pair<std::uint64_t, std::int64_t>{1, 1}, {3, 1}, {1, 9}, {5, 3}}) {
        worst_uc = std::max(worst_uc, check_uc_factorization(a, {4.5, 1.0}, {1.5, 0.3}, c, ell).gap);
    }
    add_check(s, opt, "U_c direct vs H_p factorization, (c, ell) in {(1,1),(3,1),(1,9),(5,3)}", worst_uc, 1e-6,
              "direct n,k double sum");
    double worst_res = std::max(check_residue_formula(a, 0.8, 0, 1, 1).gap,
                                check_residue_formula(a, {0.6, 2.5}, 1, 1, 3, {.prime_cutoff = 2000}).gap);
    add_check(s, opt, "residue formula vs numeric residue", worst_res, 1e-6, "trapezoid contour, r = 1e-2");
    double worst_fe = std::max(check_func_eq_rewrite(a, {0.1, 2.0}, 0, 1).gap,
                               check_func_eq_rewrite(a, {0.1, -4.0}, 1, 3).gap);
    add_check(s, opt, "functional-equation rewrite", worst_fe, 1e-6, "constituents summed over c <= 1000");
    MobiusCheck mb = check_small_mobius(100'000, 15, 300);
    add_check(s, opt, "small Mobius sum gap / bound scale (D=1e5, m=15, Y=300)", mb.gap / mb.bound_scale, 10.0,
              "direct squarefree sum");
    ReplayResult da = check_d_average_extraction({0.1, 0.15}, 0.2, 1, 2000, 1.5);
    add_check(s, opt, "d-average extraction (D=2000)", da.gap, 1e-5, "direct d-sum");
    std::uniform_real_distribution<double> sre(0.05, 0.2), sim(-20, 20);
    double worst_x = 0;
    double worst_refl = 0;
    for (int i = 0; i < 100; ++i) {
        Complex u(sre(rng) + 0.1 * uim(rng) / 2, sim(rng));
        worst_x = std::max(worst_x, identity_x_gap(u));
        worst_refl = std::max(worst_refl, zeta2_reflection_gap(2.0 * u));
    }
    add_check(s, opt, "X(1-u) chi(2u) = 4^{-u} chi(1/2+u), 100 random points", worst_x, 1e-10, "gamma identities");
    add_check(s, opt, "zeta^[2] reflection, 100 random points", worst_refl, 1e-10, "functional equation");
    s.runtime_ms = elapsed_ms(t0);
    return s;
}

Suite suite_b_continuation(const SuiteOptions &opt)
{
    Suite s{"b_continuation", {}, 0};
    auto t0 = clock_type::now();
    std::mt19937_64 rng(opt.seed * 32452843 + 7);
    const std::uint64_t m_max = 2'000'000;
    const Sieve &sv = shared_sieve(m_max);
    const std::uint64_t ells[] = {1, 3, 5, 9, 15, 45};
    const std::uint64_t mods[] = {1, 2, 6, 10};
    std::uniform_real_distribution<double> re(0.7, 1.0), im(-2, 2);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> v;
        for (int i = 0; i < 1 + trial % 3; ++i) {
            v.emplace_back(re(rng), im(rng));
        }
        ShiftSet b(v);
        std::uint64_t ell = ells[trial % 6];
        std::uint64_t mod = mods[(trial / 2) % 4];
        Complex direct = direct_b(b, ell, mod, sv, m_max);
        Complex val = b_series(b, static_cast<std::int64_t>(ell), mod).value;
        worst = std::max(worst, direct == 0.0 ? std::abs(val) : rel(val, direct));
    }
    add_check(s, opt, "b_series vs square-indexed sums, 20 random sets", worst, 1e-5, "direct sum to m <= 2e6");

    // sum_{(d, ell)=1} mu^2(2d) d^{-w} B^{(2d)} against B-tilde_(w) zeta^[2](w)/zeta^[2](2w), both ways.
    const std::uint64_t d_max = 1'000'000;
    const Sieve &dv = shared_sieve(d_max);
    struct Case
    {
        ShiftSet b;
        std::int64_t ell;
        Complex w;
    };
    const Case cases[] = {
        {ShiftSet{0.1, Complex(0.2, 1)}, 1, Complex(2.2, 0)},
        {ShiftSet{Complex(0.05, -2), Complex(-0.1, 0.5)}, 3, Complex(2.5, 3)},
        {ShiftSet{0.3, 0.15, Complex(0.02, 4)}, 15, Complex(2.3, -1)},
    };
    double worst_gen = 0;
    for (const Case &c : cases) {
        BSeries base = b_series(c.b, c.ell, 2);
        Complex lhs = 0;
        for (std::uint64_t d = 1; d <= d_max; d += 2) {
            if (std::gcd(static_cast<std::int64_t>(d), c.ell) != 1) {
                continue;
            }
            Factorization f = dv.factorize(d);
            bool sf = std::all_of(f.factors.begin(), f.factors.end(), [](const PrimePower &p) { return p.exponent == 1; });
            if (!sf) {
                continue;
            }
            Complex loc = 1;
            for (const PrimePower &p : f.factors) {
                loc /= b_local(c.b, p.prime, 0);
            }
            lhs += loc * std::exp(-c.w * std::log(static_cast<double>(d)));
        }
        lhs *= base.value;
        Complex rhs = b_tilde_w(c.b, c.ell, c.w).value * zeta2(c.w) / zeta2(2.0 * c.w);
        worst_gen = std::max({worst_gen, rel(lhs, rhs), rel(rhs, lhs)});
    }
    add_check(s, opt, "generating identity over d, two-sided", worst_gen, 1e-6, "d-sum to 1e6");
    s.runtime_ms = elapsed_ms(t0);
    return s;
}

} // namespace quadtwist::harness
