#include <quadtwist/replay.hpp>

#include <quadtwist/arith.hpp>
#include <quadtwist/gk.hpp>
#include <quadtwist/special.hpp>
#include <quadtwist/weights.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace quadtwist
{

namespace
{

std::vector<std::uint64_t> odd_prime_divisors(std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (const PrimePower &pp : factorize(n).factors) {
        if (pp.prime != 2) {
            out.push_back(pp.prime);
        }
    }
    return out;
}

void check_odd_coprime(std::uint64_t c, std::int64_t ell)
{
    if (ell == 0 || ell % 2 == 0) {
        throw ParameterError("ell must be odd");
    }
    if (c == 0 || c % 2 == 0 || !is_squarefree(c)) {
        throw ParameterError("c must be odd and squarefree");
    }
    if (std::gcd(c, static_cast<std::uint64_t>(std::llabs(ell))) != 1) {
        throw ParameterError("c and ell must be coprime");
    }
}

Complex two_ratio(Complex s, Complex w)
{
    Complex v = 2.0 * (s - w);
    return (1.0 - std::pow(2.0, 1.0 - v)) / (1.0 - std::pow(2.0, -v));
}

Complex z_a2(const ShiftSet &a, Complex x)
{
    Complex r = 1;
    for (Complex al : a) {
        r *= zeta2(x + al);
    }
    return r;
}

// Product of the local factors at the odd primes of c and ell relative to H_p(s,w;1),
// with the Z^[2] and zeta^[2] local factors removed as in v_c.
Complex removed_factor(const ShiftSet &a, Complex s, Complex w, std::uint64_t p)
{
    double lp = std::log(static_cast<double>(p));
    Complex r = 1.0 - std::exp(-lp * 2.0 * (s - w));
    for (Complex al : a) {
        r *= 1.0 - std::exp(-lp * (1.0 + w + al));
    }
    return r;
}

} // namespace

double relative_gap(Complex lhs, Complex rhs)
{
    double den = std::abs(rhs);
    double diff = std::abs(lhs - rhs);
    return den > 0 ? diff / den : diff;
}

MobiusCheck check_small_mobius(std::uint64_t big_d, std::uint64_t m, double y)
{
    if (m < 1 || y < 2 || big_d < 1) {
        throw ParameterError("check_small_mobius needs m >= 1, Y >= 2, D >= 1");
    }
    SmoothWeight psi = make_psi();
    auto cy = static_cast<std::uint64_t>(std::floor(y));
    MultTable tab = sieve_mobius_phi(std::max<std::uint64_t>(2 * big_d, cy) + 1);
    double csum = 0;
    for (std::uint64_t c = 1; c <= cy; ++c) {
        if (tab.mu[c] != 0 && std::gcd(c, m) == 1) {
            csum += tab.mu[c] / (static_cast<double>(c) * static_cast<double>(c));
        }
    }
    MobiusCheck out;
    double dd = static_cast<double>(big_d);
    out.lhs = dd * psi.mellin(1.0).real() * static_cast<double>(euler_phi(m)) / static_cast<double>(m) * csum;
    for (std::uint64_t d = big_d; d <= 2 * big_d; ++d) {
        if (tab.mu[d] != 0 && std::gcd(d, m) == 1) {
            out.rhs += psi(static_cast<double>(d) / dd);
        }
    }
    out.gap = std::abs(out.lhs - out.rhs);
    out.bound_scale = std::sqrt(dd) * std::log(y) + dd / y;
    return out;
}

ReplayResult check_integral_identity(double c, Complex w, double gamma, const IntegralOptions &opt)
{
    if (!(gamma > w.real())) {
        throw ParameterError("gamma must exceed Re w");
    }
    if (!(c > 0) || !(opt.n > 0)) {
        throw ParameterError("C and N must be positive");
    }
    SmoothWeight wt = make_w(opt.delta);
    SmoothWeight psi = make_psi();
    const TildePsiTable &tp = TildePsiTable::instance();
    double n = opt.n;
    auto f = [&](double t) -> Complex {
        return wt(t / n) * tp(c / t) * std::exp((w - 1.0) * std::log(t));
    };
    double scale = std::pow(n, std::max(w.real(), 0.0));
    ReplayResult out;
    out.lhs = integrate(f, opt.delta * n, n, QuadratureOptions{.abs_tol = 1e-14 * scale, .initial_panels = 8});

    GridOptions go;
    go.log_scale = std::abs(std::log(n)) + std::abs(std::log(c));
    go.poles = {w};
    TransformGrid g = vertical_line_grid(wt, gamma, opt.tail_tol, go);
    double ln = std::log(n);
    double lc = std::log(c);
    out.rhs = line_integral(g, [&](Complex s) {
        return psi.mellin(1.0 - s + w) * x_mellin(s - w) * std::exp(s * ln + (w - s) * lc);
    });
    out.gap = relative_gap(out.lhs, out.rhs);
    return out;
}

Complex h_local(const ShiftSet &a, Complex s, Complex w, std::uint64_t p, int nu)
{
    if (p < 3) {
        throw ParameterError("h_local needs an odd prime");
    }
    if (nu < 0) {
        throw ParameterError("nu must be nonnegative");
    }
    double lp = std::log(static_cast<double>(p));
    Complex v = 2.0 * (s - w);
    Complex geo = 1.0 / (1.0 - std::exp(-lp * v));
    auto kfac = [&](int m) -> Complex {
        // sum_k G_{p^{2k}}(p^m) p^{-kv}
        if (m % 2 == 0) {
            double phi = m == 0 ? 1.0 : (1.0 - 1.0 / static_cast<double>(p));
            return phi * std::exp(lp * (static_cast<double>(m) - 0.5 * m * v)) * geo;
        }
        return std::exp(lp * ((m - 0.5) - 0.5 * (m - 1) * v));
    };
    const int cap = 400;
    std::vector<Complex> xs;
    for (Complex al : a) {
        xs.push_back(std::exp(-lp * al));
    }
    std::vector<Complex> tau = complete_homogeneous(xs, cap);
    Complex acc = 0;
    int quiet = 0;
    for (int n = 0; n <= cap; ++n) {
        Complex term = tau[n] * std::exp(-lp * static_cast<double>(n) * (w + 1.5)) * kfac(n + nu);
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc)) {
            if (++quiet >= 3) {
                return acc;
            }
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceError("H_p series did not converge");
}

VcValue v_c(const ShiftSet &a, Complex s, Complex w, std::uint64_t c, std::int64_t ell, std::uint64_t prime_cutoff)
{
    check_odd_coprime(c, ell);
    if (prime_cutoff < 3) {
        throw ParameterError("prime cutoff must be at least 3");
    }
    auto uell = static_cast<std::uint64_t>(std::llabs(ell));
    std::vector<std::uint64_t> pc = odd_prime_divisors(c);
    std::vector<std::uint64_t> pl = odd_prime_divisors(uell);
    auto local = [&](std::uint64_t p) -> Complex {
        Complex rem = removed_factor(a, s, w, p);
        if (std::find(pc.begin(), pc.end(), p) != pc.end()) {
            return rem / (1.0 - std::exp(-std::log(static_cast<double>(p)) * 2.0 * (s - w)));
        }
        int nu = valuation(uell, p);
        return h_local(a, s, w, p, nu) * rem;
    };
    const Sieve &sv = shared_sieve(prime_cutoff);
    VcValue out;
    Complex prod = 1;
    double last_dev = 0;
    std::uint64_t last_p = 3;
    for (std::uint32_t p : sv.primes()) {
        if (p < 3) {
            continue;
        }
        if (p > prime_cutoff) {
            break;
        }
        Complex f = local(p);
        prod *= f;
        last_dev = std::abs(f - 1.0);
        last_p = p;
    }
    for (std::uint64_t p : pc) {
        if (p > prime_cutoff) {
            prod *= local(p) / (h_local(a, s, w, p, 0) * removed_factor(a, s, w, p));
        }
    }
    for (std::uint64_t p : pl) {
        if (p > prime_cutoff) {
            prod *= local(p) / (h_local(a, s, w, p, 0) * removed_factor(a, s, w, p));
        }
    }
    out.value = prod;
    double lp = std::log(static_cast<double>(last_p));
    double rho = last_dev > 0 ? std::max(1.05, -std::log(last_dev) / lp) : 2.0;
    out.tail = last_dev * static_cast<double>(last_p) / ((rho - 1.0) * lp);
    return out;
}

Complex uc_continued(const ShiftSet &a, Complex s, Complex w, std::uint64_t c, std::int64_t ell,
                     std::uint64_t prime_cutoff)
{
    return -two_ratio(s, w) * z_a2(a, 1.0 + w) * zeta2(2.0 * (s - w)) * v_c(a, s, w, c, ell, prime_cutoff).value;
}

UcEvaluation check_uc_factorization(const ShiftSet &a, Complex s, Complex w, std::uint64_t c, std::int64_t ell,
                                    const UcTruncation &t)
{
    check_odd_coprime(c, ell);
    double amax = 0;
    for (Complex al : a) {
        amax = std::max(amax, std::abs(al.real()));
    }
    if (!(w.real() > amax + t.margin) || !((s - w).real() > 0.5 + t.margin)) {
        throw DomainError("U_c double sum needs Re w > max|Re alpha| + margin and Re(s-w) > 1/2 + margin");
    }
    if (t.n_max < 1 || t.k_max < 1) {
        throw ParameterError("truncation radii must be positive");
    }
    UcEvaluation out;
    out.s = s;
    out.w = w;
    out.c = c;
    out.ell = ell;
    out.n_max = t.n_max;
    out.k_max = t.k_max;

    auto uell = static_cast<std::uint64_t>(std::llabs(ell));
    TauTable tau = build_tau_table(a, t.n_max);
    const Sieve &sv = shared_sieve(std::max<std::uint64_t>({t.n_max, t.k_max, uell, 3}));
    std::vector<Factorization> kf;
    std::vector<double> klog;
    for (std::uint64_t k = 1; k <= t.k_max; k += 2) {
        kf.push_back(sv.factorize(k));
        klog.push_back(std::log(static_cast<double>(k)));
    }
    Complex v = 2.0 * (s - w);
    std::vector<Complex> kpow;
    for (double lk : klog) {
        kpow.push_back(std::exp(-v * lk));
    }
    Complex total = 0;
    for (std::uint64_t n = 1; n <= t.n_max; n += 2) {
        if (std::gcd(n, c) != 1) {
            continue;
        }
        Factorization nl = sv.factorize(n);
        for (const PrimePower &pp : sv.factorize(uell).factors) {
            auto it = std::find_if(nl.factors.begin(), nl.factors.end(),
                                   [&](const PrimePower &q) { return q.prime == pp.prime; });
            if (it != nl.factors.end()) {
                it->exponent += pp.exponent;
            } else {
                nl.factors.push_back(pp);
            }
        }
        Complex inner = 0;
        for (std::size_t j = 0; j < kf.size(); ++j) {
            double g = 1;
            for (const PrimePower &q : nl.factors) {
                int kappa = 0;
                for (const PrimePower &r : kf[j].factors) {
                    if (r.prime == q.prime) {
                        kappa = r.exponent;
                    }
                }
                g *= g_square_prime_power(kappa, q.prime, q.exponent);
                if (g == 0) {
                    break;
                }
            }
            if (g != 0) {
                inner += g * kpow[j];
            }
        }
        double ln = std::log(static_cast<double>(n));
        total += tau[n] * std::exp(-(1.5 + w) * ln) * inner;
    }
    out.direct = -two_ratio(s, w) * total;

    double sig = w.real() - amax;
    double rv = v.real();
    double kk = static_cast<double>(a.size());
    double ln = std::log(static_cast<double>(t.n_max));
    double tail_n = std::pow(static_cast<double>(t.n_max), -sig) * std::pow(ln, kk - 1) / (std::tgamma(kk) * sig);
    double tail_k = std::pow(static_cast<double>(t.k_max), 1.0 - rv) / (2.0 * (rv - 1.0));
    double zsum = std::pow(zeta(Complex(1.0 + sig, 0)).real(), kk);
    out.direct_tail = std::abs(two_ratio(s, w)) * (tail_n * zeta(Complex(rv, 0)).real() + tail_k * zsum);

    VcValue vc = v_c(a, s, w, c, ell, t.prime_cutoff);
    out.v_c = vc.value;
    out.factored = -two_ratio(s, w) * z_a2(a, 1.0 + w) * zeta2(v) * vc.value;
    out.euler_tail = vc.tail * std::abs(out.factored);
    out.gap = relative_gap(out.direct, out.factored);
    return out;
}

Complex residue_formula(const ShiftSet &a, Complex s, std::size_t index, std::uint64_t c, std::int64_t ell,
                        std::uint64_t prime_cutoff)
{
    if (index >= a.size()) {
        throw ParameterError("shift index out of range");
    }
    Complex al = a[index];
    Complex x = 2.0 * (s + al);
    Complex ratio = (1.0 - std::pow(2.0, 1.0 - x)) / (1.0 - std::pow(2.0, -x));
    return -0.5 * ratio * z_a2(a.without(index), 1.0 - al) * zeta2(x) *
           v_c(a, s, -al, c, ell, prime_cutoff).value;
}

ReplayResult check_residue_formula(const ShiftSet &a, Complex s, std::size_t index, std::uint64_t c,
                                   std::int64_t ell, const ResidueOptions &opt)
{
    if (index >= a.size()) {
        throw ParameterError("shift index out of range");
    }
    if (opt.nodes < 8 || !(opt.radius > 0)) {
        throw ParameterError("residue contour needs radius > 0 and at least 8 nodes");
    }
    Complex w0 = -a[index];
    double r = opt.radius;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i != index && std::abs(a[i] - a[index]) < 2 * r) {
            throw DegeneracyError("another shift lies inside the residue contour");
        }
    }
    if (std::abs(2.0 * (s - w0) - 1.0) < 4 * r) {
        throw DegeneracyError("zeta^[2](2s-2w) pole inside the residue contour");
    }
    double period = pi / std::log(2.0);
    Complex dz = s - w0;
    double kim = std::round(dz.imag() / period);
    if (std::abs(dz - Complex(0, kim * period)) < 2 * r) {
        throw DegeneracyError("zero of 1 - 2^{2w-2s} inside the residue contour");
    }
    ReplayResult out;
    Complex acc = 0;
    for (int j = 0; j < opt.nodes; ++j) {
        Complex e = std::polar(r, 2 * pi * (j + 0.5) / opt.nodes);
        acc += uc_continued(a, s, w0 + e, c, ell, opt.prime_cutoff) * e;
    }
    out.lhs = acc / static_cast<double>(opt.nodes);
    out.rhs = residue_formula(a, s, index, c, ell, opt.prime_cutoff);
    out.gap = relative_gap(out.lhs, out.rhs);
    return out;
}

FuncEqCheck check_func_eq_rewrite(const ShiftSet &a, Complex s, std::size_t index, std::int64_t ell,
                                  const FuncEqOptions &opt)
{
    if (index >= a.size()) {
        throw ParameterError("shift index out of range");
    }
    check_odd_coprime(1, ell);
    if (opt.c_cutoff < 1) {
        throw ParameterError("c cutoff must be positive");
    }
    Complex al = a[index];
    Complex u = s + al;
    Complex w = -al;
    Complex v = 2.0 * (s - w);
    auto uell = static_cast<std::uint64_t>(std::llabs(ell));
    Complex v1 = v_c(a, s, w, 1, ell, opt.prime_cutoff).value;
    MultTable tab = sieve_mobius_phi(opt.c_cutoff + 1);
    Complex csum = 0;
    for (std::uint64_t c = 1; c <= opt.c_cutoff; c += 2) {
        if (tab.mu[c] == 0 || std::gcd(c, uell) != 1) {
            continue;
        }
        Complex vc = v1;
        for (std::uint64_t p : odd_prime_divisors(c)) {
            vc *= 1.0 / (1.0 - std::exp(-std::log(static_cast<double>(p)) * v)) / h_local(a, s, w, p, 0);
        }
        csum += static_cast<double>(tab.mu[c]) * std::exp((2.0 * u - 2.0) * std::log(static_cast<double>(c))) * vc;
    }
    Complex x = 2.0 * u;
    Complex ratio = (1.0 - std::pow(2.0, 1.0 - x)) / (1.0 - std::pow(2.0, -x));
    Complex zp = z_a2(a.without(index), 1.0 - al);
    Complex res = -0.5 * ratio * zp * zeta2(x) * csum;
    double l2 = std::log(2.0 * static_cast<double>(uell));
    double ll = std::log(static_cast<double>(uell));
    FuncEqCheck out;
    out.lhs = x_mellin(u) * res * std::exp((u - 1.0) * l2);
    Complex eight = opt.printed_power ? std::pow(8.0, u - 1.0) : std::pow(8.0, -u);
    out.rhs = eight * chi(0.5 + u) * std::exp((u - 1.0) * ll) * 0.5 * zeta2(1.0 - x) * zp * csum;
    out.gap = relative_gap(out.lhs, out.rhs);
    double e = 1.0 - 2.0 * u.real();
    double cc = static_cast<double>(opt.c_cutoff);
    out.c_tail = std::abs(v1) * std::pow(cc, -e) / e / std::max(std::abs(csum), 1e-300);
    return out;
}

double zeta2_reflection_gap(Complex x)
{
    Complex rhs = (1.0 - std::pow(2.0, -x)) / (1.0 - std::pow(2.0, x - 1.0)) * zeta2(1.0 - x) * chi(x);
    return relative_gap(zeta2(x), rhs);
}

double identity_x_gap(Complex u)
{
    return relative_gap(x_mellin(u) * chi(2.0 * u), std::pow(4.0, -u) * chi(0.5 + u));
}

Complex d_average_direct(const ShiftSet &b, Complex upsilon, std::int64_t ell, std::uint64_t big_d,
                         const DAverageOptions &opt)
{
    check_odd_coprime(1, ell);
    if (big_d < 1) {
        throw ParameterError("D must be positive");
    }
    SmoothWeight psi = make_psi();
    auto uell = static_cast<std::uint64_t>(std::llabs(ell));
    double dd = static_cast<double>(big_d);
    Complex acc = 0;
    for (std::uint64_t d = big_d | 1; d <= 2 * big_d; d += 2) {
        if (!is_squarefree(d) || std::gcd(d, uell) != 1) {
            continue;
        }
        double wgt = psi(static_cast<double>(d) / dd);
        if (wgt == 0) {
            continue;
        }
        acc += wgt * std::exp(-upsilon * std::log(static_cast<double>(d))) * b_series(b, ell, 2 * d, opt.b).value;
    }
    return acc;
}

Complex d_average_contour(const ShiftSet &b, Complex upsilon, std::int64_t ell, std::uint64_t big_d, double c_line,
                          const DAverageOptions &opt)
{
    check_odd_coprime(1, ell);
    if (big_d < 1) {
        throw ParameterError("D must be positive");
    }
    SmoothWeight psi = make_psi();
    GridOptions go;
    go.log_scale = std::log(static_cast<double>(big_d)) + std::log(2.0);
    go.poles = {1.0 - upsilon};
    TransformGrid g = vertical_line_grid(psi, c_line - upsilon.real(), opt.tail_tol, go);
    double ld = std::log(static_cast<double>(big_d));
    auto h = [&](Complex sp) {
        Complex z = sp + upsilon;
        return std::exp(sp * ld) * b_tilde_w(b, ell, z, opt.b).value * zeta2(z) / zeta2(2.0 * z);
    };
    return line_integral(g, h);
}

ReplayResult check_d_average_extraction(const ShiftSet &b, Complex upsilon, std::int64_t ell, std::uint64_t big_d,
                                        double c_line, const DAverageOptions &opt)
{
    if (!(c_line > 1)) {
        throw ParameterError("contour line must satisfy c > 1");
    }
    ReplayResult out;
    out.lhs = d_average_direct(b, upsilon, ell, big_d, opt);
    out.rhs = d_average_contour(b, upsilon, ell, big_d, c_line, opt);
    out.gap = relative_gap(out.lhs, out.rhs);
    return out;
}

} // namespace quadtwist
