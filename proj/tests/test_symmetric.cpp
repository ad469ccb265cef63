#include <doctest.h>

#include <quadtwist/error.hpp>
#include <quadtwist/symmetric.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace quadtwist;

namespace
{

// Sum over ordered distinct index tuples of length j drawn from 0..k-1.
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

Complex f_exp(std::span<const Complex> z, std::span<const Complex> w)
{
    Complex s = 0;
    for (Complex x : z) {
        s += 2.0 * x;
    }
    for (Complex x : w) {
        s -= x;
    }
    return std::exp(s);
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

double rel(Complex a, Complex b)
{
    return std::abs(a - b) / std::max(1e-300, std::abs(b));
}

ShiftSet random_set(std::mt19937_64 &rng, std::size_t k)
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

} // namespace

TEST_CASE("Vandermonde products")
{
    std::vector<Complex> p{1.0, 2.0};
    CHECK(vandermonde(p) == Complex(1));
    std::vector<Complex> one{Complex(3, 1)};
    CHECK(vandermonde(one) == Complex(1));
    std::vector<Complex> rep{1.0, 2.0, 1.0};
    CHECK(vandermonde(rep) == Complex(0));
    std::vector<Complex> z{0.5}, a{1.0, 2.0};
    CHECK(cross_vandermonde(z, a) == Complex(0.75));
}

TEST_CASE("Contour spec")
{
    ShiftSet a{0.0, 0.3, Complex(0.3, 0.2)};
    ContourSpec spec = ContourSpec::for_shifts(a);
    CHECK(spec.centers.size() == 3);
    CHECK(spec.radii[0] == doctest::Approx(0.05));
    CHECK_NOTHROW(spec.validate(a));
    ContourSpec bad = spec;
    bad.nodes = 100;
    CHECK_THROWS_AS(bad.validate(a), ContourError);
    bad = spec;
    bad.radii[1] = 0.5;
    CHECK_THROWS_AS(bad.validate(a), ContourError);
    ShiftSet dup{0.1, 0.1, 0.4};
    ContourSpec merged = ContourSpec::for_shifts(dup);
    CHECK(merged.centers.size() == 2);
    CHECK_NOTHROW(merged.validate(dup));
}

TEST_CASE("Single condensed sums match direct sums")
{
    std::mt19937_64 rng(3);
    for (std::size_t k = 1; k <= 4; ++k) {
        for (int rep = 0; rep < 3; ++rep) {
            ShiftSet a = random_set(rng, k);
            for (std::size_t j = 1; j <= k; ++j) {
                ContourSpec spec = ContourSpec::for_shifts(a, 1e-4, 64);
                Complex ref = direct_single(g_asym, a, j);
                CHECK(rel(condensed_sum_single(g_asym, a, j, spec), ref) < 1e-8);
                if (k <= 3) {
                    CHECK(rel(condensed_sum_single(g_asym, a, j, spec, {.exact_singletons = false}), ref) < 1e-8);
                }
                Complex sym = condensed_sum_single(g_sym, a, j, spec, {.symmetric = true});
                CHECK(rel(sym, direct_single(g_sym, a, j)) < 1e-8);
            }
        }
    }
    ShiftSet a{0.0, 0.2, Complex(0.1, 0.3)};
    Complex ones = condensed_sum_single([](std::span<const Complex>) { return Complex(1); }, a, 1,
                                        ContourSpec::for_shifts(a));
    CHECK(std::abs(ones - direct_single([](std::span<const Complex>) { return Complex(1); }, a, 1)) < 1e-10);
}

TEST_CASE("Double condensed sums match direct sums")
{
    std::mt19937_64 rng(5);
    for (std::size_t k = 1; k <= 4; ++k) {
        for (int rep = 0; rep < 3; ++rep) {
            ShiftSet a = random_set(rng, k);
            ContourSpec spec = ContourSpec::for_shifts(a, 1e-4, 64);
            for (std::size_t j = 0; j <= k; ++j) {
                CHECK(rel(condensed_sum_double(f_asym, a, j, spec), direct_double(f_asym, a, j)) < 1e-8);
                if (k <= 3) {
                    CHECK(rel(condensed_sum_double(f_exp, a, j, spec, {.exact_singletons = false}),
                              direct_double(f_exp, a, j)) < 1e-8);
                }
                CHECK(rel(condensed_sum_double(f_exp, a, j, spec, {.symmetric = true}), direct_double(f_exp, a, j)) <
                      1e-8);
            }
        }
    }
    ShiftSet a{0.0, 0.1, Complex(0.05, 0.2)};
    Complex contour = condensed_sum_double(f_exp, a, 1, ContourSpec::for_shifts(a, 1e-4, 256),
                                           {.exact_singletons = false});
    CHECK(rel(contour, direct_double(f_exp, a, 1)) < 1e-8);
}

TEST_CASE("Condensed sums at coincident shifts")
{
    auto single_at = [](double eps, bool force_merge) {
        ShiftSet a{0.0, eps, 0.3};
        ContourSpec spec = ContourSpec::for_shifts(a, force_merge ? 1e-2 : 1e-4, 256);
        return condensed_sum_single(g_asym, a, 2, spec);
    };
    Complex exact = single_at(0.0, false);
    CHECK(std::isfinite(std::abs(exact)));
    CHECK(std::abs(single_at(1e-3, false) - exact) < 1e-2 * std::abs(exact));
    CHECK(std::abs(single_at(1e-5, false) - exact) < 1e-4 * std::abs(exact));
    CHECK(std::abs(single_at(1e-5, true) - exact) < 1e-4 * std::abs(exact));

    double gaps[] = {1e-2, 1e-3, 1e-4};
    Complex vals[3];
    for (int i = 0; i < 3; ++i) {
        vals[i] = single_at(gaps[i], false);
    }
    double d1 = std::abs(vals[0] - vals[1]);
    double d2 = std::abs(vals[1] - vals[2]);
    CHECK(d1 >= 5 * d2);
    CHECK(std::abs(vals[2] - exact) < d2);

    auto double_at = [](double eps) {
        ShiftSet a{0.0, eps, Complex(0.2, 0.1)};
        return condensed_sum_double(f_exp, a, 1, ContourSpec::for_shifts(a, 1e-4, 128));
    };
    Complex d0 = double_at(0.0);
    CHECK(std::abs(double_at(1e-4) - d0) < 1e-3 * std::abs(d0));
    CHECK(std::abs(double_at(1e-7) - d0) < 1e-6 * std::abs(d0));
}

TEST_CASE("Condensed sums: node doubling and relabeling")
{
    ShiftSet a{0.0, 0.0, 0.25, Complex(0.1, 0.2)};
    ContourSpec s64 = ContourSpec::for_shifts(a, 1e-4, 128);
    ContourSpec s128 = ContourSpec::for_shifts(a, 1e-4, 256);
    Complex v1 = condensed_sum_single(g_sym, a, 2, s64);
    Complex v2 = condensed_sum_single(g_sym, a, 2, s128);
    CHECK(std::abs(v1 - v2) < 1e-10 * std::abs(v2));
    ShiftSet b{Complex(0.1, 0.2), 0.25, 0.0, 0.0};
    Complex v3 = condensed_sum_single(g_sym, b, 2, ContourSpec::for_shifts(b, 1e-4, 256));
    CHECK(std::abs(v3 - v2) < 1e-12 * std::abs(v2));
    Complex d1 = condensed_sum_double(f_exp, a, 2, s64);
    Complex d2 = condensed_sum_double(f_exp, b, 2, ContourSpec::for_shifts(b, 1e-4, 128));
    CHECK(std::abs(d1 - d2) < 1e-12 * std::abs(d1));
    CHECK_THROWS_AS(condensed_sum_single(g_sym, a, 5, s64), ParameterError);
}
