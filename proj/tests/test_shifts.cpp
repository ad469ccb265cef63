#include <doctest.h>

#include <quadtwist/error.hpp>
#include <quadtwist/shifts.hpp>
#include <quadtwist/special.hpp>

#include <random>

using namespace quadtwist;

namespace
{

bool close(Complex a, Complex b, double rel)
{
    return std::abs(a - b) <= rel * std::max(1.0, std::abs(b));
}

// Dirichlet convolution oracle: tau_A(n) = sum over ordered factorizations n = n_1...n_k of prod n_i^{-alpha_i}.
Complex tau_convolution(const ShiftSet &a, std::uint64_t n, std::size_t i = 0)
{
    if (i + 1 == a.size()) {
        return std::exp(-a[i] * std::log(static_cast<double>(n)));
    }
    Complex acc = 0;
    for (std::uint64_t d = 1; d <= n; ++d) {
        if (n % d == 0) {
            acc += std::exp(-a[i] * std::log(static_cast<double>(d))) * tau_convolution(a, n / d, i + 1);
        }
    }
    return acc;
}

} // namespace

TEST_CASE("tau at prime powers")
{
    Complex alpha(0.07, 0.3);
    CHECK(close(tau_prime_power({alpha}, 5, 1), std::exp(-alpha * std::log(5.0)), 1e-15));
    CHECK(close(tau_prime_power({0, 0}, 2, 2), 3.0, 1e-15));
    ShiftSet a{Complex(0.1, 0.2), Complex(-0.05, 0), Complex(0.02, -0.1)};
    double lp = std::log(7.0);
    Complex expect = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        expect += std::exp(-2.0 * a[i] * lp);
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            expect += std::exp(-(a[i] + a[j]) * lp);
        }
    }
    CHECK(close(tau_prime_power(a, 7, 2), expect, 1e-14));
    CHECK_THROWS_AS(tau_prime_power(a, 7, -1), ParameterError);
}

TEST_CASE("tau table against the convolution oracle")
{
    auto ones = build_tau_table({0}, 100);
    for (std::uint64_t n = 1; n <= 100; ++n) {
        CHECK(close(ones[n], 1.0, 1e-15));
    }
    auto d2 = build_tau_table({0, 0}, 100);
    CHECK(close(d2[12], 6.0, 1e-15));
    auto t = build_tau_table({0.1, -0.1}, 100);
    double l2 = std::log(2.0), l3 = std::log(3.0), l6 = std::log(6.0);
    Complex six = std::exp(-0.1 * l6) + std::exp(0.1 * l6) + std::exp(-0.1 * l2 + 0.1 * l3)
                  + std::exp(0.1 * l2 - 0.1 * l3);
    CHECK(close(t[6], six, 1e-14));
    ShiftSet a{Complex(0.1, 0.2), Complex(-0.05, 0), Complex(0.02, -0.1)};
    auto ta = build_tau_table(a, 400);
    for (std::uint64_t n = 1; n <= 400; ++n) {
        REQUIRE(close(ta[n], tau_convolution(a, n), 1e-12));
    }
    CHECK(close(ta[1], 1.0, 0));
    CHECK_THROWS_AS(ta.at(401), BoundError);
}

TEST_CASE("tau table is multiplicative")
{
    ShiftSet a{Complex(0.03, 0.5), Complex(-0.1, 0.1), Complex(0.2, 0)};
    auto t = build_tau_table(a, 1'000'000);
    std::mt19937_64 rng(5);
    int done = 0;
    while (done < 1000) {
        std::uint64_t m = 1 + rng() % 1000;
        std::uint64_t n = 1 + rng() % 1000;
        if (std::gcd(m, n) != 1) {
            continue;
        }
        REQUIRE(close(t[m * n], t[m] * t[n], 1e-12));
        ++done;
    }
}

TEST_CASE("Dirichlet series approaches the zeta product")
{
    ShiftSet a{Complex(0.1, 1.0), Complex(-0.05, 0)};
    Complex target = zeta_products(a, 2.0).z_a;
    auto t = build_tau_table(a, 100000);
    double prev = 1;
    for (std::uint64_t big_n : {1000, 10000, 100000}) {
        Complex partial = 0;
        for (std::uint64_t n = 1; n <= big_n; ++n) {
            partial += t[n] / (static_cast<double>(n) * n);
        }
        double err = std::abs(partial - target);
        double bound = 2 * (std::log(static_cast<double>(big_n)) + 1) / std::pow(big_n, 0.95);
        CHECK(err < bound);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("conjugation-closed sets give real coefficients")
{
    ShiftSet a{Complex(0.05, 0.3), Complex(0.05, -0.3), Complex(0.1, 0)};
    CHECK(a.conjugation_closed());
    auto t = build_tau_table(a.shifted(0.2), 500);
    for (std::uint64_t n = 1; n <= 500; ++n) {
        CHECK(std::abs(t[n].imag()) < 1e-14);
    }
}

TEST_CASE("zeta products")
{
    auto z = zeta_products({}, 2.0);
    CHECK(close(z.zeta2, pi * pi / 8, 1e-14));
    CHECK(std::isinf(zeta_products({0.5}, 1.0).zeta2.real()));
    CHECK(close(zeta_products({0.5}, 1.0).z_a, zeta(1.5), 1e-15));
    CHECK(close(zeta_products({0.5}, 1.0).z_a2, (1 - std::pow(2.0, -1.5)) * zeta(1.5), 1e-15));
    CHECK_THROWS_AS(zeta_products({0.25}, Complex(0.75, 1e-9)), SingularityError);
    try {
        zeta_products({0.1, 0.25}, Complex(0.75, 0));
    } catch (const SingularityError &e) {
        CHECK(std::string(e.what()).find("0.25") != std::string::npos);
    }
}

TEST_CASE("swap sets")
{
    ShiftSet a{0.1, 0.2, 0.3};
    CHECK(swap_set(a, std::vector<std::size_t>{}).values() == a.values());
    ShiftSet ab{Complex(0.1, 0), Complex(0.2, 0)};
    auto s = swap_set(ab, ShiftSet{0.1});
    CHECK(s.values() == std::vector<Complex>{0.2, -0.1});
    CHECK(s.origin(1) == ShiftOrigin::negated);
    CHECK(s.size() == ab.size());
    // Involution as multisets.
    auto back = swap_set(s, ShiftSet{-0.1});
    auto v = back.values();
    auto w = ab.values();
    auto key = [](Complex x, Complex y) { return x.real() < y.real(); };
    std::sort(v.begin(), v.end(), key);
    std::sort(w.begin(), w.end(), key);
    CHECK(v == w);
    CHECK_THROWS_AS(swap_set(ab, ShiftSet{0.7}), ParameterError);
    CHECK_THROWS_AS(swap_set(ab, std::vector<std::size_t>{0, 0}), ParameterError);
    CHECK_THROWS_AS(ShiftSet({0.3}).check_domain(0.01), DomainError);
    CHECK_NOTHROW(ShiftSet({0.2, -0.2}).check_domain(0.01));
    CHECK(a.shifted(0.1)[0] == Complex(0.2, 0));
    CHECK(a.without(1).values() == std::vector<Complex>{0.1, 0.3});
}
