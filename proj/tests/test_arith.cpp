#include <doctest.h>

#include <quadtwist/arith.hpp>
#include <quadtwist/error.hpp>

#include <map>
#include <numeric>
#include <random>
#include <set>

using namespace quadtwist;

namespace
{

std::vector<std::pair<std::uint64_t, int>> as_pairs(const Factorization &f)
{
    std::vector<std::pair<std::uint64_t, int>> out;
    for (auto pp : f.factors) {
        out.emplace_back(pp.prime, pp.exponent);
    }
    return out;
}

// Real characters of (Z/q)^* by extending from the subgroup of squares.
std::vector<std::vector<int>> real_characters(int q)
{
    std::vector<int> units;
    for (int a = 1; a < q; ++a) {
        if (std::gcd(a, q) == 1) {
            units.push_back(a);
        }
    }
    if (q == 1) {
        units = {0};
    }
    std::vector<std::vector<int>> chars;
    std::vector<int> base(q, 0);
    std::set<int> squares;
    for (int a : units) {
        squares.insert(static_cast<int>((1LL * a * a) % std::max(q, 1)));
    }
    for (int s : squares) {
        base[s] = 1;
    }
    chars.push_back(base);
    for (int a : units) {
        if (chars.front()[a] != 0) {
            continue;
        }
        std::vector<std::vector<int>> next;
        for (const auto &c : chars) {
            for (int v : {1, -1}) {
                std::vector<int> e = c;
                for (int h : units) {
                    if (c[h] != 0) {
                        e[(1LL * a * h) % q] = v * c[h];
                    }
                }
                next.push_back(e);
            }
        }
        chars = next;
    }
    return chars;
}

bool primitive(const std::vector<int> &chi, int q)
{
    for (int r = 1; r < q; ++r) {
        if (q % r != 0) {
            continue;
        }
        bool induced = true;
        for (int a = 1; a < q && induced; ++a) {
            if (std::gcd(a, q) == 1 && a % r == 1 % r && chi[a] != 1) {
                induced = false;
            }
        }
        if (induced) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("factorize small values")
{
    CHECK(as_pairs(factorize(12)) == std::vector<std::pair<std::uint64_t, int>>{{2, 2}, {3, 1}});
    CHECK(factorize(1).factors.empty());
    CHECK(as_pairs(factorize(45)) == std::vector<std::pair<std::uint64_t, int>>{{3, 2}, {5, 1}});
    CHECK_THROWS_AS(factorize(0), BoundError);
    CHECK_THROWS_AS(factorize(default_sieve_bound + 1), BoundError);
}

TEST_CASE("factorizations multiply back")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        std::uint64_t n = 1 + rng() % 5'000'000;
        auto f = factorize(n);
        std::uint64_t prod = 1;
        std::uint64_t last = 0;
        for (auto pp : f.factors) {
            CHECK(pp.prime > last);
            CHECK(pp.exponent >= 1);
            last = pp.prime;
            for (int e = 0; e < pp.exponent; ++e) {
                prod *= pp.prime;
            }
        }
        CHECK(prod == n);
    }
}

TEST_CASE("kronecker examples")
{
    CHECK(kronecker(8, 3) == -1);
    CHECK(kronecker(1, 7) == 1);
    CHECK(kronecker(-4, 3) == -1);
    CHECK(kronecker(5, 0) == 0);
    CHECK(kronecker(-1, 0) == 1);
    CHECK(kronecker(8, 5) == -1);
    CHECK(kronecker(8, 7) == 1);
}

TEST_CASE("kronecker is completely multiplicative in n")
{
    for (int d = -1000; d <= 1000; d += 7) {
        for (int a = -40; a <= 40; a += 3) {
            for (int b = -40; b <= 40; b += 5) {
                CHECK(kronecker(d, a * b) == kronecker(d, a) * kronecker(d, b));
            }
        }
    }
    std::mt19937 rng(11);
    for (int i = 0; i < 20000; ++i) {
        int d = static_cast<int>(rng() % 2001) - 1000;
        int a = static_cast<int>(rng() % 2001) - 1000;
        int b = static_cast<int>(rng() % 2001) - 1000;
        REQUIRE(kronecker(d, a * b) == kronecker(d, a) * kronecker(d, b));
    }
}

TEST_CASE("kronecker is periodic mod |d| for fundamental d")
{
    std::mt19937 rng(3);
    int checked = 0;
    for (int d = -3000; d <= 3000; ++d) {
        if (d == 0 || !is_fundamental_discriminant(d)) {
            continue;
        }
        int ad = std::abs(d);
        for (int i = 0; i < 20; ++i) {
            int n = 1 + static_cast<int>(rng() % 5000);
            int t = static_cast<int>(rng() % 50);
            CHECK(kronecker(d, n) == kronecker(d, n % ad + ad * t));
        }
        ++checked;
    }
    CHECK(checked > 1000);
}

TEST_CASE("fundamental discriminants")
{
    CHECK(is_fundamental_discriminant(5));
    CHECK(is_fundamental_discriminant(8));
    CHECK_FALSE(is_fundamental_discriminant(9));
    CHECK(is_fundamental_discriminant(1));
    CHECK(is_fundamental_discriminant(-4));
    CHECK(is_fundamental_discriminant(-3));
    CHECK_FALSE(is_fundamental_discriminant(4));
    CHECK_FALSE(is_fundamental_discriminant(12 * 4));
    CHECK(is_fundamental_discriminant(12));
    CHECK_THROWS_AS(is_fundamental_discriminant(0), ParameterError);
}

TEST_CASE("chi_d(-1) is the sign of d")
{
    for (int d = -10000; d <= 10000; ++d) {
        if (d == 0 || !is_fundamental_discriminant(d)) {
            continue;
        }
        REQUIRE(kronecker(d, -1) == (d > 0 ? 1 : -1));
    }
}

TEST_CASE("primitive quadratic characters are Kronecker symbols")
{
    for (int q = 3; q <= 500; ++q) {
        std::vector<int> fundamentals;
        for (int d : {q, -q}) {
            if (is_fundamental_discriminant(d)) {
                fundamentals.push_back(d);
            }
        }
        int primitive_count = 0;
        for (const auto &chi : real_characters(q)) {
            bool nontrivial = false;
            for (int a = 1; a < q; ++a) {
                nontrivial = nontrivial || chi[a] == -1;
            }
            if (!nontrivial || !primitive(chi, q)) {
                continue;
            }
            ++primitive_count;
            int matches = 0;
            for (int d : fundamentals) {
                bool same = true;
                for (int a = 1; a < q && same; ++a) {
                    if (std::gcd(a, q) == 1 && kronecker(d, a) != chi[a]) {
                        same = false;
                    }
                }
                matches += same;
            }
            CHECK_MESSAGE(matches == 1, "q = " << q);
        }
        CHECK_MESSAGE(primitive_count == static_cast<int>(fundamentals.size()), "q = " << q);
    }
}

TEST_CASE("mobius and phi tables match naive definitions")
{
    auto t = sieve_mobius_phi(20000);
    CHECK(t.mu[6] == 1);
    CHECK(t.phi[6] == 2);
    CHECK(t.mu[12] == 0);
    CHECK_FALSE(t.squarefree(12));
    CHECK(t.in_family[5] == 1);
    CHECK(t.in_family[6] == 0);
    CHECK(t.in_family[9] == 0);
    for (std::uint64_t n = 1; n <= 20000; ++n) {
        int mu = 1;
        std::uint64_t phi = n;
        std::uint64_t m = n;
        for (std::uint64_t p = 2; p * p <= m; ++p) {
            if (m % p == 0) {
                phi -= phi / p;
                m /= p;
                mu = -mu;
                if (m % p == 0) {
                    mu = 0;
                    while (m % p == 0) {
                        m /= p;
                    }
                }
            }
        }
        if (m > 1) {
            phi -= phi / m;
            mu = -mu;
        }
        REQUIRE(t.mu[n] == mu);
        REQUIRE(t.phi[n] == phi);
        REQUIRE(static_cast<bool>(t.in_family[n]) == (n % 2 == 1 && mu != 0));
    }
    CHECK_THROWS_AS(sieve_mobius_phi(max_table_size + 1), BoundError);
}

TEST_CASE("discriminant family")
{
    auto fam = make_family(10);
    CHECK(fam.members == std::vector<std::uint64_t>{11, 13, 15, 17, 19});
    CHECK(make_family(0).members.empty());
    auto big = make_family(500);
    for (auto d : big.members) {
        CHECK(d > 500);
        CHECK(d < 1000);
        CHECK(is_squarefree(2 * d));
    }
}
