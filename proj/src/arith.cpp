#include <quadtwist/arith.hpp>
#include <quadtwist/error.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

namespace quadtwist
{

Sieve::Sieve(std::uint64_t limit) : limit_(limit)
{
    if (limit < 1 || limit > max_table_size) {
        throw BoundError("sieve limit " + std::to_string(limit) + " outside [1, "
                         + std::to_string(max_table_size) + "]");
    }
    lpf_.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (lpf_[i] == 0) {
            lpf_[i] = static_cast<std::uint32_t>(i);
            primes_.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes_) {
            std::uint64_t m = p * i;
            if (p > lpf_[i] || m > limit) {
                break;
            }
            lpf_[m] = p;
        }
    }
}

std::uint32_t Sieve::lpf(std::uint64_t n) const
{
    if (n < 2 || n > limit_) {
        throw BoundError("lpf argument " + std::to_string(n) + " outside sieve");
    }
    return lpf_[n];
}

bool Sieve::is_prime(std::uint64_t n) const
{
    return n >= 2 && n <= limit_ && lpf_[n] == n;
}

Factorization Sieve::factorize(std::uint64_t n) const
{
    if (n < 1 || n > limit_) {
        throw BoundError("cannot factor " + std::to_string(n) + " with sieve bound "
                         + std::to_string(limit_));
    }
    Factorization f;
    f.value = n;
    while (n > 1) {
        std::uint32_t p = lpf_[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.push_back({p, e});
    }
    return f;
}

MultTable sieve_mobius_phi(std::uint64_t limit)
{
    if (limit < 1 || limit > max_table_size) {
        throw BoundError("table limit " + std::to_string(limit) + " outside bound");
    }
    MultTable t;
    t.limit = limit;
    t.mu.assign(limit + 1, 1);
    t.phi.resize(limit + 1);
    for (std::uint64_t i = 0; i <= limit; ++i) {
        t.phi[i] = static_cast<std::uint32_t>(i);
    }
    t.mu[0] = 0;
    std::vector<std::uint8_t> composite(limit + 1, 0);
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (composite[p]) {
            continue;
        }
        for (std::uint64_t m = p; m <= limit; m += p) {
            if (m > p) {
                composite[m] = 1;
            }
            t.mu[m] = static_cast<std::int8_t>(-t.mu[m]);
            t.phi[m] -= t.phi[m] / p;
        }
        if (p <= limit / p) {
            for (std::uint64_t m = p * p; m <= limit; m += p * p) {
                t.mu[m] = 0;
            }
        }
    }
    t.in_family.assign(limit + 1, 0);
    for (std::uint64_t n = 1; n <= limit; n += 2) {
        t.in_family[n] = t.mu[n] != 0;
    }
    return t;
}

const Sieve &shared_sieve(std::uint64_t limit)
{
    static std::mutex mutex;
    static std::shared_ptr<const Sieve> sieve;
    static std::vector<std::shared_ptr<const Sieve>> retired;
    std::lock_guard<std::mutex> lock(mutex);
    if (!sieve || sieve->limit() < limit) {
        std::uint64_t size = std::max<std::uint64_t>(limit, 1 << 16);
        if (sieve) {
            size = std::max(size, std::min<std::uint64_t>(2 * sieve->limit(), max_table_size));
            retired.push_back(sieve);
        }
        sieve = std::make_shared<const Sieve>(size);
    }
    return *sieve;
}

namespace
{

Factorization trial_factor(std::uint64_t n)
{
    Factorization f;
    f.value = n;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            f.factors.push_back({p, e});
        }
    }
    if (n > 1) {
        f.factors.push_back({n, 1});
    }
    return f;
}

} // namespace

Factorization factorize(std::uint64_t n)
{
    if (n < 1 || n > default_sieve_bound) {
        throw BoundError("cannot factor " + std::to_string(n) + ": outside [1, "
                         + std::to_string(default_sieve_bound) + "]");
    }
    if (n <= (1u << 16)) {
        return shared_sieve(1 << 16).factorize(n);
    }
    return trial_factor(n);
}

int kronecker(std::int64_t a, std::int64_t n)
{
    if (n == 0) {
        return (a == 1 || a == -1) ? 1 : 0;
    }
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) {
            result = -result;
        }
    }
    if (n % 2 == 0) {
        if (a % 2 == 0) {
            return 0;
        }
        int v = 0;
        while (n % 2 == 0) {
            n /= 2;
            ++v;
        }
        std::int64_t r = ((a % 8) + 8) % 8;
        if ((v & 1) && (r == 3 || r == 5)) {
            result = -result;
        }
    }
    // Jacobi symbol (a/n) for odd positive n.
    std::int64_t b = n;
    std::int64_t x = a % b;
    if (x < 0) {
        x += b;
    }
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            std::int64_t r = b % 8;
            if (r == 3 || r == 5) {
                result = -result;
            }
        }
        std::swap(x, b);
        if (x % 4 == 3 && b % 4 == 3) {
            result = -result;
        }
        x %= b;
    }
    return b == 1 ? result : 0;
}

bool is_squarefree(std::uint64_t n)
{
    if (n == 0) {
        return false;
    }
    for (const auto &pp : factorize(n).factors) {
        if (pp.exponent > 1) {
            return false;
        }
    }
    return true;
}

bool is_fundamental_discriminant(std::int64_t d)
{
    if (d == 0) {
        throw ParameterError("discriminant must be nonzero");
    }
    if (d == 1) {
        return true;
    }
    std::int64_t r = ((d % 4) + 4) % 4;
    std::uint64_t ad = static_cast<std::uint64_t>(d < 0 ? -d : d);
    if (r == 1) {
        return is_squarefree(ad);
    }
    if (r == 0) {
        std::int64_t m = d / 4;
        std::int64_t rm = ((m % 4) + 4) % 4;
        return (rm == 2 || rm == 3) && is_squarefree(ad / 4);
    }
    return false;
}

bool is_perfect_square(std::uint64_t n)
{
    auto r = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return r * r == n;
}

int valuation(std::uint64_t n, std::uint64_t p)
{
    if (n == 0) {
        throw ParameterError("valuation of zero");
    }
    int v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

int mobius(std::uint64_t n)
{
    int m = 1;
    for (const auto &pp : factorize(n).factors) {
        if (pp.exponent > 1) {
            return 0;
        }
        m = -m;
    }
    return m;
}

std::uint64_t euler_phi(std::uint64_t n)
{
    std::uint64_t r = n;
    for (const auto &pp : factorize(n).factors) {
        r -= r / pp.prime;
    }
    return r;
}

DiscriminantFamily make_family(std::uint64_t big_d)
{
    DiscriminantFamily fam;
    fam.big_d = big_d;
    if (big_d == 0) {
        return fam;
    }
    std::uint64_t hi = 2 * big_d;
    const Sieve &sv = shared_sieve(std::max<std::uint64_t>(hi, 2));
    for (std::uint64_t d = big_d + 1; d < hi; ++d) {
        if (d % 2 == 0) {
            continue;
        }
        bool sf = true;
        for (const auto &pp : sv.factorize(d).factors) {
            if (pp.exponent > 1) {
                sf = false;
                break;
            }
        }
        if (sf) {
            fam.members.push_back(d);
        }
    }
    return fam;
}

} // namespace quadtwist
