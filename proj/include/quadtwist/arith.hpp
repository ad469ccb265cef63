#ifndef QUADTWIST_ARITH_HPP
#define QUADTWIST_ARITH_HPP

#include <cstdint>
#include <vector>

namespace quadtwist
{

struct PrimePower
{
    std::uint64_t prime;
    int exponent;
};

struct Factorization
{
    std::uint64_t value = 1;
    std::vector<PrimePower> factors;
};

inline constexpr std::uint64_t default_sieve_bound = 20'000'000;
inline constexpr std::uint64_t max_table_size = 200'000'000;

// Least-prime-factor sieve. Immutable after construction.
class Sieve
{
public:
    explicit Sieve(std::uint64_t limit);

    std::uint64_t limit() const { return limit_; }
    std::uint32_t lpf(std::uint64_t n) const;
    bool is_prime(std::uint64_t n) const;
    const std::vector<std::uint32_t> &primes() const { return primes_; }
    Factorization factorize(std::uint64_t n) const;

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> lpf_;
    std::vector<std::uint32_t> primes_;
};

// Sieved rows of mu, phi and the family flag mu^2(2n) = 1.
struct MultTable
{
    std::uint64_t limit = 0;
    std::vector<std::int8_t> mu;
    std::vector<std::uint32_t> phi;
    std::vector<std::uint8_t> in_family;

    bool squarefree(std::uint64_t n) const { return mu[n] != 0; }
};

MultTable sieve_mobius_phi(std::uint64_t limit);

// Shared sieve covering at least `limit`; rebuilt only when a larger bound is requested.
const Sieve &shared_sieve(std::uint64_t limit);

Factorization factorize(std::uint64_t n);

int kronecker(std::int64_t d, std::int64_t n);
bool is_fundamental_discriminant(std::int64_t d);
bool is_squarefree(std::uint64_t n);
bool is_perfect_square(std::uint64_t n);
int valuation(std::uint64_t n, std::uint64_t p);
int mobius(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);

struct DiscriminantFamily
{
    std::uint64_t big_d = 0;
    std::vector<std::uint64_t> members;
};

// Odd squarefree d in (D, 2D), i.e. mu^2(2d) = 1 and Psi(d/D) != 0.
DiscriminantFamily make_family(std::uint64_t big_d);

} // namespace quadtwist

#endif
