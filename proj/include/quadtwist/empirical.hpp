#ifndef QUADTWIST_EMPIRICAL_HPP
#define QUADTWIST_EMPIRICAL_HPP

#include <quadtwist/shifts.hpp>
#include <quadtwist/weights.hpp>

#include <cstdint>
#include <vector>

namespace quadtwist
{

// N = ceil(D^eta).
std::uint64_t poly_length(std::uint64_t big_d, double eta);

// Coefficients W(n/N) tau_A(n) / sqrt(n) over odd n < N, evaluated against chi_{8d}.
class DirichletPoly
{
public:
    DirichletPoly(const ShiftSet &a, std::uint64_t n, const SmoothWeight &w);

    std::uint64_t length() const { return n_; }
    // P_A(chi_{8d}; ell); zero for even ell. `work` counts the terms summed.
    Complex operator()(std::uint64_t d, std::int64_t ell, std::uint64_t *work = nullptr) const;

private:
    std::uint64_t n_;
    std::uint64_t first_;
    std::vector<Complex> coef_;
    std::vector<std::uint32_t> primes_;
};

Complex dirichlet_poly(const ShiftSet &a, std::uint64_t d, std::uint64_t n, std::int64_t ell, double ramp = 0.1);

struct EmpiricalOptions
{
    double ramp = 0.1;
    int threads = 0;
    bool keep_per_d = false;
    // Nonzero: visit d in a seeded random order before the tree reduction.
    std::uint64_t order_seed = 0;
    // Upper bound on summed terms.
    double budget = 2e10;
};

struct EmpiricalRun
{
    ShiftSet a;
    std::uint64_t big_d = 0;
    double eta = 0;
    std::int64_t ell = 1;
    std::uint64_t n = 0;
    Complex value = 0;
    std::vector<std::uint64_t> d;
    std::vector<Complex> per_d;
    std::uint64_t work = 0;
    int threads = 1;
    double elapsed_ms = 0;
};

// sum over d of mu^2(2d) Psi(d/D) P_A(chi_{8d}; ell).
EmpiricalRun empirical_average(const ShiftSet &a, std::uint64_t big_d, double eta, std::int64_t ell,
                               const EmpiricalOptions &opt = {});

struct PoissonSide
{
    Complex total = 0;
    Complex k0 = 0;
    Complex knonzero = 0;
    std::uint64_t n = 0;
    std::int64_t k_max = 0;
    double elapsed_ms = 0;
};

// The same average after Poisson summation in d, sieve truncated at c <= Y.
PoissonSide poisson_side_average(const ShiftSet &a, std::uint64_t big_d, double eta, std::int64_t ell, double y,
                                 std::int64_t k_limit = 100'000'000, const EmpiricalOptions &opt = {});

} // namespace quadtwist

#endif
