#ifndef QUADTWIST_SHIFTS_HPP
#define QUADTWIST_SHIFTS_HPP

#include <quadtwist/quadrature.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace quadtwist
{

enum class ShiftOrigin { original, negated, shifted };

// Ordered multiset of complex shifts.
class ShiftSet
{
public:
    ShiftSet() = default;
    ShiftSet(std::vector<Complex> values);
    ShiftSet(std::initializer_list<Complex> values);

    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    Complex operator[](std::size_t i) const { return values_[i]; }
    ShiftOrigin origin(std::size_t i) const { return origins_[i]; }
    const std::vector<Complex> &values() const { return values_; }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    // A_s = {alpha + s}
    ShiftSet shifted(Complex s) const;
    // A' = A without the i-th entry.
    ShiftSet without(std::size_t i) const;
    ShiftSet with(Complex value, ShiftOrigin origin = ShiftOrigin::original) const;

    // |Re alpha| <= 1/4 - delta for every entry, else DomainError.
    void check_domain(double delta) const;
    double min_gap() const;
    bool conjugation_closed(double tol = 1e-14) const;

private:
    std::vector<Complex> values_;
    std::vector<ShiftOrigin> origins_;
};

// A - U + U^-, with U given by indices into A.
ShiftSet swap_set(const ShiftSet &a, const std::vector<std::size_t> &u);
// Same, with U given by values (matched as a multiset).
ShiftSet swap_set(const ShiftSet &a, const ShiftSet &u);

// h_0 .. h_{e_max} of the given variables.
std::vector<Complex> complete_homogeneous(std::span<const Complex> xs, int e_max);

// tau_A(p^e) = h_e(p^{-alpha_1}, ..., p^{-alpha_k})
Complex tau_prime_power(const ShiftSet &a, std::uint64_t p, int e);

class TauTable
{
public:
    TauTable(const ShiftSet &a, std::uint64_t limit);

    const ShiftSet &shifts() const { return shifts_; }
    std::uint64_t limit() const { return values_.size() - 1; }
    Complex operator[](std::uint64_t n) const;
    Complex at(std::uint64_t n) const;

private:
    ShiftSet shifts_;
    std::vector<Complex> values_;
};

TauTable build_tau_table(const ShiftSet &a, std::uint64_t limit);

struct ZetaProducts
{
    Complex z_a;   // prod zeta(s + alpha)
    Complex z_a2;  // prod zeta^[2](s + alpha)
    Complex zeta2; // zeta^[2](s)
};

ZetaProducts zeta_products(const ShiftSet &a, Complex s);

} // namespace quadtwist

#endif
