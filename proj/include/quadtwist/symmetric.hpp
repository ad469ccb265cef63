#ifndef QUADTWIST_SYMMETRIC_HPP
#define QUADTWIST_SYMMETRIC_HPP

#include <quadtwist/shifts.hpp>

#include <functional>
#include <span>
#include <vector>

namespace quadtwist
{

// prod_{i<j} (a_j - a_i); 1 for fewer than two points.
Complex vandermonde(std::span<const Complex> a);
// prod_r prod_s (z_r - a_s)
Complex cross_vandermonde(std::span<const Complex> z, std::span<const Complex> a);

// Circles enclosing the shifts; each shift lies in exactly one circle.
struct ContourSpec
{
    std::vector<Complex> centers;
    std::vector<double> radii;
    // Indices into the shift set enclosed by each circle.
    std::vector<std::vector<std::size_t>> members;
    int nodes = 256;

    // Radius min(0.05, gap/3) per center; shifts closer than merge_gap share one circle.
    static ContourSpec for_shifts(const ShiftSet &a, double merge_gap = 1e-4, int nodes = 256);
    // ContourError unless every shift is inside its own circle by a margin and outside all others.
    void validate(const ShiftSet &a) const;
};

struct CondenseOptions
{
    // Single-point circles contribute their residue exactly instead of by nodes.
    bool exact_singletons = true;
    // The sampler is symmetric in z (and separately in w): sum circle multisets only.
    bool symmetric = false;
};

using SingleSampler = std::function<Complex(std::span<const Complex> z)>;
using DoubleSampler = std::function<Complex(std::span<const Complex> z, std::span<const Complex> w)>;

// Sum over distinct ordered u in A^j of G(u) / Delta(u; A - u), evaluated as
// (-1)^{j(j-1)/2} (2 pi i)^{-j} times the contour integral of G(z) Delta(z)^2 / Delta(z; A).
// Finite when shifts coincide.
Complex condensed_sum_single(const SingleSampler &g, const ShiftSet &a, std::size_t j, const ContourSpec &spec,
                             const CondenseOptions &opt = {});

// Sum over distinct (u; v) covering A of F(u; v) / Delta(u; v), evaluated as (-1)^{k(k-1)/2} (2 pi i)^{-k}
// times the integral of F(z; w) Delta(z; w) Delta(z)^2 Delta(w)^2 / (Delta(z; A) Delta(w; A)).
Complex condensed_sum_double(const DoubleSampler &f, const ShiftSet &a, std::size_t j, const ContourSpec &spec,
                             const CondenseOptions &opt = {});

} // namespace quadtwist

#endif
