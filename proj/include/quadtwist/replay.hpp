#ifndef QUADTWIST_REPLAY_HPP
#define QUADTWIST_REPLAY_HPP

#include <quadtwist/recipe.hpp>
#include <quadtwist/shifts.hpp>

#include <cstdint>

namespace quadtwist
{

// |lhs - rhs| / |rhs| (absolute when rhs vanishes).
double relative_gap(Complex lhs, Complex rhs);

struct ReplayResult
{
    Complex lhs = 0;
    Complex rhs = 0;
    double gap = 0;
};

struct MobiusCheck
{
    double lhs = 0;
    double rhs = 0;
    double gap = 0;
    double bound_scale = 0;
};

// lhs = D tilde Psi(0) phi(m)/m sum_{c <= Y, (c,m)=1} mu(c)/c^2,
// rhs = sum_{(d,m)=1} mu^2(d) Psi(d/D); gap is absolute, bound_scale = D^{1/2} log Y + D/Y.
MobiusCheck check_small_mobius(std::uint64_t big_d, std::uint64_t m, double y);

struct IntegralOptions
{
    double n = 50;
    double delta = 0.1;
    double tail_tol = 1e-12;
};

// lhs = integral of W(t/N) tilde Psi(C/t) t^{w-1} dt,
// rhs = (1/2 pi i) integral over Re s = gamma of W-breve(s) Psi-breve(1-s+w) X(1-s+w) N^s C^{w-s} ds.
ReplayResult check_integral_identity(double c, Complex w, double gamma, const IntegralOptions &opt = {});

// H_p(s,w;p^nu) = sum_{n,k} tau_A(p^n) G_{p^{2k}}(p^{n+nu}) p^{-n(w+3/2) - 2k(s-w)}, k-sum in closed form.
Complex h_local(const ShiftSet &a, Complex s, Complex w, std::uint64_t p, int nu);

struct VcValue
{
    Complex value = 0;
    double tail = 0;
};

// Euler product of U_c / (-(1-2^{1+2w-2s})/(1-2^{2w-2s}) Z^[2]_A(1+w) zeta^[2](2s-2w)) over odd p <= cutoff.
VcValue v_c(const ShiftSet &a, Complex s, Complex w, std::uint64_t c, std::int64_t ell,
            std::uint64_t prime_cutoff = 10'000);

// The continued U_c(s,w) through v_c.
Complex uc_continued(const ShiftSet &a, Complex s, Complex w, std::uint64_t c, std::int64_t ell,
                     std::uint64_t prime_cutoff = 10'000);

struct UcTruncation
{
    std::uint64_t n_max = 400'000;
    std::uint64_t k_max = 127;
    std::uint64_t prime_cutoff = 10'000;
    double margin = 0.05;
};

struct UcEvaluation
{
    Complex s = 0;
    Complex w = 0;
    std::uint64_t c = 1;
    std::int64_t ell = 1;
    Complex direct = 0;
    std::uint64_t n_max = 0;
    std::uint64_t k_max = 0;
    double direct_tail = 0;
    Complex factored = 0;
    Complex v_c = 0;
    double euler_tail = 0;
    double gap = 0;
};

// Direct odd-k double sum for U_c against the Euler factorization through H_p.
UcEvaluation check_uc_factorization(const ShiftSet &a, Complex s, Complex w, std::uint64_t c, std::int64_t ell,
                                    const UcTruncation &t = {});

struct ResidueOptions
{
    double radius = 1e-2;
    int nodes = 128;
    std::uint64_t prime_cutoff = 10'000;
};

// Closed form of Res_{w=-alpha} U_c(s,w), alpha = a[index].
Complex residue_formula(const ShiftSet &a, Complex s, std::size_t index, std::uint64_t c, std::int64_t ell,
                        std::uint64_t prime_cutoff = 10'000);

// Trapezoid residue of uc_continued on a circle about -alpha against residue_formula.
ReplayResult check_residue_formula(const ShiftSet &a, Complex s, std::size_t index, std::uint64_t c,
                                   std::int64_t ell, const ResidueOptions &opt = {});

struct FuncEqOptions
{
    std::uint64_t c_cutoff = 1000;
    std::uint64_t prime_cutoff = 2000;
    // Use 8^{s+alpha-1} in place of 8^{-s-alpha} on the right.
    bool printed_power = false;
};

struct FuncEqCheck
{
    Complex lhs = 0;
    Complex rhs = 0;
    double gap = 0;
    // Estimate of the neglected c > cutoff part, relative.
    double c_tail = 0;
};

// X(1-s-alpha) Res U(s,-alpha) (2 ell)^{s+alpha-1} from the residue formula summed over c, against
// 8^{-s-alpha} chi(1/2+s+alpha) ell^{s+alpha-1}/2 zeta^[2](1-2s-2alpha) Z^[2]_{A'}(1-alpha) sum_c mu(c) c^{2s+2alpha-2} V_c.
FuncEqCheck check_func_eq_rewrite(const ShiftSet &a, Complex s, std::size_t index, std::int64_t ell,
                                  const FuncEqOptions &opt = {});

// zeta^[2](x) against (1-2^{-x})/(1-2^{x-1}) zeta^[2](1-x) chi(x).
double zeta2_reflection_gap(Complex x);

// X(1-u) chi(2u) against 4^{-u} chi(1/2+u).
double identity_x_gap(Complex u);

struct DAverageOptions
{
    double tail_tol = 1e-10;
    BOptions b{.prime_cutoff = 10'000, .tail_tolerance = 1e-4, .tail = false, .series_degree = 14};
};

// sum_{(d,ell)=1} mu^2(2d) Psi(d/D) d^{-upsilon} B^{(2d)}(B; ell).
Complex d_average_direct(const ShiftSet &b, Complex upsilon, std::int64_t ell, std::uint64_t big_d,
                         const DAverageOptions &opt = {});

// (1/2 pi i) integral over Re z = c of Psi-breve(z-upsilon) D^{z-upsilon} B-tilde_(z)(B; ell)
// zeta^[2](z)/zeta^[2](2z) dz. Any line avoiding z = 1.
Complex d_average_contour(const ShiftSet &b, Complex upsilon, std::int64_t ell, std::uint64_t big_d, double c_line,
                          const DAverageOptions &opt = {});

// d_average_direct against d_average_contour; c_line > 1.
ReplayResult check_d_average_extraction(const ShiftSet &b, Complex upsilon, std::int64_t ell, std::uint64_t big_d,
                                        double c_line, const DAverageOptions &opt = {});

} // namespace quadtwist

#endif
