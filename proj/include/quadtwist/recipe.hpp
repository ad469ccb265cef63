#ifndef QUADTWIST_RECIPE_HPP
#define QUADTWIST_RECIPE_HPP

#include <quadtwist/shifts.hpp>
#include <quadtwist/weights.hpp>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace quadtwist
{

enum class GammaKind { plus, minus };

// X_+(z), X_-(z) from L(1-s, chi_d) = |d|^{s-1/2} X(1-s) L(s, chi_d).
// SingularityError near odd (plus) or even (minus) positive integers.
Complex x_plus(Complex z);
Complex x_minus(Complex z);
Complex gamma_factor(GammaKind kind, Complex z);
// X_d(z) = |d|^{1/2-z} X_{sign d}(z)
Complex x_disc(std::int64_t d, Complex z);
// chi(s) = X_+(s), so zeta(s) = chi(s) zeta(1-s).
Complex chi(Complex s);
// X(1-u) = (2 pi)^{-u} Gamma(u) (cos(pi u/2) + sin(pi u/2))
Complex x_mellin(Complex u);

enum class BMode { plain, tilde, tilde_w };

struct BOptions
{
    std::uint64_t prime_cutoff = 10'000;
    // Largest accepted estimate of the neglected prime tail, in log C.
    double tail_tolerance = 1e-4;
    bool tail = true;
    int series_degree = 14;
};

// Square-supported series continued as prod zeta(1+2b) prod zeta(1+b+b') times an Euler product.
struct BSeries
{
    ShiftSet b;
    std::int64_t ell = 1;
    // Primes dividing the modulus are excluded from n.
    std::uint64_t modulus = 1;
    BMode mode = BMode::plain;
    Complex w = 0;
    std::uint64_t prime_cutoff = 0;
    Complex value = 0;
    Complex prefactor = 0;
    // Euler product C including the tail.
    Complex euler = 0;
    Complex log_tail = 0;
    double tail_error = 0;
};

// prod zeta(1 + 2b) prod_{i<j} zeta(1 + b_i + b_j); SingularityError naming the pair.
Complex b_prefactor(const ShiftSet &b);

// Local Euler factor sum_n tau_B(p^{2n}) p^{-n} (times the p | ell adjustments), before
// removal of the zeta factors.
Complex b_local(const ShiftSet &b, std::uint64_t p, int nu, BMode mode = BMode::plain, Complex w = 0);

BSeries b_series(const ShiftSet &b, std::int64_t ell, std::uint64_t modulus, const BOptions &opt = {});
BSeries b_tilde(const ShiftSet &b, std::int64_t ell, const BOptions &opt = {});
BSeries b_tilde_w(const ShiftSet &b, std::int64_t ell, Complex w, const BOptions &opt = {});
// Euler product of the ratio B-tilde_(w)^{(2)} / B^{(2)}.
Complex f_ratio(const ShiftSet &b, std::int64_t ell, Complex w, const BOptions &opt = {});

// Coefficients of log C_p as a power series in z_i = p^{-1/2-b_i} (and u = p^{-1} or p^{-w}
// for the tilde modes), truncated at weighted degree `degree` with u of weight 2.
class LocalLogSeries
{
public:
    struct Term
    {
        std::vector<int> exponent;
        double coef;
    };

    static std::shared_ptr<const LocalLogSeries> get(std::size_t k, bool weighted, int degree);

    std::size_t vars() const { return k_; }
    bool weighted() const { return weighted_; }
    int degree() const { return degree_; }
    const std::vector<Term> &terms() const { return terms_; }

    // Sum of the series at the given z and u.
    Complex eval(std::span<const Complex> z, Complex u = 0) const;

    LocalLogSeries(std::size_t k, bool weighted, int degree);

private:
    std::size_t k_;
    bool weighted_;
    int degree_;
    std::vector<Term> terms_;
};

struct SwapOptions
{
    BOptions b;
    // Shifts closer than this use the contour path.
    double degenerate_gap = 1e-3;
    bool allow_condensed = true;
    int nodes = 64;
};

// sum over U in A_s, |U| <= j, of prod X_{8d}(1/2+u) B^{(2d)}(A_s - U + U^-; ell).
Complex swap_term_sum(const ShiftSet &a, Complex s, std::uint64_t d, std::int64_t ell, std::size_t max_swap,
                      const SwapOptions &opt = {});

// The |U| = j part alone, always through the contour form.
Complex jswap_magnitude(const ShiftSet &a, Complex s, std::uint64_t d, std::int64_t ell, std::size_t j,
                       const SwapOptions &opt = {});

struct RecipeOptions
{
    double a_line = 0.1;
    double ramp = 0.1;
    double grid_tail = 1e-10;
    BOptions b;
    int threads = 0;
};

struct RecipeTermSet
{
    ShiftSet a;
    std::uint64_t big_d = 0;
    double eta = 0;
    std::int64_t ell = 1;
    std::uint64_t n = 0;
    double a_line = 0;
    std::size_t max_swap = 0;
    // Index i holds the |U| = i contribution.
    std::vector<Complex> swap_terms;
    Complex total = 0;
    std::size_t nodes = 0;
    double truncation = 0;
    std::uint64_t prime_cutoff = 0;
    double elapsed_ms = 0;
};

// Singular points in s of the recipe integrand near the line: zeta poles, the first
// gamma-factor pole and the branch point of the prime-tail terms.
std::vector<Complex> recipe_poles(const ShiftSet &a);

// Recipe main term for each D: sum over (d, ell) = 1 of mu^2(2d) Psi(d/D) times the line
// integral of W-breve(s) N^s swap_term_sum(A, s, d, ell, j). One grid and one set of
// B^{(2)} values serve all D.
std::vector<RecipeTermSet> recipe_predictions(const ShiftSet &a, const std::vector<std::uint64_t> &big_ds, double eta,
                                              std::int64_t ell, std::size_t max_swap, const RecipeOptions &opt = {});

RecipeTermSet recipe_prediction(const ShiftSet &a, std::uint64_t big_d, double eta, std::int64_t ell,
                                std::size_t max_swap, const RecipeOptions &opt = {});

} // namespace quadtwist

#endif
