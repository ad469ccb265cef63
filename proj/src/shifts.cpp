#include <quadtwist/arith.hpp>
#include <quadtwist/error.hpp>
#include <quadtwist/shifts.hpp>
#include <quadtwist/special.hpp>

#include <algorithm>
#include <limits>
#include <sstream>

namespace quadtwist
{

ShiftSet::ShiftSet(std::vector<Complex> values)
    : values_(std::move(values)), origins_(values_.size(), ShiftOrigin::original)
{
}

ShiftSet::ShiftSet(std::initializer_list<Complex> values) : ShiftSet(std::vector<Complex>(values))
{
}

ShiftSet ShiftSet::shifted(Complex s) const
{
    ShiftSet r = *this;
    for (std::size_t i = 0; i < r.values_.size(); ++i) {
        r.values_[i] += s;
        r.origins_[i] = ShiftOrigin::shifted;
    }
    return r;
}

ShiftSet ShiftSet::without(std::size_t i) const
{
    if (i >= values_.size()) {
        throw ParameterError("shift index out of range");
    }
    ShiftSet r = *this;
    r.values_.erase(r.values_.begin() + static_cast<std::ptrdiff_t>(i));
    r.origins_.erase(r.origins_.begin() + static_cast<std::ptrdiff_t>(i));
    return r;
}

ShiftSet ShiftSet::with(Complex value, ShiftOrigin origin) const
{
    ShiftSet r = *this;
    r.values_.push_back(value);
    r.origins_.push_back(origin);
    return r;
}

void ShiftSet::check_domain(double delta) const
{
    for (Complex v : values_) {
        if (std::abs(v.real()) > 0.25 - delta) {
            std::ostringstream os;
            os << "shift " << v << " outside |Re| <= 1/4 - " << delta;
            throw DomainError(os.str());
        }
    }
}

double ShiftSet::min_gap() const
{
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values_.size(); ++i) {
        for (std::size_t j = i + 1; j < values_.size(); ++j) {
            g = std::min(g, std::abs(values_[i] - values_[j]));
        }
    }
    return g;
}

bool ShiftSet::conjugation_closed(double tol) const
{
    std::vector<bool> used(values_.size(), false);
    for (Complex v : values_) {
        bool found = false;
        for (std::size_t j = 0; j < values_.size() && !found; ++j) {
            if (!used[j] && std::abs(values_[j] - std::conj(v)) <= tol) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) {
            return false;
        }
    }
    return true;
}

ShiftSet swap_set(const ShiftSet &a, const std::vector<std::size_t> &u)
{
    std::vector<bool> in_u(a.size(), false);
    for (std::size_t i : u) {
        if (i >= a.size() || in_u[i]) {
            throw ParameterError("swap subset is not a subset of the shift set");
        }
        in_u[i] = true;
    }
    std::vector<Complex> kept;
    std::vector<Complex> swapped;
    for (std::size_t i = 0; i < a.size(); ++i) {
        (in_u[i] ? swapped : kept).push_back(in_u[i] ? -a[i] : a[i]);
    }
    ShiftSet r(kept);
    for (Complex v : swapped) {
        r = r.with(v, ShiftOrigin::negated);
    }
    return r;
}

ShiftSet swap_set(const ShiftSet &a, const ShiftSet &u)
{
    std::vector<std::size_t> idx;
    std::vector<bool> used(a.size(), false);
    for (Complex v : u) {
        bool found = false;
        for (std::size_t i = 0; i < a.size() && !found; ++i) {
            if (!used[i] && a[i] == v) {
                used[i] = true;
                idx.push_back(i);
                found = true;
            }
        }
        if (!found) {
            throw ParameterError("swap subset is not a subset of the shift set");
        }
    }
    return swap_set(a, idx);
}

std::vector<Complex> complete_homogeneous(std::span<const Complex> xs, int e_max)
{
    std::vector<Complex> h(static_cast<std::size_t>(e_max) + 1, Complex(0));
    h[0] = 1;
    for (Complex x : xs) {
        for (int e = 1; e <= e_max; ++e) {
            h[e] += x * h[e - 1];
        }
    }
    return h;
}

Complex tau_prime_power(const ShiftSet &a, std::uint64_t p, int e)
{
    if (e < 0) {
        throw ParameterError("negative exponent");
    }
    std::vector<Complex> xs;
    double lp = std::log(static_cast<double>(p));
    for (Complex alpha : a) {
        xs.push_back(std::exp(-alpha * lp));
    }
    return complete_homogeneous(xs, e)[e];
}

TauTable::TauTable(const ShiftSet &a, std::uint64_t limit) : shifts_(a)
{
    if (limit < 1 || limit > default_sieve_bound) {
        throw BoundError("tau table limit outside the sieve bound");
    }
    const Sieve &sv = shared_sieve(std::max<std::uint64_t>(limit, 2));
    values_.assign(limit + 1, Complex(0));
    values_[1] = 1;
    for (std::uint64_t n = 2; n <= limit; ++n) {
        std::uint64_t p = sv.lpf(n);
        std::uint64_t q = 1;
        int e = 0;
        std::uint64_t m = n;
        while (m % p == 0) {
            m /= p;
            q *= p;
            ++e;
        }
        values_[n] = (m == 1) ? tau_prime_power(a, p, e) : values_[q] * values_[m];
    }
}

Complex TauTable::operator[](std::uint64_t n) const
{
    return values_[n];
}

Complex TauTable::at(std::uint64_t n) const
{
    if (n < 1 || n >= values_.size()) {
        throw BoundError("tau table too short");
    }
    return values_[n];
}

TauTable build_tau_table(const ShiftSet &a, std::uint64_t limit)
{
    return TauTable(a, limit);
}

ZetaProducts zeta_products(const ShiftSet &a, Complex s)
{
    ZetaProducts z{1, 1, 0};
    for (Complex alpha : a) {
        if (std::abs(s + alpha - 1.0) < pole_radius) {
            std::ostringstream os;
            os << "s + alpha within " << pole_radius << " of 1 for shift alpha = " << alpha;
            throw SingularityError(os.str());
        }
        Complex zv = zeta(s + alpha);
        z.z_a *= zv;
        z.z_a2 *= (1.0 - std::exp(-(s + alpha) * std::log(2.0))) * zv;
    }
    z.zeta2 = std::abs(s - 1.0) < pole_radius ? Complex(std::numeric_limits<double>::infinity(), 0) : zeta2(s);
    return z;
}

} // namespace quadtwist
