#ifndef QUADTWIST_EXACT_HPP
#define QUADTWIST_EXACT_HPP

#include <quadtwist/series.hpp>

#include <gmpxx.h>

#include <cmath>

namespace quadtwist
{

// Exact rational coefficients; the shifts enter through rational values of p^{-alpha}.
using Rational = mpq_class;

template <>
inline double scalar_abs<Rational>(const Rational &x)
{
    return std::fabs(x.get_d());
}

} // namespace quadtwist

#endif
