#ifndef GIBBS_NUMERIC_HPP
#define GIBBS_NUMERIC_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include <boost/multiprecision/mpfr.hpp>

namespace gibbs
{

// Exact coefficients.
using Rational = mpq_class;

// Working precision for analytic quantities (radii, tilt points, lattice
// constants). 50 decimal digits leaves ample room below the 1e-9 tolerances
// the checks use.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<50>,
                                          boost::multiprecision::et_off>;

// Base of all errors raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: JSON that does not parse, unknown kinds, bad rationals.
class spec_error : public error
{
public:
    using error::error;
};

// A documented precondition of an operation does not hold.
class precondition_error : public error
{
public:
    using error::error;
};

// A sampler or solver hit a configured resource cap (node cap, attempt cap).
class resource_cap_error : public error
{
public:
    using error::error;
};

// Parses "p/q", "p" or "-p/q". Throws spec_error on anything else.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form; integers are written as "p/1" so every entry has the
// same shape.
std::string rational_to_string(const Rational &q);

Real to_real(const Rational &q);
double to_double(const Real &x);

// Fixed-format decimal rendering with the given number of significant digits.
// Output is deterministic for a given value.
std::string real_to_string(const Real &x, int digits = 20);

Rational factorial(std::uint64_t n);

Real real_e();
Real real_pi();

} // namespace gibbs

#endif
