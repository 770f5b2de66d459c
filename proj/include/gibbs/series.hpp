#ifndef GIBBS_SERIES_HPP
#define GIBBS_SERIES_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include <gibbs/numeric.hpp>

namespace gibbs
{

inline constexpr std::size_t default_truncation = 256;

// Truncated formal power series with exact rational coefficients.
//
// Coefficients 0..N are known exactly; nothing is known beyond N, so every
// binary operation truncates to the smaller order. Generating functions are
// stored EGF-normalized (the coefficient of z^n is w_n / n!).
class Series
{
public:
    // Zero-length input is rejected: a series always knows at least its
    // constant term.
    explicit Series(std::vector<Rational> coeffs);

    static Series zero(std::size_t truncation);
    static Series constant(const Rational &c, std::size_t truncation);
    static Series monomial(std::size_t k, const Rational &c, std::size_t truncation);
    // sum z^n / n!
    static Series exponential(std::size_t truncation);

    std::size_t truncation() const
    {
        return coeffs_.size() - 1;
    }
    const Rational &operator[](std::size_t n) const;
    std::span<const Rational> coeffs() const
    {
        return coeffs_;
    }

    Series truncated(std::size_t truncation) const;
    // Same coefficients, but known to a higher order with zeros. Only valid
    // for series that are polynomials by construction.
    Series padded(std::size_t truncation) const;

    bool is_nonnegative() const;
    bool is_zero() const;
    // Smallest index with a nonzero coefficient, if any.
    std::optional<std::size_t> min_index() const;
    std::optional<std::size_t> max_index() const;

    friend bool operator==(const Series &, const Series &) = default;

private:
    std::vector<Rational> coeffs_;
};

enum class ArithOp { add, mul, scale };

Series operator+(const Series &a, const Series &b);
Series operator-(const Series &a, const Series &b);
Series operator*(const Series &a, const Series &b);
Series operator*(const Rational &c, const Series &a);

Series series_arith(ArithOp op, const Series &a, const Series &b);
Series series_arith(ArithOp op, const Series &a, const Rational &c);

// Coefficient n of the product, computed without forming the whole product.
Rational product_coeff(const Series &a, const Series &b, std::size_t n);

Series derive(const Series &a);
Series integrate(const Series &a, const Rational &constant);

// a / z^k; the k lowest coefficients must vanish.
Series divide_by_z(const Series &a, std::size_t k = 1);
// z^k * a, truncation grows by k.
Series multiply_by_z(const Series &a, std::size_t k = 1);

// Formal exp; the constant term must be zero.
Series exp_series(const Series &a);

// exp(a) for a series with a nonzero constant term: the irrational factor
// exp(a_0) is split out as a real number and the series part is exact.
struct ScaledSeries {
    Real factor;
    Series series;
};
ScaledSeries exp_series_analytic(const Series &a);

// Formal log; the constant term must be 1.
Series log_series(const Series &a);
Series power(const Series &a, std::size_t k);

// outer(inner(z)); inner must have zero constant term.
Series compose(const Series &outer, const Series &inner);

// sum_{k = a mod D} g^k / k!; the residue-class part of exp(g).
Series multisection_exp(const Series &g, std::size_t a, std::size_t D);

// Z = z * phi(Z). Requires phi_0 > 0 and nonnegative coefficients. The result
// has truncation min(N, phi.truncation() + 1).
Series solve_lagrange(const Series &phi, std::size_t N);

// True when phi_0 > 0 and phi_k > 0 for some k >= 2 (the simply generated
// tree hypotheses).
bool satisfies_tree_hypotheses(const Series &phi);

struct SupportLattice {
    std::size_t d = 1;
    std::size_t m = 0;
    std::size_t min_index = 0;
};

SupportLattice support_span(const Series &a);

enum class TailMode { truncate, geometric_bound };

struct EvalResult {
    Real value;
    // Bound on |value - true sum|; +inf when the tail is unknown.
    Real error;
};

// Partial sum at x >= 0. In geometric_bound mode the tail beyond the last
// nonzero coefficient is bounded by a geometric series whose ratio comes from
// ratio_bound when given, otherwise from the last window of term ratios
// (extrapolated when they are still increasing).
EvalResult eval_at(const Series &a, const Real &x, TailMode mode,
                   std::optional<Real> ratio_bound = std::nullopt);

// Exact evaluation of a series that is a polynomial by construction.
Real eval_polynomial(const Series &a, const Real &x);

enum class RadiusMethod { critical_point, coefficient_ratio, undetermined };

std::string to_string(RadiusMethod m);

struct RadiusInfo {
    Real rho;
    Real tau;
    bool critical = false;
    Real precision;
    RadiusMethod method = RadiusMethod::undetermined;
    // False when the tree series diverges at rho (tau is then a lower bound).
    bool tau_finite = true;
};

// Radius of Z = z * phi(Z) and the tilt point. Tries tau * phi'(tau) =
// phi(tau) first and falls back to extrapolated coefficient ratios.
RadiusInfo radius_and_tau(const Series &phi, const Real &precision);

nlohmann::json to_json(const Series &a);
Series series_from_json(const nlohmann::json &j);

} // namespace gibbs

#endif
