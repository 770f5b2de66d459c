#include <gibbs/numeric.hpp>

#include <cctype>
#include <sstream>

namespace gibbs
{

namespace
{

bool is_integer_literal(std::string_view s)
{
    if (s.empty()) {
        return false;
    }
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) {
        return false;
    }
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
    }
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    const auto slash = text.find('/');
    const auto num = text.substr(0, slash);
    const auto den = slash == std::string_view::npos ? std::string_view{"1"} : text.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den) || den[0] == '-' || den[0] == '+') {
        throw spec_error("not a rational literal: '" + std::string(text) + "'");
    }
    mpz_class p(std::string(num[0] == '+' ? num.substr(1) : num), 10);
    mpz_class q(std::string(den), 10);
    if (q == 0) {
        throw spec_error("zero denominator in rational literal: '" + std::string(text) + "'");
    }
    Rational r(p, q);
    r.canonicalize();
    return r;
}

std::string rational_to_string(const Rational &q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Real to_real(const Rational &q)
{
    Real r;
    mpfr_set_q(r.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return r;
}

double to_double(const Real &x)
{
    return x.convert_to<double>();
}

std::string real_to_string(const Real &x, int digits)
{
    std::ostringstream os;
    os.precision(digits);
    os << std::scientific << x;
    return os.str();
}

Rational factorial(std::uint64_t n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

Real real_e()
{
    return boost::multiprecision::exp(Real(1));
}

Real real_pi()
{
    return boost::math::constants::pi<Real>();
}

} // namespace gibbs
