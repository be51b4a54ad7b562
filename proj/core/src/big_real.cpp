#include "recurlab/big_real.hpp"

#include <cstdio>
#include <vector>

#include "recurlab/errors.hpp"

namespace recurlab
{
BigReal::BigReal(mpfr_prec_t precision)
{
    mpfr_init2(value_, precision);
    mpfr_set_zero(value_, 1);
}

BigReal::BigReal(double value, mpfr_prec_t precision)
{
    mpfr_init2(value_, precision);
    mpfr_set_d(value_, value, MPFR_RNDN);
}

BigReal::BigReal(BigReal const& other)
{
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigReal::BigReal(BigReal&& other) noexcept
{
    // Steal the limbs; leave the source as a valid 2-bit zero.
    *value_ = *other.value_;
    mpfr_init2(other.value_, MPFR_PREC_MIN);
}

BigReal& BigReal::operator=(BigReal const& other)
{
    if (this != &other)
    {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

BigReal& BigReal::operator=(BigReal&& other) noexcept
{
    if (this != &other)
    {
        mpfr_swap(value_, other.value_);
    }
    return *this;
}

BigReal::~BigReal()
{
    mpfr_clear(value_);
}

BigReal BigReal::from_string(std::string const& text, mpfr_prec_t precision)
{
    BigReal result(precision);
    if (mpfr_set_str(result.value_, text.c_str(), 10, MPFR_RNDN) != 0)
    {
        throw ContractError("not a decimal number: '" + text + "'");
    }
    return result;
}

bool BigReal::round_to(mpfr_prec_t precision)
{
    return mpfr_prec_round(value_, precision, MPFR_RNDN) != 0;
}

std::string BigReal::to_string(int digits) const
{
    std::vector<char> buffer(static_cast<std::size_t>(digits) + 32);
    mpfr_snprintf(buffer.data(), buffer.size(), "%.*Rg", digits, value_);
    return buffer.data();
}

void abs_difference(BigReal& out, BigReal const& a, BigReal const& b)
{
    mpfr_sub(out.get(), a.get(), b.get(), MPFR_RNDN);
    mpfr_abs(out.get(), out.get(), MPFR_RNDN);
}

}  // namespace recurlab
