#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

namespace recurlab
{
/*!
 * Owning wrapper around an MPFR number.
 *
 * Precision is a runtime property of each value, so orbit code can lower it
 * step by step. Copies keep the source's precision.
 */
class BigReal
{
  public:
    explicit BigReal(mpfr_prec_t precision = 128);
    BigReal(double value, mpfr_prec_t precision);
    BigReal(BigReal const& other);
    BigReal(BigReal&& other) noexcept;
    BigReal& operator=(BigReal const& other);
    BigReal& operator=(BigReal&& other) noexcept;
    ~BigReal();

    //! Parse a decimal string, rounding to nearest.
    static BigReal from_string(std::string const& text, mpfr_prec_t precision);

    mpfr_ptr get() noexcept { return value_; }
    mpfr_srcptr get() const noexcept { return value_; }

    mpfr_prec_t precision() const noexcept { return mpfr_get_prec(value_); }

    //! Round in place to a new precision; true if the value changed.
    bool round_to(mpfr_prec_t precision);

    double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }

    std::string to_string(int digits = 20) const;

  private:
    mpfr_t value_;
};

//! |a - b| rounded to nearest at the precision of \c out.
void abs_difference(BigReal& out, BigReal const& a, BigReal const& b);

}  // namespace recurlab
