#pragma once

#include <span>
#include <string>
#include <vector>

#include "big_real.hpp"

namespace recurlab
{
enum class DensityKind
{
    ClosedForm,
    Ulam,
    Histogram,
    Unknown,
};

//! Formula families used by closed-form density pieces.
enum class DensityFormula
{
    Constant,  //!< a
    Linear,  //!< a + b x
    Reciprocal,  //!< a / (1 + x)
    Arcsine,  //!< 1 / (pi sqrt((x - a)(b - x))) on [a, b]
};

struct DensityPiece
{
    double lo;
    double hi;
    DensityFormula formula;
    double a = 0;
    double b = 0;

    double value(double x) const;
    //! Mass of [lo, x] for x in [lo, hi].
    double mass_to(double x) const;
    //! True when the formula blows up at a piece endpoint.
    bool singular_endpoints() const { return formula == DensityFormula::Arcsine; }
};

struct DensityJump
{
    double x;
    double size;  //!< right limit minus left limit
};

/*!
 * Invariant density of an interval map.
 *
 * Closed forms are lists of formula pieces; Ulam and Histogram densities are
 * piecewise constant on equal-width bins and store the bin probabilities
 * (which sum to one exactly up to rounding). Evaluation is right-continuous.
 */
class DensityModel
{
  public:
    static DensityModel closed_form(std::vector<DensityPiece> pieces,
                                    std::vector<double> zero_set,
                                    std::string label);
    static DensityModel discrete(DensityKind kind,
                                 double lo,
                                 double hi,
                                 std::vector<double> probabilities,
                                 std::string label);
    static DensityModel unknown(double lo, double hi, std::string label);

    DensityKind kind() const noexcept { return kind_; }
    bool is_discrete() const noexcept
    {
        return kind_ == DensityKind::Ulam || kind_ == DensityKind::Histogram;
    }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::string const& label() const noexcept { return label_; }

    std::span<DensityPiece const> pieces() const noexcept { return pieces_; }
    std::span<double const> probabilities() const noexcept { return probs_; }
    std::size_t bins() const noexcept { return probs_.size(); }
    double bin_width() const noexcept;

    std::vector<double> jump_points() const;
    std::span<DensityJump const> jumps() const noexcept { return jumps_; }
    std::span<double const> zero_set() const noexcept { return zero_set_; }

    //! Panel boundaries for quadrature: domain ends, piece ends, zero set.
    std::vector<double> breakpoints() const;

    double operator()(double x) const;
    double left_limit(double x) const;
    double cdf(double x) const;
    double inverse_cdf(double u) const;
    //! High-precision inverse CDF (closed forms only).
    void inverse_cdf(BigReal& out, BigReal const& u) const;

    //! Total mass from the formulas or the weight sum.
    double total_mass() const;
    //! sup rho; +inf for singular densities.
    double supremum() const;
    //! Integral of rho squared; +inf when divergent.
    double l2_mass() const;

  private:
    DensityKind kind_ = DensityKind::Unknown;
    double lo_ = 0;
    double hi_ = 1;
    std::string label_;
    std::vector<DensityPiece> pieces_;
    std::vector<double> piece_mass_;  // cumulative mass at each piece start
    std::vector<double> probs_;
    std::vector<double> cum_probs_;
    std::vector<DensityJump> jumps_;
    std::vector<double> zero_set_;

    void require_known(char const* op) const;
    std::size_t piece_index(double x) const;
    std::size_t bin_index(double x) const;
};

}  // namespace recurlab
