#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "big_real.hpp"
#include "dyadic.hpp"
#include "maps.hpp"
#include "orbit.hpp"

namespace recurlab
{
//! What one orbit pass should record.
struct RecurrenceRequest
{
    //! Ascending, nonnegative. May be empty when only distances are wanted.
    std::vector<double> radii;
    //! Ascending steps in [1, n] at which to sample the running minimum.
    std::vector<std::int64_t> checkpoints;
    bool record_hits = false;
    //! Target of a hitting count; the starting point itself when empty.
    std::optional<double> center;
};

/*!
 * Counts and running minimum distance for one orbit.
 *
 * counts[i] = #{1 <= j <= n : d(f^j x, c) <= radii[i]} with the closed-ball
 * convention; a distance within 2^-slack of a radius counts as a hit and is
 * also tallied in \c ties.
 */
struct RecurrenceSeries
{
    std::int64_t n = 0;
    std::vector<double> radii;
    std::vector<std::int64_t> counts;
    std::vector<std::vector<std::int64_t>> hit_times;
    std::vector<std::int64_t> checkpoints;
    std::vector<double> min_distance;
    std::int64_t ties = 0;
};

//! One pass over the orbit of x0 under the given policy.
RecurrenceSeries observe_recurrence(MapModel const& map,
                                    BigReal const& x0,
                                    std::int64_t n,
                                    RecurrenceRequest const& request,
                                    PrecisionPolicy const& policy);

/*!
 * Doubling-map fast path over a bit stream.
 *
 * Compares 64-bit windows at offsets j and 0; only candidates with
 * |w_j - w_0| <= ceil(r 2^64) + 1 are confirmed at full precision, so the
 * decisions match exact arithmetic on the stream's dyadic value.
 */
RecurrenceSeries observe_recurrence(DyadicStream const& stream,
                                    std::int64_t n,
                                    RecurrenceRequest const& request,
                                    int slack_bits = 64);

RecurrenceSeries recurrence_count(MapModel const& map,
                                  BigReal const& x0,
                                  std::int64_t n,
                                  std::vector<double> const& radii,
                                  PrecisionPolicy const& policy,
                                  bool record_hits = false);

//! m_c = min_{k <= c} d(f^k x0, x0) at each checkpoint c.
std::vector<double> min_distance_process(MapModel const& map,
                                         BigReal const& x0,
                                         std::int64_t n,
                                         std::vector<std::int64_t> const& checkpoints,
                                         PrecisionPolicy const& policy);

//! Entries of the orbit into the closed ball B(center, r).
std::int64_t hitting_count(MapModel const& map,
                           BigReal const& x0,
                           std::int64_t n,
                           double center,
                           double r,
                           PrecisionPolicy const& policy);

//---------------------------------------------------------------------------//
enum class PsiKind
{
    NegLog,  //!< psi(z) = -log z, a_n = 1, b_n = log(2n)
    Power,  //!< psi(z) = z^-alpha, a_n = (2n)^-alpha, b_n = 0
};

struct PsiSpec
{
    PsiKind kind = PsiKind::NegLog;
    double alpha = 1;

    void validate() const;
    //! psi(z); +inf at z = 0.
    double operator()(double z) const;
    double scale(std::int64_t n) const;
    double shift(std::int64_t n) const;
    //! u / a_n + b_n
    double level(double u, std::int64_t n) const { return u / scale(n) + shift(n); }
    //! Limiting intensity tau(u) for the scaling above.
    double tau(double u) const;
};

struct PsiMaximum
{
    double value = 0;
    bool infinite = false;  //!< m_n = 0 with an unbounded psi
};

//! M_n = max_k psi(d(f^k x0, x0)), computed as psi(m_n).
PsiMaximum max_psi_process(MapModel const& map,
                           BigReal const& x0,
                           std::int64_t n,
                           PsiSpec const& psi,
                           PrecisionPolicy const& policy);

}  // namespace recurlab
