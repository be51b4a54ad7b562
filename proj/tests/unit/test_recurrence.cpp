#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "recurlab/dyadic.hpp"
#include "recurlab/errors.hpp"
#include "recurlab/maps.hpp"
#include "recurlab/recurrence.hpp"
#include "recurlab/rng.hpp"

using namespace recurlab;

namespace
{
PrecisionPolicy exact_dyadic()
{
    PrecisionPolicy p;
    p.kind = PrecisionKind::ExactDyadic;
    return p;
}

PrecisionPolicy bigfixed()
{
    PrecisionPolicy p;
    p.kind = PrecisionKind::BigFixed;
    return p;
}

BigReal cusp_fixed_point()
{
    BigReal x = BigReal::from_string("2", 700);
    mpfr_sqrt(x.get(), x.get(), MPFR_RNDN);
    mpfr_mul_si(x.get(), x.get(), -2, MPFR_RNDN);
    mpfr_add_ui(x.get(), x.get(), 3, MPFR_RNDN);
    return x;
}

std::string bit_string(DyadicStream const& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        out += s.bit(i) ? '1' : '0';
    }
    return out;
}

std::vector<double> dyadic_radii()
{
    std::vector<double> r;
    for (int e = 20; e >= 4; --e)
    {
        r.push_back(std::ldexp(1.0, -e));
    }
    return r;
}
}  // namespace

TEST_CASE("recurrence_count examples")
{
    BigReal x0(0.625, 3);
    RecurrenceSeries s = recurrence_count(MapModel::doubling(), x0, 3, {0.2}, exact_dyadic(), true);
    REQUIRE(s.counts.size() == 1);
    CHECK(s.counts[0] == 1);
    CHECK(s.hit_times[0] == std::vector<std::int64_t>{2});

    PrecisionPolicy p;
    p.bits = 700;
    p.taper = false;
    RecurrenceSeries fixed = recurrence_count(MapModel::cusp(), cusp_fixed_point(), 100, {0.0, 0.5}, p);
    CHECK(fixed.counts == std::vector<std::int64_t>{100, 100});

    SampleEngine e = make_sample_engine(4, 4);
    for (auto const& map : {MapModel::golden_beta(), MapModel::cusp(), MapModel::logistic()})
    {
        BigReal x(0.0, starting_bits(map, 500, bigfixed()));
        sample_invariant(x, map, e);
        CHECK(recurrence_count(map, x, 500, {0.0}, bigfixed()).counts[0] == 0);
    }
}

TEST_CASE("empty radii are a contract error")
{
    BigReal x0(0.625, 3);
    CHECK_THROWS_AS(recurrence_count(MapModel::doubling(), x0, 3, {}, exact_dyadic()), ContractError);
    CHECK_THROWS_AS(recurrence_count(MapModel::doubling(), x0, 3, {0.2, 0.1}, exact_dyadic()), DomainError);
}

TEST_CASE("min_distance_process examples")
{
    BigReal x0(0.625, 3);
    auto m = min_distance_process(MapModel::doubling(), x0, 3, {1, 2, 3}, exact_dyadic());
    CHECK(m == std::vector<double>{0.375, 0.125, 0.125});

    PrecisionPolicy p;
    p.bits = 700;
    p.taper = false;
    auto zeros = min_distance_process(MapModel::cusp(), cusp_fixed_point(), 50, {1, 10, 50}, p);
    for (double z : zeros)
    {
        CHECK(z < 1e-150);
    }
}

TEST_CASE("hitting_count examples")
{
    BigReal x0(0.625, 3);
    CHECK(hitting_count(MapModel::doubling(), x0, 5, 0.0, 0.1, exact_dyadic()) == 3);

    SampleEngine e = make_sample_engine(12, 0);
    MapModel beta = MapModel::golden_beta();
    BigReal x(0.0, starting_bits(beta, 2000, bigfixed()));
    sample_invariant(x, beta, e);
    BigReal start = orbit_start(beta, x, 2000, bigfixed());
    for (double r : {0.001, 0.01, 0.1})
    {
        std::int64_t hits = hitting_count(beta, start, 2000, start.to_double(), r, bigfixed());
        CHECK(hits == recurrence_count(beta, start, 2000, {r}, bigfixed()).counts[0]);
    }
}

TEST_CASE("max_psi_process examples")
{
    BigReal x0(0.625, 3);
    PsiSpec neglog;
    PsiMaximum m = max_psi_process(MapModel::doubling(), x0, 3, neglog, exact_dyadic());
    CHECK(m.value == doctest::Approx(std::log(8.0)).epsilon(1e-15));
    CHECK_FALSE(m.infinite);

    PsiSpec power{PsiKind::Power, 2.0};
    CHECK(max_psi_process(MapModel::doubling(), x0, 3, power, exact_dyadic()).value == doctest::Approx(64.0));

    BigReal x1(0.25, 2);
    PsiMaximum inf = max_psi_process(MapModel::doubling(), x1, 4, neglog, exact_dyadic());
    CHECK_FALSE(inf.infinite);
    PsiMaximum at_fixed = max_psi_process(MapModel::doubling(), BigReal(0.0, 2), 4, neglog, exact_dyadic());
    CHECK(at_fixed.infinite);
    CHECK(std::isinf(at_fixed.value));
}

TEST_CASE("psi scalings")
{
    PsiSpec neglog;
    CHECK(neglog.scale(100) == 1.0);
    CHECK(neglog.shift(100) == doctest::Approx(std::log(200.0)));
    CHECK(neglog.tau(0.0) == doctest::Approx(1.0));
    CHECK(neglog.tau(1.5) == doctest::Approx(std::exp(-1.5)));
    PsiSpec power{PsiKind::Power, 1.0};
    CHECK(power.tau(2.0) == doctest::Approx(0.5));
    CHECK(power.scale(50) == doctest::Approx(0.01));
    CHECK(power.shift(50) == 0.0);
    CHECK_THROWS_AS((PsiSpec{PsiKind::Power, -1.0}.validate()), DomainError);
}

TEST_CASE("fast path agrees with BigFixed and with exact integers")
{
    // 200 seeds, n <= 512, radii 2^-4 .. 2^-20
    std::int64_t const n = 512;
    RecurrenceRequest req;
    req.radii = dyadic_radii();
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        SampleEngine e = make_sample_engine(555, seed);
        DyadicStream s = DyadicStream::random(e, n + 64);
        RecurrenceSeries fast = observe_recurrence(s, n, req);
        RecurrenceSeries slow = observe_recurrence(MapModel::doubling(), s.to_real(), n, req, bigfixed());
        REQUIRE(fast.counts == slow.counts);
        if (seed % 20 == 0)
        {
            std::string bits = bit_string(s);
            for (std::size_t i = 0; i < req.radii.size(); ++i)
            {
                auto hits = oracle::doubling_decisions_exact(bits, n, req.radii[i]);
                CHECK(std::count(hits.begin(), hits.end(), true) == fast.counts[i]);
            }
        }
    }
}

TEST_CASE("fast path decides near-radius distances exactly")
{
    // x = 0.b1...bL chosen so that f^j x - x sits a hair away from r
    std::string bits(200, '0');
    bits[0] = '1';
    bits[8] = '1';
    DyadicStream s = DyadicStream::from_bits(bits);
    RecurrenceRequest req;
    req.radii = {std::ldexp(1.0, -9) - std::ldexp(1.0, -60), std::ldexp(1.0, -9), 0.4};
    req.record_hits = true;
    RecurrenceSeries fast = observe_recurrence(s, 150, req);
    for (std::size_t i = 0; i < req.radii.size(); ++i)
    {
        auto hits = oracle::doubling_decisions_exact(bits, 150, req.radii[i]);
        CHECK(std::count(hits.begin(), hits.end(), true) == fast.counts[i]);
    }
}

TEST_CASE("fast path agrees on a 1064-bit stream for all j <= 1000")
{
    SampleEngine e = make_sample_engine(1064, 0);
    DyadicStream s = DyadicStream::random(e, 1064);
    RecurrenceRequest req;
    req.radii = dyadic_radii();
    req.radii.push_back(0.3);
    RecurrenceSeries fast = observe_recurrence(s, 1000, req);
    std::string bits = bit_string(s);
    for (std::size_t i = 0; i < req.radii.size(); ++i)
    {
        auto hits = oracle::doubling_decisions_exact(bits, 1000, req.radii[i]);
        CHECK(std::count(hits.begin(), hits.end(), true) == fast.counts[i]);
    }
}

TEST_CASE("counts are monotone in r and n")
{
    std::vector<double> radii{0.0005, 0.001, 0.005, 0.01, 0.05};
    std::vector<std::int64_t> checkpoints{10, 100, 400, 800};
    for (auto const& map : {MapModel::golden_beta(), MapModel::cusp(), MapModel::gauss()})
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed)
        {
            SampleEngine e = make_sample_engine(77, seed);
            BigReal x(0.0, starting_bits(map, 800, bigfixed()));
            sample_invariant(x, map, e);
            RecurrenceRequest req;
            req.radii = radii;
            req.record_hits = true;
            RecurrenceSeries s = observe_recurrence(map, x, 800, req, bigfixed());
            for (std::size_t i = 1; i < radii.size(); ++i)
            {
                CHECK(s.counts[i] >= s.counts[i - 1]);
            }
            std::int64_t previous = 0;
            for (auto c : checkpoints)
            {
                auto const& h = s.hit_times[2];
                auto prefix = std::count_if(h.begin(), h.end(), [&](std::int64_t t) { return t <= c; });
                CHECK(prefix >= previous);
                previous = prefix;
            }
        }
    }
}

TEST_CASE("psi duality holds exactly")
{
    PsiSpec kinds[] = {PsiSpec{PsiKind::NegLog, 1.0}, PsiSpec{PsiKind::Power, 0.5}, PsiSpec{PsiKind::Power, 3.0}};
    for (auto const& map : {MapModel::doubling(), MapModel::golden_beta(), MapModel::cusp()})
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            SampleEngine e = make_sample_engine(31, seed);
            PrecisionPolicy p = map.id() == MapId::Doubling ? exact_dyadic() : bigfixed();
            BigReal x(0.0, starting_bits(map, 600, p));
            sample_invariant(x, map, e);
            double m = min_distance_process(map, x, 600, {600}, p)[0];
            for (auto const& psi : kinds)
            {
                CHECK(max_psi_process(map, x, 600, psi, p).value == psi(m));
            }
        }
    }
}

TEST_CASE("scaling identity for the NegLog maximum")
{
    // {M <= u + log 2n} = {R_n(e^-u / 2n) = 0}
    std::int64_t const n = 1024;
    PsiSpec psi;
    int agree = 0;
    for (std::uint64_t i = 0; i < 1000; ++i)
    {
        SampleEngine e = make_sample_engine(1000, i);
        DyadicStream s = DyadicStream::random(e, n + 64);
        double u = -1.0 + 3.0 * static_cast<double>(i % 7) / 6.0;
        double r = std::exp(-u) / (2.0 * n);
        RecurrenceRequest req;
        req.radii = {r};
        req.checkpoints = {n};
        RecurrenceSeries series = observe_recurrence(s, n, req);
        bool max_below = psi(series.min_distance[0]) <= psi.level(u, n);
        bool no_return = series.counts[0] == 0;
        agree += max_below == no_return ? 1 : 0;
    }
    CHECK(agree == 1000);
}

TEST_CASE("minimum distance and first hit are dual")
{
    std::int64_t const n = 2048;
    double const r = 1.0 / n;
    for (std::uint64_t i = 0; i < 1000; ++i)
    {
        SampleEngine e = make_sample_engine(2000, i);
        DyadicStream s = DyadicStream::random(e, n + 64);
        RecurrenceRequest req;
        req.radii = {r};
        req.checkpoints = {n / 4, n / 2, n};
        RecurrenceSeries series = observe_recurrence(s, n, req);
        REQUIRE((series.min_distance[2] <= r) == (series.counts[0] > 0));
        REQUIRE(series.min_distance[0] >= series.min_distance[1]);
        REQUIRE(series.min_distance[1] >= series.min_distance[2]);
    }
}
