#include <doctest.h>

#include <cmath>

#include "recurlab/quadrature.hpp"

using namespace recurlab;

TEST_CASE("Kronrod rule is exact on low-degree polynomials")
{
    auto q = integrate([](double x) { return 3 * x * x - 2 * x + 1; }, {{0, 2}});
    CHECK(q.value == doctest::Approx(8 - 4 + 2).epsilon(1e-15));
    CHECK(q.converged);
}

TEST_CASE("smooth integrands converge to tolerance")
{
    auto q = integrate([](double x) { return std::exp(-x) * std::cos(5 * x); }, make_panels({0, 3, 1, 3}),
                       {1e-13, 0, 4000});
    double exact = (1 - std::exp(-3.0) * (std::cos(15.0) - 5 * std::sin(15.0))) / 26;
    CHECK(std::abs(q.value - exact) < 1e-12);
}

TEST_CASE("singular panels absorb inverse square roots")
{
    auto q = integrate([](double x) { return 1 / std::sqrt(x * (1 - x)); }, {{0, 1, true}}, {1e-12, 0, 4000});
    CHECK(q.value == doctest::Approx(M_PI).epsilon(1e-11));
    CHECK(q.converged);
}

TEST_CASE("jump discontinuities at panel boundaries are harmless")
{
    auto step = [](double x) { return x < 0.3 ? 2.0 : 0.5; };
    auto q = integrate(step, make_panels({0, 1, 0.3}));
    CHECK(q.value == doctest::Approx(0.6 + 0.35).epsilon(1e-15));
    CHECK(q.subdivisions <= 4);
}

TEST_CASE("unreachable tolerance is flagged, not hidden")
{
    auto q = integrate([](double x) { return std::sin(1 / (x + 1e-9)); }, {{0, 1}}, {1e-14, 0, 10});
    CHECK_FALSE(q.converged);
    CHECK(q.error > 0);
}

TEST_CASE("make_panels sorts and deduplicates")
{
    auto panels = make_panels({1, 0, 0.5, 0.5});
    REQUIRE(panels.size() == 2);
    CHECK(panels[0].lo == 0);
    CHECK(panels[0].hi == 0.5);
    CHECK(panels[1].hi == 1);
}

TEST_CASE("log-domain quadrature survives underflow")
{
    // log of the integral of exp(-2000 x) over [0, 1]
    auto q = integrate_log([](double x) { return -2000 * x; }, {{0, 1}});
    CHECK(q.log_value == doctest::Approx(-std::log(2000.0)).epsilon(1e-12));

    // exp(-1000 - 50 x) underflows everywhere in doubles
    auto deep = integrate_log([](double x) { return -1000 - 50 * x; }, {{0, 1}});
    double expected = -1000 + std::log((1 - std::exp(-50.0)) / 50);
    CHECK(deep.log_value == doctest::Approx(expected).epsilon(1e-13));

    auto zero = integrate_log([](double) { return -INFINITY; }, {{0, 1}});
    CHECK(std::isinf(zero.log_value));
}
