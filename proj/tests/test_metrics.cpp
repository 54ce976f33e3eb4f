#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "ntci/metrics.hpp"
#include "ntci/rng.hpp"

using namespace ntci;

namespace {

SegmentPath path_of(const TimeGrid& g, int dim, const std::function<double(double, int)>& f) {
    std::vector<double> values(static_cast<std::size_t>(g.node_count() * dim));
    for (std::int64_t i = 0; i < g.node_count(); ++i)
        for (int c = 0; c < dim; ++c)
            values[static_cast<std::size_t>(i * dim + c)] = f(g.time_at(i), c);
    return SegmentPath(g, dim, std::move(values));
}

SegmentPath random_path(const TimeGrid& g, int dim, std::uint64_t seed, std::uint64_t id) {
    rng::GaussianStream s(seed, id);
    std::vector<double> values(static_cast<std::size_t>(g.node_count() * dim));
    for (std::int64_t i = 0; i < g.node_count(); ++i)
        for (int c = 0; c < dim; ++c)
            values[static_cast<std::size_t>(i * dim + c)] =
                s.normal(static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(c));
    return SegmentPath(g, dim, std::move(values));
}

}  // namespace

TEST_CASE("identical paths are at distance zero under every metric") {
    TimeGrid g(0.5, 2.0, 1.0 / 64.0);
    auto a = random_path(g, 2, 5, 0);
    for (auto kind : {PathMetricKind::SumSupSquares, PathMetricKind::UniformSup,
                      PathMetricKind::L2InTime})
        CHECK(distance(a, a, kind) == 0.0);
}

TEST_CASE("unit separation on [0,1]") {
    TimeGrid g(0.25, 1.0, 1.0 / 64.0);
    auto a = path_of(g, 1, [](double, int) { return 0.0; });
    auto b = path_of(g, 1, [](double, int) { return 1.0; });
    CHECK(distance(a, b, PathMetricKind::UniformSup) == doctest::Approx(1.0));
    CHECK(distance(a, b, PathMetricKind::L2InTime) == doctest::Approx(1.0));
    CHECK(distance(a, b, PathMetricKind::SumSupSquares) == doctest::Approx(1.0));
}

TEST_CASE("linear separation on [0,2]") {
    TimeGrid g(0.25, 2.0, 1.0 / 256.0);
    auto a = path_of(g, 1, [](double, int) { return 0.0; });
    auto b = path_of(g, 1, [](double t, int) { return t > 0.0 ? t : 0.0; });
    CHECK(distance(a, b, PathMetricKind::SumSupSquares) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(distance(a, b, PathMetricKind::UniformSup) == doctest::Approx(2.0));
    // trapezoid of t^2 carries an O(dt^2) quadrature error
    CHECK(distance(a, b, PathMetricKind::L2InTime) ==
          doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-5));
}

TEST_CASE("metric errors") {
    TimeGrid g1(0.25, 1.0, 1.0 / 32.0);
    TimeGrid g2(0.25, 2.0, 1.0 / 32.0);
    auto a = path_of(g1, 1, [](double, int) { return 0.0; });
    auto b = path_of(g2, 1, [](double, int) { return 0.0; });
    CHECK_THROWS_AS(distance(a, b, PathMetricKind::UniformSup), ntci::shape_error);

    TimeGrid g3(0.25, 1.5, 1.0 / 32.0);  // non-integer horizon
    auto c = path_of(g3, 1, [](double, int) { return 0.0; });
    CHECK_THROWS_AS(distance(c, c, PathMetricKind::SumSupSquares), ntci::config_error);
}

TEST_CASE("metric axioms and orderings on random triples") {
    TimeGrid g(0.5, 2.0, 1.0 / 16.0);
    const double big_n = 2.0, horizon = 2.0;
    for (std::uint64_t trial = 0; trial < 300; ++trial) {
        auto a = random_path(g, 2, 11, 3 * trial);
        auto b = random_path(g, 2, 11, 3 * trial + 1);
        auto c = random_path(g, 2, 11, 3 * trial + 2);
        for (auto kind : {PathMetricKind::SumSupSquares, PathMetricKind::UniformSup,
                          PathMetricKind::L2InTime}) {
            const double dab = distance(a, b, kind);
            const double dba = distance(b, a, kind);
            const double dac = distance(a, c, kind);
            const double dcb = distance(c, b, kind);
            CHECK(dab == dba);
            CHECK(dab >= 0.0);
            CHECK(dab <= dac + dcb + 1e-12);
        }
        const double d1 = distance(a, b, PathMetricKind::SumSupSquares);
        const double d2 = distance(a, b, PathMetricKind::UniformSup);
        const double dl2 = distance(a, b, PathMetricKind::L2InTime);
        CHECK(d2 <= d1 * (1.0 + 1e-12));
        CHECK(d1 <= std::sqrt(big_n) * d2 * (1.0 + 1e-12));
        CHECK(dl2 <= std::sqrt(horizon) * d2 * (1.0 + 1e-12));
    }
}

TEST_CASE("distance is translation invariant") {
    TimeGrid g(0.5, 1.0, 1.0 / 16.0);
    auto a = random_path(g, 1, 21, 0);
    auto b = random_path(g, 1, 21, 1);
    const double shift = 4.25;
    std::vector<double> av(a.raw().begin(), a.raw().end());
    std::vector<double> bv(b.raw().begin(), b.raw().end());
    for (auto& v : av) v += shift;
    for (auto& v : bv) v += shift;
    SegmentPath a2(g, 1, std::move(av));
    SegmentPath b2(g, 1, std::move(bv));
    for (auto kind : {PathMetricKind::SumSupSquares, PathMetricKind::UniformSup,
                      PathMetricKind::L2InTime})
        CHECK(distance(a, b, kind) == doctest::Approx(distance(a2, b2, kind)).epsilon(1e-12));
}
