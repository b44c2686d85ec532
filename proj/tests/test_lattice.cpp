#include <doctest.h>

#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "phasecert/errors.hpp"
#include "phasecert/lattice.hpp"

using namespace phasecert;

namespace
{
std::set<VertexId> bfs_ball(const Lattice& lattice, int n)
{
    const VertexId o = VertexId::origin(lattice.dimension());
    std::map<VertexId, int> dist{{o, 0}};
    std::deque<VertexId> queue{o};
    while (!queue.empty())
    {
        const VertexId v = queue.front();
        queue.pop_front();
        if (dist[v] == n)
            continue;
        for (const auto& c : lattice.couplings())
            if (dist.emplace(v + c.offset, dist[v] + 1).second)
                queue.push_back(v + c.offset);
    }
    std::set<VertexId> out;
    for (const auto& [v, d] : dist)
        out.insert(v);
    return out;
}
} // namespace

TEST_CASE("square balls have 2n^2+2n+1 sites and match a plain BFS")
{
    const Lattice sq = Lattice::square();
    for (int n = 0; n <= 10; ++n)
    {
        const Region b = ball(sq, n);
        CHECK(b.size() == static_cast<std::size_t>(2 * n * n + 2 * n + 1));
        const std::set<VertexId> got(b.vertices().begin(), b.vertices().end());
        CHECK(got == bfs_ball(sq, n));
        if (n > 0)
        {
            const Region smaller = ball(sq, n - 1);
            for (const auto& v : smaller.vertices())
                CHECK(b.contains(v));
        }
    }
}

TEST_CASE("triangular and cubic ball sizes")
{
    const Lattice tri = Lattice::triangular();
    for (int n = 0; n <= 6; ++n)
        CHECK(ball(tri, n).size() == static_cast<std::size_t>(1 + 3 * n * (n + 1)));
    const Lattice cubic = Lattice::hypercubic(3);
    CHECK(ball(cubic, 1).size() == 7u);
    CHECK(ball(cubic, 2).size() == 25u);
}

TEST_CASE("boundary pairs of the unit ball and their reversed couplings")
{
    const Lattice sq = Lattice::square();
    const Region b = ball(sq, 1);
    CHECK(b.internal_edges().size() == 4u);
    CHECK(b.boundary_pairs().size() == 12u);
    for (const auto& bp : b.boundary_pairs())
    {
        const VertexId& x = b.vertices()[bp.inside];
        CHECK(sq.coupling(bp.outside, x) == bp.J);
        CHECK(!b.contains(bp.outside));
    }
    CHECK(b.radius_L() == 2);
    CHECK(ball(sq, 0).radius_L() == 1);
}

TEST_CASE("canonical order is reproducible")
{
    const Lattice sq = Lattice::square();
    const Region a = ball(sq, 4);
    const Region b = ball(sq, 4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.vertices()[i] == b.vertices()[i]);
    CHECK(a.vertices()[0] == VertexId{0, 0});
}

TEST_CASE("from_vertices validation")
{
    const Lattice sq = Lattice::square();
    CHECK_THROWS_AS(Region::from_vertices(sq, {{0, 0}, {0, 0}}, {0, 0}), InvalidArgument);
    CHECK_THROWS_AS(Region::from_vertices(sq, {{1, 0}}, {0, 0}), InvalidArgument);
    CHECK_THROWS_AS(Region::from_vertices(sq, {{0, 0}, {1, 0, 0}}, {0, 0}), InvalidArgument);
    const Region far = Region::from_vertices(sq, {{0, 0}, {3, 0}}, {0, 0});
    CHECK(far.size() == 2u);
    CHECK(far.internal_edges().empty());
    CHECK(far.boundary_pairs().size() == 8u);

    const Lattice chain = Lattice::custom(2, {{{1, 0}, 1.0}, {{-1, 0}, 1.0}}, ParamMode::beta);
    CHECK_THROWS_AS(Region::from_vertices(chain, {{0, 0}, {0, 1}}, {0, 0}), InvalidArgument);
}

TEST_CASE("custom lattices must be symmetric and positive")
{
    CHECK_THROWS_AS(Lattice::custom(2, {{{1, 0}, 1.0}}, ParamMode::beta), InvalidArgument);
    CHECK_THROWS_AS(Lattice::custom(2, {{{1, 0}, 1.0}, {{-1, 0}, 2.0}}, ParamMode::beta), InvalidArgument);
    CHECK_THROWS_AS(Lattice::custom(2, {{{1, 0}, -1.0}, {{-1, 0}, -1.0}}, ParamMode::beta), InvalidArgument);
    CHECK_THROWS_AS(Lattice::custom(2, {{{1, 0}, 2.0}, {{-1, 0}, 2.0}}, ParamMode::p), InvalidArgument);
    const Lattice ok = Lattice::custom(1, {{{1}, 0.5}, {{-1}, 0.5}}, ParamMode::beta);
    CHECK(ok.coupling_sum() == doctest::Approx(1.0));
}

TEST_CASE("edge weights in both parameterisations")
{
    const Lattice p = Lattice::square(ParamMode::p);
    const Lattice b = Lattice::square(ParamMode::beta);
    CHECK(p.edge_weight(1.0, 0.3) == 0.3);
    CHECK(b.edge_weight(1.0, 0.7) == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-15));
    CHECK_THROWS_AS(p.validate_param(1.2), InvalidArgument);
    CHECK_THROWS_AS(b.validate_param(-0.1), InvalidArgument);
}

TEST_CASE("translation keeps the shape")
{
    const Lattice sq = Lattice::square();
    const Region b = ball(sq, 2);
    const Region t = translate_region(b, {5, -3});
    CHECK(t.size() == b.size());
    CHECK(t.contains(VertexId{5, -1}));
    CHECK(!t.contains(VertexId{0, 0}));
    CHECK(t.boundary_pairs().size() == b.boundary_pairs().size());
}
