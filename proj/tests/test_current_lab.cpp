#include <doctest.h>

#include <cmath>

#include "golden.hpp"
#include "phasecert/current_lab.hpp"
#include "phasecert/errors.hpp"

using namespace phasecert;

namespace
{
CurrentGraph triangle(bool ghost)
{
    return CurrentGraph::custom({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, ghost);
}

CurrentGraph four_cycle()
{
    return CurrentGraph::custom({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}},
                                false);
}
} // namespace

TEST_CASE("sources and weights of a single current")
{
    const CurrentGraph g = triangle(true);
    REQUIRE(g.pairs().size() == 6u);
    Current c{{1, 0, 0, 0, 0, 0}};
    CHECK(sources(g, c) == std::vector<int>{0, 1});
    c.multiplicity = {2, 0, 0, 1, 0, 0};
    CHECK(sources(g, c) == std::vector<int>{0, g.ghost()});
    CHECK(weight(g, c, 0.5, 0.2) == doctest::Approx(0.25 / 2.0 * 0.2));
    CHECK(g.mask({0, g.ghost()}) == 0b1001u);
}

TEST_CASE("factorized and enumerated source sums agree")
{
    const CurrentGraph g = triangle(true);
    for (const std::vector<int>& A : {std::vector<int>{}, {0, 1}, {0, g.ghost()}, {0, 1, 2, g.ghost()}})
        for (int N : {1, 3, 5})
        {
            const double f = source_sum(g, A, 0.4, 0.2, N, SumMethod::factorized);
            const double e = source_sum(g, A, 0.4, 0.2, N, SumMethod::enumerate);
            CHECK(std::fabs(f - e) <= 1e-13 * std::max(1.0, e));
        }
    CHECK(source_sum(g, {0}, 0.4, 0.2, 3) == 0.0);
}

TEST_CASE("correlations via currents match spin enumeration")
{
    const auto& gold = golden()["currents"];
    const CurrentGraph g = triangle(true);
    const auto& t = gold["triangle_beta0.4_h0.2"];
    CHECK(std::fabs(expectation_via_currents(g, {0}, 0.4, 0.2, 14) - t["m0"].get<double>()) < 1e-6);
    CHECK(std::fabs(correlation_via_currents(g, 0, 1, 0.4, 0.2, 14) - t["c01"].get<double>()) < 1e-6);
    CHECK(std::fabs(expectation_via_currents(g, {0, 1, 2}, 0.4, 0.2, 14) - t["c012"].get<double>()) < 1e-6);

    const CurrentGraph free = triangle(false);
    const auto& z = gold["triangle_beta0.5_h0"];
    CHECK(std::fabs(correlation_via_currents(free, 0, 1, 0.5, 0.0, 14) - z["c01"].get<double>()) < 1e-6);
    CHECK(expectation_via_currents(g, {0}, 0.5, 0.0, 10) == 0.0);
}

TEST_CASE("truncated correlations approach the limit")
{
    const CurrentGraph g = triangle(false);
    const double limit = golden()["currents"]["triangle_beta0.5_h0"]["c01"].get<double>();
    double prev = 1.0;
    for (int N : {2, 4, 8, 14})
    {
        const double err = std::fabs(correlation_via_currents(g, 0, 1, 0.5, 0.0, N) - limit);
        CHECK(err <= prev);
        prev = err;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("switching identity: factorized against pairwise enumeration")
{
    const CurrentGraph g = triangle(true);
    const int gh = g.ghost();
    for (const char* name : {"one", "even_total", "connect(0,2)"})
    {
        const CurrentFunctional F = FSelector::parse(name).functional();
        CAPTURE(name);
        for (int N : {2, 3, 4})
        {
            const SwitchingResult a = switching_check(g, {0, 1}, 0, gh, F, 0.4, 0.3, N);
            const SwitchingResult b = switching_check_bruteforce(g, {0, 1}, 0, gh, F, 0.4, 0.3, N);
            CAPTURE(N);
            CHECK(std::fabs(a.lhs - b.lhs) <= 1e-12 * std::max(1.0, b.lhs));
            CHECK(std::fabs(a.rhs - b.rhs) <= 1e-12 * std::max(1.0, b.rhs));
        }
        for (int N : {2, 4, 6, 8})
            CHECK(switching_check(g, {0, 1}, 0, gh, F, 0.4, 0.3, N).relative_discrepancy() < 1e-10);
    }
    CHECK(FSelector::parse("connect(0,2)").to_string() == "connect(0,2)");
    CHECK_THROWS(FSelector::parse("connect(0"));
    const CurrentFunctional one = FSelector::parse("one").functional();
    CHECK_THROWS_AS(switching_check(g, {0, 1}, 1, 1, one, 0.4, 0.3, 2), InvalidArgument);
}

TEST_CASE("connectivity in a current")
{
    const CurrentGraph g = four_cycle();
    CHECK(connected_in(g, {1, 0, 1, 0}, 0, 3));
    CHECK(!connected_in(g, {1, 0, 0, 1}, 0, 3));
    CHECK(connected_in(g, {0, 0, 0, 0}, 2, 2));
}

TEST_CASE("backbones on the four-cycle match the brute-force grouping")
{
    const CurrentGraph g = four_cycle();
    const auto groups = backbone_decomposition(g, 0, 3, 0.5, 0.0, 12);
    const auto& gold = golden()["currents"]["four_cycle_backbone_beta0.5_N12"];
    REQUIRE(groups.size() == gold.size());
    double total = 0.0;
    for (const auto& want : gold)
    {
        bool found = false;
        for (const auto& got : groups)
        {
            if (got.path.size() != want["path"].size())
                continue;
            bool same = true;
            for (std::size_t i = 0; i < got.path.size(); ++i)
                same = same &&
                       g.sites()[got.path[i].from] == VertexId(want["path"][i][0].get<std::vector<int>>()) &&
                       g.sites()[got.path[i].to] == VertexId(want["path"][i][1].get<std::vector<int>>());
            if (!same)
                continue;
            found = true;
            CHECK(got.rho == doctest::Approx(want["rho"].get<double>()).epsilon(1e-12));
        }
        CHECK(found);
        total += want["rho"].get<double>();
    }
    CHECK(total == doctest::Approx(correlation_via_currents(g, 0, 3, 0.5, 0.0, 12)).epsilon(1e-12));
}

TEST_CASE("backbone extraction")
{
    const CurrentGraph g = four_cycle();
    // all four pairs open: the least path goes through (0,1)
    const auto path = extract_backbone(g, Current{{1, 2, 1, 2}}, 0, 3);
    REQUIRE(path.size() == 2u);
    CHECK(path[0].to == 2);
    CHECK(path[1].to == 3);
    CHECK_THROWS_AS(extract_backbone(g, Current{{1, 0, 0, 0}}, 0, 3), NoPath);
}

TEST_CASE("graph limits")
{
    std::vector<VertexId> six;
    for (int i = 0; i < 6; ++i)
        six.push_back({i, 0});
    CHECK_THROWS_AS(CurrentGraph::custom(six, {}, false), InvalidArgument);
}
