#include <doctest.h>

#include <cmath>

#include "golden.hpp"
#include "phasecert/errors.hpp"
#include "phasecert/verify_suite.hpp"

using namespace phasecert;

namespace
{
const std::vector<double> kBeta8{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
}

TEST_CASE("percolation differential inequality holds on small balls")
{
    const Lattice sq = Lattice::square();
    for (int n : {0, 1})
    {
        const InequalityReport r =
            check_perc_differential(sq, n, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
        CHECK(r.pass);
        CHECK(r.lhs.size() == 9u);
        CHECK(r.min_margin >= -1e-6);
    }
}

TEST_CASE("finite differences are stable under step halving")
{
    const Lattice sq = Lattice::square();
    const InequalityReport a = check_perc_differential(sq, 1, {0.3, 0.6}, 1e-5);
    const InequalityReport b = check_perc_differential(sq, 1, {0.3, 0.6}, 5e-6);
    for (std::size_t i = 0; i < a.lhs.size(); ++i)
        CHECK(std::fabs(a.lhs[i] - b.lhs[i]) < 1e-6);
    CHECK_THROWS_AS(check_perc_differential(sq, 1, {1e-6}, 1e-5), InvalidArgument);
}

TEST_CASE("subset infimum never exceeds phi of the ball or the origin alone")
{
    const Lattice sq = Lattice::square();
    const Region b = ball(sq, 1);
    const SubsetInfimum inf = subset_phi_infimum(Model::percolation, sq, b, 0.3);
    CHECK(inf.value <= phi_percolation(sq, b, 0.3).value + 1e-15);
    CHECK(inf.value <= phi_percolation(sq, ball(sq, 0), 0.3).value + 1e-15);
    CHECK(!inf.argmin.empty());
    const Region arg = Region::from_vertices(sq, inf.argmin, VertexId{0, 0});
    CHECK(phi_percolation(sq, arg, 0.3).value == doctest::Approx(inf.value).epsilon(1e-12));
}

TEST_CASE("BK decomposition scenarios")
{
    const Lattice sq = Lattice::square();
    const auto scenarios = bk_scenarios(sq);
    REQUIRE(scenarios.size() == 3u);
    for (const auto& s : scenarios)
    {
        const InequalityReport r = check_bk_decomposition(sq, s.S, s.A, s.B, s.u, {0.2, 0.5, 0.8});
        CAPTURE(s.name);
        CHECK(r.relation == Relation::less_equal);
        CHECK(r.pass);
    }
    // u already in B
    CHECK(connect_within(sq, {{0, 0}}, {{0, 0}}, VertexId{0, 0}, 0.3) == 1.0);
    // a single edge from the origin to B
    CHECK(connect_within(sq, {{0, 0}, {1, 0}}, {{1, 0}}, VertexId{0, 0}, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("Ising differential: the literal statement fails on the unit ball")
{
    const Lattice bs = Lattice::square(ParamMode::beta);
    const InequalityReport r = check_ising_differential(bs, 1, kBeta8, 0.1);
    CHECK(r.in_scope);
    // pinned: the whole-lattice phi infimum dwarfs the derivative
    CHECK(!r.pass);
    const auto& gold = golden()["ising_diff_ball1_h0.1"];
    for (std::size_t i = 0; i < gold.size(); ++i)
    {
        CHECK(r.lhs[i] == doctest::Approx(gold[i]["lhs"].get<double>()).epsilon(1e-6));
        CHECK(r.rhs[i] == doctest::Approx(gold[i]["rhs_literal"].get<double>()).epsilon(1e-6));
    }
}

TEST_CASE("Ising differential in finite-volume form holds and matches the oracle")
{
    const Lattice bs = Lattice::square(ParamMode::beta);
    const InequalityReport r = check_ising_differential_finite_volume(bs, 1, kBeta8, 0.1);
    CHECK(r.pass);
    const auto& gold = golden()["ising_diff_ball1_h0.1"];
    for (std::size_t i = 0; i < gold.size(); ++i)
    {
        CHECK(r.lhs[i] == doctest::Approx(gold[i]["lhs"].get<double>()).epsilon(1e-6));
        CHECK(r.rhs[i] == doctest::Approx(gold[i]["rhs_finite_volume"].get<double>()).epsilon(1e-6));
    }
    CHECK(!r.note.empty());
}

TEST_CASE("double-current cluster law reproduces 1 - m^2")
{
    const Lattice bs = Lattice::square(ParamMode::beta);
    const Region b = ball(bs, 1);
    const auto law = double_current_cluster_law(b, 0.4, 0.1);
    double total = 0.0, with_origin = 0.0;
    for (std::size_t mask = 0; mask < law.size(); ++mask)
    {
        CHECK(law[mask] >= -1e-15);
        total += law[mask];
        if (mask & 1u)
            with_origin += law[mask];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    const double m = ising_observables(b, 0.4, 0.1).magnetizations[0];
    CHECK(with_origin == doctest::Approx(1.0 - m * m).epsilon(1e-10));
}

TEST_CASE("Ising differential scope and field checks")
{
    const Lattice bs = Lattice::square(ParamMode::beta);
    CHECK(!check_ising_differential(bs, 0, {0.3}, 0.1).in_scope);
    CHECK_THROWS_AS(check_ising_differential(bs, 1, {0.3}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(check_ising_differential_finite_volume(bs, 1, {0.3}, 0.0), InvalidArgument);
}

TEST_CASE("modified Simon inequality on the 4x3 grid")
{
    const Lattice bs = Lattice::square(ParamMode::beta);
    const SimonInstance s = simon_instance(bs);
    CHECK(s.Lambda.size() == 12u);
    const InequalityReport r = check_modified_simon(bs, s.Lambda, s.S, s.z, {0.2, 0.3, 0.4}, 0.0);
    CHECK(r.pass);
    const auto& gold = golden()["simon_grid4x3"];
    for (std::size_t i = 0; i < gold.size(); ++i)
    {
        CHECK(r.lhs[i] == doctest::Approx(gold[i]["lhs"].get<double>()).epsilon(1e-10));
        CHECK(r.rhs[i] == doctest::Approx(gold[i]["rhs"].get<double>()).epsilon(1e-10));
    }
}

TEST_CASE("GHS differential inequality")
{
    const Lattice bs = Lattice::square(ParamMode::beta);
    const InequalityReport r = check_ghs_differential(bs, 1, {0.2, 0.4}, {0.05, 0.1, 0.2, 0.3, 0.4, 0.5});
    CHECK(r.lhs.size() == 12u);
    CHECK(r.pass);
}

TEST_CASE("report bookkeeping")
{
    InequalityReport r;
    r.relation = Relation::less_equal;
    r.tolerance = 1e-9;
    r.add({1.0}, 1.0, 2.0);
    r.add({2.0}, 3.0, 2.5);
    r.finalize();
    CHECK(r.min_margin == doctest::Approx(-0.5));
    CHECK(!r.pass);
    CHECK(to_string(Relation::greater_equal) != to_string(Relation::less_equal));
}
