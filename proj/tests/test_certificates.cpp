#include <doctest.h>

#include <cmath>

#include "golden.hpp"
#include "phasecert/certificates.hpp"
#include "phasecert/errors.hpp"

using namespace phasecert;

namespace
{
const double kBetaC = 0.5 * std::log(1.0 + std::sqrt(2.0));

PhiOptions exact_only()
{
    PhiOptions o;
    o.allow_monte_carlo = false;
    return o;
}
} // namespace

TEST_CASE("percolation phi closed forms")
{
    const Lattice sq = Lattice::square();
    CHECK(phi_percolation(sq, ball(sq, 0), 0.2).value == doctest::Approx(0.8).epsilon(1e-15));
    const PhiResult r = phi_percolation(sq, ball(sq, 1), 0.25);
    CHECK(r.value == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(r.method == PhiMethod::exact);
    CHECK(r.upper_confidence >= r.value);
    CHECK(r.upper_confidence - r.value <= 1e-9);
    for (const auto& [key, want] : golden()["perc"]["phi_ball2"].items())
        CHECK(phi_percolation(sq, ball(sq, 2), std::stod(key)).value ==
              doctest::Approx(want.get<double>()).epsilon(1e-12));
}

TEST_CASE("Ising phi closed forms and golden values")
{
    const Lattice sq = Lattice::square(ParamMode::beta);
    CHECK(phi_ising(sq, ball(sq, 0), 0.3).value == doctest::Approx(4 * std::tanh(0.3)).epsilon(1e-15));
    CHECK(phi_ising(sq, ball(sq, 2), 0.0).value == 0.0);
    CHECK(phi_ising(sq, ball(sq, 1), 0.3).value ==
          doctest::Approx(golden()["ising"]["phi_ball1_0.3"].get<double>()).epsilon(1e-12));
    CHECK(phi_ising(sq, ball(sq, 2), 0.3).value ==
          doctest::Approx(golden()["ising"]["phi_ball2_0.3"].get<double>()).epsilon(1e-12));
}

TEST_CASE("p and beta parameterisations give the same phi")
{
    const Lattice p = Lattice::square(ParamMode::p);
    const Lattice b = Lattice::square(ParamMode::beta);
    for (double beta : {0.1, 0.3, 0.8})
        for (int n : {0, 1, 2})
            CHECK(std::fabs(phi_percolation(b, ball(b, n), beta).value -
                            phi_percolation(p, ball(p, n), -std::expm1(-beta)).value) < 1e-12);
}

TEST_CASE("certify and refuse")
{
    const Lattice sq = Lattice::square();
    const auto ok = certify_subcritical(Model::percolation, sq, ball(sq, 1), 0.25);
    REQUIRE(std::holds_alternative<Certificate>(ok));
    CHECK(std::get<Certificate>(ok).exact);
    const auto no = certify_subcritical(Model::percolation, sq, ball(sq, 1), 0.5);
    REQUIRE(std::holds_alternative<Refusal>(no));
    CHECK(std::get<Refusal>(no).phi.value == doctest::Approx(3.0));
}

TEST_CASE("critical roots on the square lattice")
{
    const Lattice sq = Lattice::square();
    const auto& g = golden();
    CHECK(critical_root(Model::percolation, sq, ball(sq, 0)).param == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(critical_root(Model::percolation, sq, ball(sq, 1)).param ==
          doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-8));
    CHECK(std::fabs(critical_root(Model::percolation, sq, ball(sq, 2)).param -
                    g["perc"]["root_ball2"].get<double>()) < 1e-8);
    const Lattice bs = Lattice::square(ParamMode::beta);
    CHECK(std::fabs(critical_root(Model::ising, bs, ball(bs, 0)).param - std::atanh(0.25)) < 1e-8);
    CHECK(std::fabs(critical_root(Model::ising, bs, ball(bs, 1)).param - g["ising"]["root_ball1"].get<double>()) <
          1e-8);
    CHECK(std::fabs(critical_root(Model::ising, bs, ball(bs, 2)).param - g["ising"]["root_ball2"].get<double>()) <
          1e-8);
    // beta mode root maps to the p mode root
    const double b0 = critical_root(Model::percolation, bs, ball(bs, 0)).param;
    CHECK(-std::expm1(-b0) == doctest::Approx(0.25).epsilon(1e-8));
}

TEST_CASE("best bound is safe and improves with the radius")
{
    const Lattice sq = Lattice::square();
    const BestBound perc = best_bound(Model::percolation, sq, 2, 1e-9, exact_only());
    REQUIRE(perc.best_exact);
    for (const auto& row : perc.table)
    {
        REQUIRE(row.root);
        CHECK(row.root->param <= 0.5);
    }
    CHECK(perc.table[2].root->param > perc.table[1].root->param);
    CHECK(perc.table[1].root->param > perc.table[0].root->param);
    CHECK(*perc.best_exact == 2u);

    const Lattice bs = Lattice::square(ParamMode::beta);
    const BestBound ising = best_bound(Model::ising, bs, 2, 1e-9, exact_only());
    for (const auto& row : ising.table)
        CHECK(row.root->param <= kBetaC);
}

TEST_CASE("phi at the critical point is at least one on small balls")
{
    const Lattice sq = Lattice::square();
    const Lattice bs = Lattice::square(ParamMode::beta);
    for (int n = 0; n <= 2; ++n)
    {
        CHECK(phi_percolation(sq, ball(sq, n), 0.5).value >= 1.0 - 1e-6);
        CHECK(phi_ising(bs, ball(bs, n), kBetaC).value >= 1.0 - 1e-6);
    }
}

TEST_CASE("roots on a chain and the empty bracket")
{
    const Lattice chain = Lattice::custom(1, {{{1}, 1.0}, {{-1}, 1.0}}, ParamMode::p);
    CHECK(critical_root(Model::percolation, chain, ball(chain, 0)).param == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_THROWS_AS(critical_root(Model::percolation, chain, ball(chain, 0), 0.0), InvalidArgument);
    const Lattice weak = Lattice::custom(1, {{{1}, 1e-3}, {{-1}, 1e-3}}, ParamMode::beta);
    CHECK_THROWS_AS(critical_root(Model::ising, weak, ball(weak, 0)), NoRoot);
}

TEST_CASE("Monte Carlo fallback agrees with the exact value")
{
    const Lattice sq = Lattice::square();
    const Region b = ball(sq, 2);
    const double exact = phi_percolation(sq, b, 0.3).value;
    PhiOptions forced;
    forced.exact.edge_cap = 4;
    forced.mc_samples = 200000;
    const PhiResult mc = phi_percolation(sq, b, 0.3, forced);
    CHECK(mc.method == PhiMethod::monte_carlo);
    CHECK(std::fabs(mc.value - exact) < 4.0 * mc.std_error);
    CHECK(mc.upper_confidence > mc.value);
    forced.allow_monte_carlo = false;
    CHECK_THROWS_AS(phi_percolation(sq, b, 0.3, forced), CapExceeded);

    const Lattice bs = Lattice::square(ParamMode::beta);
    const double ising_exact_value = phi_ising(bs, ball(bs, 1), 0.3).value;
    PhiOptions ising_forced;
    ising_forced.exact.spin_cap = 2;
    ising_forced.mc_sweeps = 20000;
    const PhiResult imc = phi_ising(bs, ball(bs, 1), 0.3, ising_forced);
    CHECK(imc.method == PhiMethod::monte_carlo);
    CHECK(std::fabs(imc.value - ising_exact_value) < 4.0 * imc.std_error);
}

TEST_CASE("susceptibility and decay bounds")
{
    const Lattice sq = Lattice::square();
    const Region b = ball(sq, 1);
    const PhiResult r = phi_percolation(sq, b, 0.25);
    CHECK(chi_upper_bound(b, r) == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(decay_upper_bound(b, r, 0) == 1.0);
    CHECK(decay_upper_bound(b, r, 5) == doctest::Approx(0.75 * 0.75).epsilon(1e-9));
    const PhiResult bad = phi_percolation(sq, b, 0.5);
    CHECK_THROWS_AS(chi_upper_bound(b, bad), InvalidArgument);
    CHECK_THROWS_AS(decay_upper_bound(b, r, -1), InvalidArgument);
}

TEST_CASE("greedy growth never ends above the best starting ball")
{
    const Lattice sq = Lattice::square();
    const GrowResult g = greedy_grow(Model::percolation, sq, 0.3, 9, exact_only());
    CHECK(g.region.size() <= 9u);
    CHECK(g.phi.value <= phi_percolation(sq, ball(sq, 1), 0.3).value + 1e-15);
    CHECK(g.phi.value <= phi_percolation(sq, ball(sq, 0), 0.3).value + 1e-15);
    for (std::size_t i = 1; i < g.trajectory.size(); ++i)
        CHECK(g.trajectory[i] < g.trajectory[i - 1]);
    CHECK_THROWS_AS(greedy_grow(Model::percolation, sq, 0.3, 0), InvalidArgument);
}
