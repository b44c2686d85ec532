#include <doctest.h>

#include <cmath>

#include "phasecert/errors.hpp"
#include "phasecert/exact_engine.hpp"
#include "phasecert/ising_mc.hpp"
#include "phasecert/statistics.hpp"

using namespace phasecert;

namespace
{
// exact reference with the frozen exterior folded into site fields
ExactIsing exact_with_boundary(const Region& r, double beta, double h, Boundary boundary)
{
    IsingSpec s = IsingSpec::from_region(r);
    const IsingGraph g(r, boundary);
    s.fields.assign(r.size(), h);
    for (int v = 0; v < g.size(); ++v)
        s.fields[v] += beta * g.exterior_coupling(v);
    return ising_exact(s, beta, h, true);
}

MCEstimate sample_origin(const Region& r, double beta, double h, Boundary boundary, std::uint64_t seed)
{
    const IsingGraph g(r, boundary);
    std::vector<double> series;
    run_chain(g, beta, h, 40000, seed, {}, [&](const std::vector<std::int8_t>& s) { series.push_back(s[0]); });
    return batch_mean_estimate(series, seed, "m0");
}
} // namespace

TEST_CASE("plus boundary exterior couplings")
{
    const Lattice sq = Lattice::square();
    const IsingGraph g(sq, 1, Boundary::plus);
    CHECK(g.size() == 5);
    CHECK(g.exterior_coupling(0) == 0.0);
    for (int v = 1; v < 5; ++v)
        CHECK(g.exterior_coupling(v) == doctest::Approx(3.0));
    const IsingGraph f(sq, 1, Boundary::free);
    CHECK(f.exterior_coupling(1) == 0.0);
    CHECK(parse_boundary(to_string(Boundary::plus)) == Boundary::plus);
    CHECK_THROWS(parse_boundary("periodic"));
}

TEST_CASE("chain magnetization agrees with exact enumeration within 4 sigma")
{
    const Lattice sq = Lattice::square();
    struct Case
    {
        int n;
        double beta;
        double h;
        Boundary boundary;
    };
    const Case cases[] = {
        {1, 0.3, 0.1, Boundary::free},  {1, 0.5, 0.0, Boundary::plus}, {2, 0.35, 0.0, Boundary::plus},
        {2, 0.25, 0.2, Boundary::free}, {2, 0.6, 0.05, Boundary::free},
    };
    std::uint64_t seed = 10;
    for (const auto& c : cases)
    {
        const Region r = ball(sq, c.n);
        const double exact = exact_with_boundary(r, c.beta, c.h, c.boundary).magnetizations[0];
        const MCEstimate m = sample_origin(r, c.beta, c.h, c.boundary, ++seed);
        CAPTURE(c.n);
        CAPTURE(c.beta);
        CHECK(std::fabs(m.mean - exact) < 4.0 * m.std_error + 1e-3);
    }
}

TEST_CASE("two-point function and susceptibility against exact values")
{
    const Lattice sq = Lattice::square();
    const Region r = ball(sq, 2);
    const ExactIsing exact = exact_with_boundary(r, 0.3, 0.0, Boundary::plus);
    const auto tp = estimate_two_point(sq, 2, 0.3, Boundary::plus, 40000, 5);
    REQUIRE(tp.size() == 1u);
    CHECK(tp[0].distance == 1);
    const int e1 = *r.index_of(VertexId{1, 0});
    CHECK(std::fabs(tp[0].estimate.mean - exact.correlations[e1]) < 4.0 * tp[0].estimate.std_error + 1e-3);

    double chi = 0.0;
    for (double c : exact.correlations)
        chi += c;
    const MCEstimate est = estimate_ising_susceptibility(sq, 2, 0.3, Boundary::plus, 40000, 6);
    CHECK(std::fabs(est.mean - chi) < 4.0 * est.std_error + 1e-3);
}

TEST_CASE("free boundary without field has zero magnetization")
{
    const Lattice sq = Lattice::square();
    const MCEstimate m = estimate_magnetization(sq, 6, 0.3, Boundary::free, 20000, 8);
    CHECK(std::fabs(m.mean) < 4.0 * m.std_error + 1e-3);
}

TEST_CASE("runs are reproducible from the seed")
{
    const Lattice sq = Lattice::square();
    const MCEstimate a = estimate_magnetization(sq, 4, 0.4, Boundary::plus, 2000, 99);
    const MCEstimate b = estimate_magnetization(sq, 4, 0.4, Boundary::plus, 2000, 99);
    const MCEstimate c = estimate_magnetization(sq, 4, 0.4, Boundary::plus, 2000, 100);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean != c.mean);
}

TEST_CASE("Wolff moves never flip a cluster bound to the field")
{
    const Lattice sq = Lattice::square();
    const IsingGraph g(sq, 3, Boundary::free);
    IsingChain chain(g, 0.2, 50.0, 1);
    chain.fill(1);
    for (int i = 0; i < 200; ++i)
        chain.wolff_step();
    CHECK(chain.magnetization() == 1.0);
}

TEST_CASE("strictly increasing series")
{
    std::vector<MCEstimate> s{{1.0, 0.1, 1, 0, ""}, {2.0, 0.1, 1, 0, ""}, {3.0, 0.1, 1, 0, ""}};
    CHECK(strictly_increasing(s));
    s[2].mean = 2.2;
    CHECK(!strictly_increasing(s));
}

TEST_CASE("partial susceptibility grows with the ball at criticality")
{
    const Lattice sq = Lattice::square();
    const double beta_c = 0.5 * std::log(1.0 + std::sqrt(2.0));
    const int ns[] = {2, 4, 8};
    const DivergenceReport r = check_critical_divergence(sq, beta_c, ns, 4000, 12);
    REQUIRE(r.points.size() == 3u);
    CHECK(r.strictly_increasing);
}
