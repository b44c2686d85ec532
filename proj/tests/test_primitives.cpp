#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "golden.hpp"
#include "phasecert/errors.hpp"
#include "phasecert/parallel.hpp"
#include "phasecert/philox.hpp"
#include "phasecert/statistics.hpp"
#include "phasecert/summation.hpp"
#include "phasecert/union_find.hpp"

using namespace phasecert;

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    for (const auto& kat : golden()["philox_kat"])
    {
        const auto c = kat["counter"].get<std::vector<std::uint32_t>>();
        const auto k = kat["key"].get<std::vector<std::uint32_t>>();
        const auto want = kat["output"].get<std::vector<std::uint32_t>>();
        const PhiloxCounter out = philox4x32({c[0], c[1], c[2], c[3]}, {k[0], k[1]});
        for (int i = 0; i < 4; ++i)
            CHECK(out[i] == want[i]);
    }
}

TEST_CASE("counter and sequential generators draw from the same blocks")
{
    const CounterRng counter(42);
    PhiloxEngine engine(42, 7);
    for (std::uint64_t i = 0; i < 8; ++i)
    {
        const std::uint64_t first = engine();
        CHECK(first == counter.bits(7, i));
        engine();
    }
    CHECK(counter.uniform(3, 5) == CounterRng(42).uniform(3, 5));
    CHECK(counter.uniform(3, 5) != CounterRng(43).uniform(3, 5));
}

TEST_CASE("uniforms are spread over [0,1)")
{
    const CounterRng rng(9);
    NeumaierSum s;
    const int n = 200000;
    for (int i = 0; i < n; ++i)
    {
        const double u = rng.uniform(1, i);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        s += u;
    }
    CHECK(std::fabs(s.value() / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
    PhiloxEngine engine(1, 0);
    for (int i = 0; i < 1000; ++i)
        REQUIRE(engine.below(7) < 7u);
}

TEST_CASE("union-find agrees with breadth-first components on random graphs")
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial)
    {
        const int n = 2 + static_cast<int>(gen() % 30);
        const int m = static_cast<int>(gen() % 60);
        std::vector<std::pair<int, int>> edges;
        UnionFind uf(n);
        RollbackUnionFind ruf(n);
        for (int e = 0; e < m; ++e)
        {
            const int a = static_cast<int>(gen() % n), b = static_cast<int>(gen() % n);
            edges.emplace_back(a, b);
            uf.unite(a, b);
            ruf.unite(a, b);
        }
        std::vector<int> comp(n, -1);
        for (int s = 0; s < n; ++s)
        {
            if (comp[s] >= 0)
                continue;
            std::vector<int> stack{s};
            comp[s] = s;
            while (!stack.empty())
            {
                const int v = stack.back();
                stack.pop_back();
                for (auto [a, b] : edges)
                    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}})
                        if (x == v && comp[y] < 0)
                        {
                            comp[y] = s;
                            stack.push_back(y);
                        }
            }
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
            {
                REQUIRE(uf.connected(a, b) == (comp[a] == comp[b]));
                REQUIRE((ruf.find(a) == ruf.find(b)) == (comp[a] == comp[b]));
            }
    }
}

TEST_CASE("rollback restores earlier partitions")
{
    RollbackUnionFind uf(5);
    CHECK(uf.unite(0, 1));
    CHECK(!uf.unite(1, 0));
    CHECK(uf.unite(2, 3));
    CHECK(uf.depth() == 2u);
    uf.rollback();
    CHECK(uf.find(2) != uf.find(3));
    CHECK(uf.find(0) == uf.find(1));
    uf.rollback();
    CHECK(uf.find(0) != uf.find(1));
}

TEST_CASE("compensated summation")
{
    NeumaierSum s;
    s += 1.0;
    s += 1e100;
    s += 1.0;
    s += -1e100;
    CHECK(s.value() == 2.0);
}

TEST_CASE("parallel_for result does not depend on worker count")
{
    auto run = [](std::size_t workers) {
        worker_count() = workers;
        std::vector<double> slot(100);
        parallel_for(slot.size(), [&](std::size_t i) { slot[i] = std::sin(static_cast<double>(i)); });
        NeumaierSum s;
        for (double x : slot)
            s += x;
        return s.value();
    };
    const double one = run(1);
    CHECK(run(4) == one);
    worker_count() = 0;
    CHECK_THROWS_AS(parallel_for(3, [](std::size_t i) { if (i == 1) throw InvalidArgument("x"); }), InvalidArgument);
}

TEST_CASE("estimators")
{
    const std::vector<double> ind{1, 0, 0, 1, 1, 0, 0, 0};
    const MCEstimate b = binomial_estimate(ind, 3, "x");
    CHECK(b.mean == doctest::Approx(0.375));
    CHECK(b.std_error == doctest::Approx(std::sqrt(0.375 * 0.625 / 8)));
    CHECK(b.samples == 8u);

    std::vector<double> series(1000);
    for (std::size_t i = 0; i < series.size(); ++i)
        series[i] = static_cast<double>(i % 10);
    const MCEstimate m = batch_mean_estimate(series, 1, "y", 10);
    CHECK(m.mean == doctest::Approx(4.5));
    CHECK(m.std_error == doctest::Approx(0.0).epsilon(1e-12));

    CHECK(wilson_upper(0.0, 100) > 0.0);
    CHECK(wilson_upper(0.5, 1e6) == doctest::Approx(0.5 + kZ999 * 0.0005).epsilon(1e-4));
    CHECK(wilson_upper(1.0, 10) <= 1.0);

    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const LinearFit fit = least_squares(x, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
    CHECK(fit.r2 == doctest::Approx(1.0));
    const std::vector<double> one{1.0};
    CHECK_THROWS(least_squares(one, one));
}

TEST_CASE("autocorrelation time of an AR(1) series")
{
    std::mt19937_64 gen(11);
    std::normal_distribution<double> noise;
    const double rho = 0.8;
    std::vector<double> s(200000);
    double v = 0.0;
    for (auto& x : s)
    {
        v = rho * v + noise(gen);
        x = v;
    }
    // tau_int = (1 + rho) / (2 (1 - rho)) = 4.5
    CHECK(integrated_autocorrelation_time(s) == doctest::Approx(4.5).epsilon(0.1));
    const std::vector<double> flat(100, 2.0);
    CHECK(integrated_autocorrelation_time(flat) == 0.5);
}
