#include "phasecert/verify_suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "phasecert/errors.hpp"
#include "phasecert/exact_engine.hpp"
#include "phasecert/parallel.hpp"
#include "phasecert/summation.hpp"
#include "phasecert/union_find.hpp"

namespace phasecert
{

std::string to_string(Relation relation)
{
    return relation == Relation::greater_equal ? "lhs >= rhs" : "lhs <= rhs";
}

void InequalityReport::add(std::vector<double> point, double l, double r)
{
    grid.push_back(std::move(point));
    lhs.push_back(l);
    rhs.push_back(r);
    margins.push_back(relation == Relation::greater_equal ? l - r : r - l);
}

void InequalityReport::finalize()
{
    min_margin = margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
    pass = !in_scope || min_margin >= -tolerance;
}

namespace
{
PhiOptions exact_only()
{
    PhiOptions o;
    o.allow_monte_carlo = false;
    return o;
}

std::vector<VertexId> subset_vertices(const Region& region, std::uint64_t mask)
{
    std::vector<VertexId> verts{region.origin()};
    for (std::size_t i = 1; i < region.size(); ++i)
        if ((mask >> (i - 1)) & 1u)
            verts.push_back(region.vertices()[i]);
    return verts;
}

double beta_of(const Lattice& lattice, double param)
{
    if (lattice.mode() == ParamMode::p)
    {
        if (!(param > 0.0 && param < 1.0))
            throw InvalidArgument("p grid must lie strictly inside (0, 1)");
        return -std::log1p(-param);
    }
    if (!(param > 0.0) || !std::isfinite(param))
        throw InvalidArgument("beta grid must be strictly positive");
    return param;
}

double magnetization(const Region& region, double beta, double h)
{
    return ising_observables(region, beta, h).magnetizations[0];
}

void require_positive_field(double h)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidArgument("this check needs a finite field h > 0");
}

void require_step(double x, double delta)
{
    if (!(delta > 0.0) || x - delta <= 0.0)
        throw InvalidArgument("finite-difference step must be positive and smaller than every grid value");
}
} // namespace

SubsetInfimum subset_phi_infimum(Model model, const Lattice& lattice, const Region& region, double param)
{
    const std::size_t k = region.size() - 1;
    if (k > 20)
        throw CapExceeded("subset infimum over too many vertices", k, 20);
    const std::size_t count = std::size_t{1} << k;
    std::vector<double> values(count);
    parallel_for(count, [&](std::size_t mask) {
        const Region s = Region::from_vertices(lattice, subset_vertices(region, mask), region.origin());
        values[mask] = phi(model, lattice, s, param, exact_only()).value;
    });
    const auto it = std::min_element(values.begin(), values.end());
    const SubsetInfimum best{*it, subset_vertices(region, static_cast<std::uint64_t>(it - values.begin()))};
    return best;
}

InequalityReport check_perc_differential(const Lattice& lattice, int n, const std::vector<double>& p_grid,
                                         double delta, double tolerance)
{
    const Lattice bl = lattice.with_mode(ParamMode::beta);
    const Region region = ball(bl, n);
    InequalityReport r;
    r.name = "perc-diff";
    r.relation = Relation::greater_equal;
    r.axes = {"param", "beta"};
    r.tolerance = tolerance;
    for (double param : p_grid)
    {
        const double beta = beta_of(lattice, param);
        require_step(beta, delta);
        const double up = perc_exit_prob(bl, n, beta + delta);
        const double down = perc_exit_prob(bl, n, beta - delta);
        const double p = perc_exit_prob(bl, n, beta);
        const double inf = subset_phi_infimum(Model::percolation, bl, region, beta).value;
        r.add({param, beta}, (up - down) / (2.0 * delta), inf * (1.0 - p) / beta);
    }
    r.finalize();
    return r;
}

double connect_within(const Lattice& lattice, const std::vector<VertexId>& A, const std::vector<VertexId>& B,
                      const VertexId& u, double param)
{
    const std::set<VertexId> bset(B.begin(), B.end());
    if (bset.contains(u))
        return 1.0;
    std::map<VertexId, int> index;
    for (const auto& a : A)
        if (!bset.contains(a))
            index.emplace(a, static_cast<int>(index.size()));
    if (!index.contains(u))
        return 0.0;
    const int sink = static_cast<int>(index.size());
    BondGraph g;
    g.num_vertices = sink + 1;
    std::vector<double> closed_to_sink(sink, 1.0);
    for (const auto& [x, i] : index)
    {
        for (const auto& c : lattice.couplings())
        {
            const VertexId y = x + c.offset;
            const double w = lattice.edge_weight(c.J, param);
            if (bset.contains(y))
                closed_to_sink[i] *= 1.0 - w;
            else if (auto it = index.find(y); it != index.end() && i < it->second)
                g.edges.push_back({i, it->second, w});
        }
    }
    for (int i = 0; i < sink; ++i)
        if (closed_to_sink[i] < 1.0)
            g.edges.push_back({i, sink, 1.0 - closed_to_sink[i]});
    return connection_probabilities(g, index.at(u))[sink];
}

InequalityReport check_bk_decomposition(const Lattice& lattice, const std::vector<VertexId>& S,
                                        const std::vector<VertexId>& A, const std::vector<VertexId>& B,
                                        const VertexId& u, const std::vector<double>& params, double tolerance)
{
    const std::set<VertexId> sset(S.begin(), S.end()), aset(A.begin(), A.end()), bset(B.begin(), B.end());
    if (!sset.contains(u))
        throw InvalidArgument("u must belong to S");
    for (const auto& s : S)
    {
        if (!aset.contains(s))
            throw InvalidArgument("S must be contained in A");
        if (bset.contains(s))
            throw InvalidArgument("B must not meet S");
    }
    InequalityReport r;
    r.name = "bk";
    r.relation = Relation::less_equal;
    r.axes = {"param"};
    r.tolerance = tolerance;
    const Region sreg = Region::from_vertices(lattice, S, u);
    for (double param : params)
    {
        lattice.validate_param(param);
        const double lhs = connect_within(lattice, A, B, u, param);
        const auto conn = perc_connect_probs(lattice, sreg, param);
        std::map<VertexId, double> cache;
        NeumaierSum rhs;
        for (const auto& bp : sreg.boundary_pairs())
        {
            auto it = cache.find(bp.outside);
            if (it == cache.end())
                it = cache.emplace(bp.outside, connect_within(lattice, A, B, bp.outside, param)).first;
            rhs += lattice.edge_weight(bp.J, param) * conn.probs[bp.inside] * it->second;
        }
        r.add({param}, lhs, rhs.value());
    }
    r.finalize();
    return r;
}

InequalityReport check_ising_differential(const Lattice& lattice, int n, const std::vector<double>& beta_grid,
                                          double h, double delta, double tolerance)
{
    require_positive_field(h);
    const Lattice bl = lattice.with_mode(ParamMode::beta);
    const Region region = ball(bl, n);
    InequalityReport r;
    r.name = "ising-diff";
    r.relation = Relation::greater_equal;
    r.axes = {"beta"};
    r.tolerance = tolerance;
    if (region.internal_edges().empty())
    {
        r.in_scope = false;
        r.note = "out of scope: the region has no interacting pair";
    }
    for (double beta : beta_grid)
    {
        beta_of(bl, beta);
        require_step(beta, delta);
        const auto obs = ising_observables(region, beta, h);
        const double m0 = obs.magnetizations[0];
        double c = std::numeric_limits<double>::infinity();
        for (double my : obs.magnetizations)
            c = std::min(c, m0 / my);
        const double up = magnetization(region, beta + delta, h);
        const double down = magnetization(region, beta - delta, h);
        const double lhs = (up * up - down * down) / (2.0 * delta);
        const double inf = subset_phi_infimum(Model::ising, bl, region, beta).value;
        r.add({beta}, lhs, 2.0 * c / beta * inf * (1.0 - m0 * m0));
    }
    r.finalize();
    return r;
}

std::vector<double> double_current_cluster_law(const Region& region, double beta, double h)
{
    struct Pair
    {
        int a;
        int b;
        double t;
    };
    const int sites = static_cast<int>(region.size());
    const int ghost = sites;
    std::vector<Pair> pairs;
    for (const auto& e : region.internal_edges())
        pairs.push_back({e.a, e.b, beta * e.J});
    for (int v = 0; v < sites; ++v)
        pairs.push_back({v, ghost, h});
    const std::size_t P = pairs.size();
    if (P > 11)
        throw CapExceeded("double-current class enumeration", P, 11);

    // Per pair: m = 0; both even with m > 0; n1 even n2 odd; n1 odd n2 even; both odd.
    std::vector<std::array<double, 5>> w(P);
    for (std::size_t e = 0; e < P; ++e)
    {
        const double ch = std::cosh(pairs[e].t);
        const double sh = std::sinh(pairs[e].t);
        w[e] = {1.0, ch * ch - 1.0, ch * sh, sh * ch, sh * sh};
    }
    // Vertices whose incident pairs are all decided after pair e.
    std::vector<std::uint32_t> closes(P, 0);
    for (int v = 0; v <= ghost; ++v)
    {
        int last = -1;
        for (std::size_t e = 0; e < P; ++e)
            if (pairs[e].a == v || pairs[e].b == v)
                last = static_cast<int>(e);
        if (last >= 0)
            closes[last] |= 1u << v;
    }
    std::vector<NeumaierSum> law(std::size_t{1} << sites);
    RollbackUnionFind uf(sites + 1);

    struct Walker
    {
        const std::vector<Pair>& pairs;
        const std::vector<std::array<double, 5>>& w;
        const std::vector<std::uint32_t>& closes;
        std::vector<NeumaierSum>& law;
        RollbackUnionFind& uf;
        int sites;

        void go(std::size_t e, std::uint32_t odd1, std::uint32_t odd2, double weight)
        {
            if (e == pairs.size())
            {
                std::uint32_t mask = 0;
                const int g = uf.find(sites);
                for (int v = 0; v < sites; ++v)
                    if (uf.find(v) != g)
                        mask |= 1u << v;
                law[mask] += weight;
                return;
            }
            const std::uint32_t ends = (1u << pairs[e].a) | (1u << pairs[e].b);
            for (int k = 0; k < 5; ++k)
            {
                if (w[e][k] == 0.0)
                    continue;
                const std::uint32_t o1 = odd1 ^ ((k == 3 || k == 4) ? ends : 0u);
                const std::uint32_t o2 = odd2 ^ ((k == 2 || k == 4) ? ends : 0u);
                if (((o1 | o2) & closes[e]) != 0)
                    continue;
                const bool merged = k > 0 && uf.unite(pairs[e].a, pairs[e].b);
                go(e + 1, o1, o2, weight * w[e][k]);
                if (merged)
                    uf.rollback();
            }
        }
    } walker{pairs, w, closes, law, uf, sites};
    walker.go(0, 0, 0, 1.0);

    NeumaierSum total;
    for (const auto& s : law)
        total += s;
    std::vector<double> out(law.size());
    for (std::size_t m = 0; m < law.size(); ++m)
        out[m] = law[m].value() / total.value();
    return out;
}

InequalityReport check_ising_differential_finite_volume(const Lattice& lattice, int n,
                                                     const std::vector<double>& beta_grid, double h, double delta,
                                                     double tolerance)
{
    require_positive_field(h);
    const Lattice bl = lattice.with_mode(ParamMode::beta);
    const Region region = ball(bl, n);
    const int sites = static_cast<int>(region.size());
    InequalityReport r;
    r.name = "ising-diff-finite-volume";
    r.relation = Relation::greater_equal;
    r.axes = {"beta"};
    r.tolerance = tolerance;
    double worst_identity = 0.0;
    for (double beta : beta_grid)
    {
        beta_of(bl, beta);
        require_step(beta, delta);
        const auto obs = ising_observables(region, beta, h);
        const double m0 = obs.magnetizations[0];
        double c = std::numeric_limits<double>::infinity();
        for (double my : obs.magnetizations)
            c = std::min(c, m0 / my);
        const double up = magnetization(region, beta + delta, h);
        const double down = magnetization(region, beta - delta, h);
        const double lhs = (up * up - down * down) / (2.0 * delta);

        const auto law = double_current_cluster_law(region, beta, h);
        NeumaierSum weighted, mass;
        for (std::uint32_t mask = 1; mask < law.size(); mask += 2)
        {
            if (law[mask] == 0.0)
                continue;
            mass += law[mask];
            std::vector<VertexId> verts;
            for (int v = 0; v < sites; ++v)
                if ((mask >> v) & 1u)
                    verts.push_back(region.vertices()[v]);
            const Region s = Region::from_vertices(bl, verts, region.origin());
            const auto corr = ising_observables(s, beta, 0.0).correlations;
            NeumaierSum phi_inside;
            for (const auto& bp : s.boundary_pairs())
                if (region.contains(bp.outside))
                    phi_inside += std::tanh(beta * bp.J) * corr[bp.inside];
            weighted += phi_inside.value() * law[mask];
        }
        worst_identity = std::max(worst_identity, std::fabs(mass.value() - (1.0 - m0 * m0)));
        r.add({beta}, lhs, 2.0 * c / beta * weighted.value());
    }
    std::ostringstream note;
    note << "max |P(0 not joined to ghost) - (1 - <s_0>^2)| = " << worst_identity;
    r.note = note.str();
    r.finalize();
    return r;
}

InequalityReport check_modified_simon(const Lattice& lattice, const std::vector<VertexId>& Lambda,
                                      const std::vector<VertexId>& S, const VertexId& z,
                                      const std::vector<double>& beta_grid, double h, double tolerance)
{
    if (!(h >= 0.0) || !std::isfinite(h))
        throw InvalidArgument("h must be finite and nonnegative");
    const Lattice bl = lattice.with_mode(ParamMode::beta);
    const VertexId origin = VertexId::origin(bl.dimension());
    const Region lam = Region::from_vertices(bl, Lambda, origin);
    const Region sreg = Region::from_vertices(bl, S, origin);
    for (const auto& s : S)
        if (!lam.contains(s))
            throw InvalidArgument("S must be contained in Lambda");
    if (!lam.contains(z) || sreg.contains(z))
        throw InvalidArgument("z must lie in Lambda outside S");
    const int zi = *lam.index_of(z);

    InequalityReport r;
    r.name = "simon";
    r.relation = Relation::less_equal;
    r.axes = {"beta"};
    r.tolerance = tolerance;
    for (double beta : beta_grid)
    {
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw InvalidArgument("beta must be finite and nonnegative");
        const ExactIsing big = ising_observables(lam, beta, h, {}, true);
        const ExactIsing small = ising_observables(sreg, beta, h);
        NeumaierSum rhs;
        for (std::size_t xi = 0; xi < sreg.size(); ++xi)
        {
            const VertexId& x = sreg.vertices()[xi];
            for (std::size_t yl = 0; yl < lam.size(); ++yl)
            {
                const VertexId& y = lam.vertices()[yl];
                if (sreg.contains(y))
                    continue;
                IsingSpec two;
                two.num_sites = 2;
                if (const double J = bl.coupling(x, y); J > 0.0)
                    two.bonds.push_back({0, 1, J});
                const double xy = ising_exact(two, beta, h, true).pair(0, 1);
                rhs += small.correlations[xi] * xy * big.pair(static_cast<int>(yl), zi);
            }
        }
        r.add({beta}, big.pair(0, zi), rhs.value());
    }
    r.finalize();
    return r;
}

InequalityReport check_ghs_differential(const Lattice& lattice, int n, const std::vector<double>& beta_grid,
                                        const std::vector<double>& h_grid, double delta, double tolerance)
{
    const Lattice bl = lattice.with_mode(ParamMode::beta);
    const Region region = ball(bl, n);
    const double coupling = bl.coupling_sum();
    InequalityReport r;
    r.name = "ghs";
    r.relation = Relation::less_equal;
    r.axes = {"beta", "h"};
    r.tolerance = tolerance;
    for (double beta : beta_grid)
    {
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw InvalidArgument("beta must be finite and nonnegative");
        for (double h : h_grid)
        {
            require_positive_field(h);
            require_step(h, delta);
            const double m = magnetization(region, beta, h);
            const double dbeta = (magnetization(region, beta + delta, h) -
                                  magnetization(region, std::max(0.0, beta - delta), h)) /
                                 (beta + delta - std::max(0.0, beta - delta));
            const double dh = (magnetization(region, beta, h + delta) - magnetization(region, beta, h - delta)) /
                              (2.0 * delta);
            r.add({beta, h}, dbeta, coupling * m * dh);
        }
    }
    r.finalize();
    return r;
}

namespace
{
std::vector<VertexId> ball_vertices(const Lattice& lattice, int n)
{
    const Region r = ball(lattice, n);
    return {r.vertices().begin(), r.vertices().end()};
}

std::vector<VertexId> sphere(const Lattice& lattice, int n)
{
    const Region r = ball(lattice, n);
    std::vector<VertexId> out;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r.distances()[i] == n)
            out.push_back(r.vertices()[i]);
    return out;
}

VertexId axis(int dimension, int k)
{
    VertexId v = VertexId::origin(dimension);
    v.coords[0] = k;
    return v;
}
} // namespace

std::vector<BkScenario> bk_scenarios(const Lattice& lattice)
{
    const int d = lattice.dimension();
    const VertexId o = VertexId::origin(d);
    std::vector<VertexId> half;
    for (const auto& v : sphere(lattice, 2))
        if (v.coords[0] >= 1)
            half.push_back(v);
    return {
        {"ball1-in-ball2", ball_vertices(lattice, 1), ball_vertices(lattice, 2), sphere(lattice, 2), o},
        {"origin-in-ball2", {o}, ball_vertices(lattice, 2), sphere(lattice, 2), o},
        {"dimer-to-half-shell", {o, axis(d, 1)}, ball_vertices(lattice, 2), half, o},
    };
}

SimonInstance simon_instance(const Lattice& lattice)
{
    if (lattice.dimension() == 2)
    {
        SimonInstance inst;
        for (int x = -1; x <= 2; ++x)
            for (int y = -1; y <= 1; ++y)
                inst.Lambda.push_back({x, y});
        inst.S = ball_vertices(lattice, 1);
        inst.z = {2, 1};
        for (const auto& s : inst.S)
            if (std::find(inst.Lambda.begin(), inst.Lambda.end(), s) == inst.Lambda.end())
                inst.Lambda.push_back(s);
        return inst;
    }
    return {ball_vertices(lattice, 2), ball_vertices(lattice, 1), axis(lattice.dimension(), 2)};
}

} // namespace phasecert
