#include "phasecert/exact_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>

#include "phasecert/errors.hpp"
#include "phasecert/parallel.hpp"
#include "phasecert/summation.hpp"
#include "phasecert/union_find.hpp"

namespace phasecert
{

// ---------------------------------------------------------------------------
// Bond graphs

BondGraph BondGraph::from_region(const Lattice& lattice, const Region& region, double param)
{
    BondGraph g;
    g.num_vertices = static_cast<int>(region.size());
    for (const auto& e : region.internal_edges())
        g.edges.push_back({e.a, e.b, lattice.edge_weight(e.J, param)});
    return g;
}

BondGraph BondGraph::with_exterior_sink(const Lattice& lattice, const Region& region, double param)
{
    BondGraph g = from_region(lattice, region, param);
    const int sink = static_cast<int>(region.size());
    g.num_vertices = sink + 1;
    std::vector<double> closed(region.size(), 1.0);
    std::vector<bool> touches(region.size(), false);
    for (const auto& bp : region.boundary_pairs())
    {
        closed[bp.inside] *= 1.0 - lattice.edge_weight(bp.J, param);
        touches[bp.inside] = true;
    }
    for (int i = 0; i < sink; ++i)
        if (touches[i])
            g.edges.push_back({i, sink, 1.0 - closed[i]});
    return g;
}

std::size_t BondGraph::random_edge_count() const
{
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [](const Edge& e) { return e.prob > 0.0 && e.prob < 1.0; }));
}

namespace
{
void check_graph(const BondGraph& graph, int source)
{
    if (source < 0 || source >= graph.num_vertices)
        throw InvalidArgument("source vertex out of range");
    for (const auto& e : graph.edges)
    {
        if (e.a < 0 || e.b < 0 || e.a >= graph.num_vertices || e.b >= graph.num_vertices)
            throw InvalidArgument("edge endpoint out of range");
        if (!(e.prob >= 0.0 && e.prob <= 1.0))
            throw InvalidArgument("edge probability outside [0, 1]");
    }
}
} // namespace

std::vector<double> connection_probabilities(const BondGraph& graph, int source, const ExactOptions& options)
{
    check_graph(graph, source);
    const int n = graph.num_vertices;

    RollbackUnionFind base(n);
    std::vector<BondGraph::Edge> random;
    for (const auto& e : graph.edges)
    {
        if (e.prob >= 1.0)
            base.unite(e.a, e.b);
        else if (e.prob > 0.0)
            random.push_back(e);
    }
    if (random.size() > options.edge_cap)
        throw CapExceeded("exact bond enumeration: " + std::to_string(random.size()) + " random edges exceed cap " +
                              std::to_string(options.edge_cap),
                          random.size(), options.edge_cap);

    const int m = static_cast<int>(random.size());
    const int k = std::clamp(options.chunk_bits, 0, m);
    const std::size_t chunks = std::size_t{1} << k;
    std::vector<std::vector<NeumaierSum>> partial(chunks, std::vector<NeumaierSum>(n));

    parallel_for(chunks, [&](std::size_t chunk) {
        RollbackUnionFind uf = base;
        double w0 = 1.0;
        for (int j = 0; j < k; ++j)
        {
            const auto& e = random[j];
            if ((chunk >> j) & 1u)
            {
                w0 *= e.prob;
                uf.unite(e.a, e.b);
            }
            else
            {
                w0 *= 1.0 - e.prob;
            }
        }
        auto& acc = partial[chunk];
        std::function<void(int, double)> descend = [&](int depth, double w) {
            if (depth == m)
            {
                const int root = uf.find(source);
                for (int x = 0; x < n; ++x)
                    if (uf.find(x) == root)
                        acc[x] += w;
                return;
            }
            const auto& e = random[depth];
            if (uf.find(e.a) == uf.find(e.b))
            {
                descend(depth + 1, w);
                return;
            }
            uf.unite(e.a, e.b);
            descend(depth + 1, w * e.prob);
            uf.rollback();
            descend(depth + 1, w * (1.0 - e.prob));
        };
        descend(k, w0);
    });

    std::vector<NeumaierSum> total(n);
    for (const auto& chunk : partial)
        for (int x = 0; x < n; ++x)
            total[x] += chunk[x];
    std::vector<double> out(n);
    for (int x = 0; x < n; ++x)
        out[x] = std::clamp(total[x].value(), 0.0, 1.0);
    out[source] = 1.0;
    return out;
}

std::vector<double> connection_probabilities_naive(const BondGraph& graph, int source)
{
    check_graph(graph, source);
    const int n = graph.num_vertices;
    const std::size_t m = graph.edges.size();
    if (m > 30)
        throw CapExceeded("naive enumeration limited to 30 edges", m, 30);
    std::vector<double> out(n, 0.0);
    std::vector<std::vector<int>> adj(n);
    std::vector<bool> seen(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask)
    {
        double w = 1.0;
        for (auto& a : adj)
            a.clear();
        for (std::size_t j = 0; j < m; ++j)
        {
            const auto& e = graph.edges[j];
            if ((mask >> j) & 1u)
            {
                w *= e.prob;
                adj[e.a].push_back(e.b);
                adj[e.b].push_back(e.a);
            }
            else
            {
                w *= 1.0 - e.prob;
            }
        }
        if (w == 0.0)
            continue;
        std::fill(seen.begin(), seen.end(), false);
        std::deque<int> queue{source};
        seen[source] = true;
        while (!queue.empty())
        {
            const int v = queue.front();
            queue.pop_front();
            out[v] += w;
            for (int u : adj[v])
                if (!seen[u])
                {
                    seen[u] = true;
                    queue.push_back(u);
                }
        }
    }
    out[source] = 1.0;
    return out;
}

ExactConnectivity perc_connect_probs(const Lattice& lattice, const Region& region, double param,
                                     const ExactOptions& options)
{
    lattice.validate_param(param);
    ExactConnectivity out;
    out.param = param;
    out.probs = connection_probabilities(BondGraph::from_region(lattice, region, param), 0, options);
    return out;
}

double perc_exit_prob(const Lattice& lattice, const Region& region, double param, const ExactOptions& options)
{
    lattice.validate_param(param);
    const BondGraph g = BondGraph::with_exterior_sink(lattice, region, param);
    return connection_probabilities(g, 0, options).back();
}

double perc_exit_prob(const Lattice& lattice, int n, double param, const ExactOptions& options)
{
    return perc_exit_prob(lattice, ball(lattice, n), param, options);
}

// ---------------------------------------------------------------------------
// Ising

IsingSpec IsingSpec::from_region(const Region& region)
{
    IsingSpec spec;
    spec.num_sites = static_cast<int>(region.size());
    for (const auto& e : region.internal_edges())
        spec.bonds.push_back({e.a, e.b, e.J});
    return spec;
}

double ising_all_plus_energy(const IsingSpec& spec, double beta, double h)
{
    NeumaierSum e;
    for (const auto& b : spec.bonds)
        e += -beta * b.J;
    for (int x = 0; x < spec.num_sites; ++x)
        e += -(spec.fields.empty() ? h : spec.fields[x]);
    return e.value();
}

namespace
{
struct IsingSetup
{
    int n;
    std::vector<double> field;
    std::vector<std::vector<std::pair<int, double>>> adj; // neighbour, beta*J
    double offset;                                       // upper bound of -H
};

IsingSetup prepare(const IsingSpec& spec, double beta, double h, std::size_t cap)
{
    if (!std::isfinite(beta) || beta < 0.0)
        throw InvalidArgument("beta must be finite and nonnegative");
    if (!std::isfinite(h))
        throw InvalidArgument("field must be finite");
    if (spec.num_sites < 1)
        throw InvalidArgument("Ising system needs at least one site");
    if (static_cast<std::size_t>(spec.num_sites) > cap)
        throw CapExceeded("exact spin enumeration: " + std::to_string(spec.num_sites) + " spins exceed cap " +
                              std::to_string(cap),
                          spec.num_sites, cap);
    if (!spec.fields.empty() && static_cast<int>(spec.fields.size()) != spec.num_sites)
        throw InvalidArgument("per-site field vector has wrong length");
    IsingSetup s;
    s.n = spec.num_sites;
    s.field = spec.fields.empty() ? std::vector<double>(s.n, h) : spec.fields;
    s.adj.resize(s.n);
    s.offset = 0.0;
    for (const auto& b : spec.bonds)
    {
        if (b.a == b.b || b.a < 0 || b.b < 0 || b.a >= s.n || b.b >= s.n)
            throw InvalidArgument("invalid Ising bond");
        s.adj[b.a].push_back({b.b, beta * b.J});
        s.adj[b.b].push_back({b.a, beta * b.J});
        s.offset += std::fabs(beta * b.J);
    }
    for (double f : s.field)
        s.offset += std::fabs(f);
    return s;
}

// -H(sigma) with spins encoded as bits (bit set = -1).
double neg_energy(const IsingSetup& s, std::uint64_t config)
{
    NeumaierSum e;
    for (int x = 0; x < s.n; ++x)
    {
        const int sx = ((config >> x) & 1u) ? -1 : 1;
        e += s.field[x] * sx;
        for (const auto& [y, bj] : s.adj[x])
            if (y > x)
                e += bj * sx * (((config >> y) & 1u) ? -1 : 1);
    }
    return e.value();
}

struct IsingAccumulator
{
    NeumaierSum z;
    std::vector<NeumaierSum> corr, mag, pairs;
    IsingAccumulator(int n, bool with_pairs) : corr(n), mag(n), pairs(with_pairs ? n * n : 0) {}

    void add(const std::vector<int>& spin, double w)
    {
        const int n = static_cast<int>(spin.size());
        z += w;
        for (int x = 0; x < n; ++x)
        {
            mag[x] += w * spin[x];
            corr[x] += w * spin[0] * spin[x];
        }
        if (!pairs.empty())
            for (int x = 0; x < n; ++x)
                for (int y = x + 1; y < n; ++y)
                    pairs[x * n + y] += w * spin[x] * spin[y];
    }

    void merge(const IsingAccumulator& other)
    {
        z += other.z;
        for (std::size_t i = 0; i < corr.size(); ++i)
        {
            corr[i] += other.corr[i];
            mag[i] += other.mag[i];
        }
        for (std::size_t i = 0; i < pairs.size(); ++i)
            pairs[i] += other.pairs[i];
    }

    ExactIsing finish(double beta, double h) const
    {
        const int n = static_cast<int>(corr.size());
        ExactIsing out;
        out.beta = beta;
        out.h = h;
        const double zz = z.value();
        for (int x = 0; x < n; ++x)
        {
            out.correlations.push_back(corr[x].value() / zz);
            out.magnetizations.push_back(mag[x].value() / zz);
        }
        out.correlations[0] = 1.0;
        if (!pairs.empty())
        {
            out.pair_matrix.assign(static_cast<std::size_t>(n) * n, 1.0);
            for (int x = 0; x < n; ++x)
                for (int y = x + 1; y < n; ++y)
                {
                    const double v = pairs[x * n + y].value() / zz;
                    out.pair_matrix[x * n + y] = v;
                    out.pair_matrix[y * n + x] = v;
                }
        }
        return out;
    }
};
} // namespace

ExactIsing ising_exact(const IsingSpec& spec, double beta, double h, bool with_pair_matrix,
                       const ExactOptions& options)
{
    const IsingSetup s = prepare(spec, beta, h, options.spin_cap);
    const int k = std::clamp(options.chunk_bits, 0, s.n - 1);
    const int low = s.n - k;
    const std::size_t chunks = std::size_t{1} << k;
    constexpr std::uint64_t kResync = 64;

    std::vector<IsingAccumulator> partial;
    partial.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c)
        partial.emplace_back(s.n, with_pair_matrix);

    parallel_for(chunks, [&](std::size_t chunk) {
        auto& acc = partial[chunk];
        std::uint64_t config = static_cast<std::uint64_t>(chunk) << low;
        std::vector<int> spin(s.n);
        for (int x = 0; x < s.n; ++x)
            spin[x] = ((config >> x) & 1u) ? -1 : 1;
        double e = neg_energy(s, config);
        const std::uint64_t steps = std::uint64_t{1} << low;
        for (std::uint64_t step = 0;; ++step)
        {
            acc.add(spin, std::exp(e - s.offset));
            if (step + 1 == steps)
                break;
            const int flip = std::countr_zero(step + 1);
            double local = s.field[flip];
            for (const auto& [y, bj] : s.adj[flip])
                local += bj * spin[y];
            e -= 2.0 * spin[flip] * local;
            spin[flip] = -spin[flip];
            config ^= std::uint64_t{1} << flip;
            if ((step + 1) % kResync == 0)
                e = neg_energy(s, config);
        }
    });

    IsingAccumulator total(s.n, with_pair_matrix);
    for (const auto& p : partial)
        total.merge(p);
    return total.finish(beta, h);
}

ExactIsing ising_exact_naive(const IsingSpec& spec, double beta, double h, bool with_pair_matrix)
{
    const IsingSetup s = prepare(spec, beta, h, 24);
    const int n = s.n;
    double z = 0.0;
    std::vector<double> corr(n, 0.0), mag(n, 0.0), pairs(with_pair_matrix ? n * n : 0, 0.0);
    for (std::uint64_t config = 0; config < (std::uint64_t{1} << n); ++config)
    {
        double e = 0.0;
        for (const auto& b : spec.bonds)
        {
            const int sa = ((config >> b.a) & 1u) ? -1 : 1;
            const int sb = ((config >> b.b) & 1u) ? -1 : 1;
            e += beta * b.J * sa * sb;
        }
        for (int x = 0; x < n; ++x)
            e += s.field[x] * (((config >> x) & 1u) ? -1 : 1);
        const double w = std::exp(e - s.offset);
        z += w;
        const int s0 = (config & 1u) ? -1 : 1;
        for (int x = 0; x < n; ++x)
        {
            const int sx = ((config >> x) & 1u) ? -1 : 1;
            mag[x] += w * sx;
            corr[x] += w * s0 * sx;
            if (with_pair_matrix)
                for (int y = x + 1; y < n; ++y)
                    pairs[x * n + y] += w * sx * (((config >> y) & 1u) ? -1 : 1);
        }
    }
    ExactIsing out;
    out.beta = beta;
    out.h = h;
    for (int x = 0; x < n; ++x)
    {
        out.correlations.push_back(corr[x] / z);
        out.magnetizations.push_back(mag[x] / z);
    }
    if (with_pair_matrix)
    {
        out.pair_matrix.assign(static_cast<std::size_t>(n) * n, 1.0);
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                out.pair_matrix[x * n + y] = out.pair_matrix[y * n + x] = pairs[x * n + y] / z;
    }
    return out;
}

ExactIsing ising_observables(const Region& region, double beta, double h, const ExactOptions& options,
                             bool with_pair_matrix)
{
    return ising_exact(IsingSpec::from_region(region), beta, h, with_pair_matrix, options);
}

} // namespace phasecert
