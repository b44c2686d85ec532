#include "phasecert/perc_mc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "phasecert/errors.hpp"
#include "phasecert/parallel.hpp"
#include "phasecert/summation.hpp"
#include "phasecert/union_find.hpp"

namespace phasecert
{

BoxGraph::BoxGraph(const Lattice& lattice, int n, double param) : n_(n), region_(ball(lattice, n))
{
    lattice.validate_param(param);
    inner_ = static_cast<int>(region_.size());
    std::map<VertexId, int> shell;
    const auto& verts = region_.vertices();
    for (int i = 0; i < inner_; ++i)
    {
        for (const auto& c : lattice.couplings())
        {
            const VertexId y = verts[i] + c.offset;
            const double prob = lattice.edge_weight(c.J, param);
            if (auto j = region_.index_of(y))
            {
                if (*j > i)
                    edges_.push_back({i, *j, prob});
                continue;
            }
            auto [it, fresh] = shell.emplace(y, inner_ + static_cast<int>(shell.size()));
            edges_.push_back({i, it->second, prob});
        }
    }
    offsets_.assign(inner_ + shell.size() + 1, 0);
    build_adjacency();
}

BoxGraph::BoxGraph(const Lattice& lattice, const Region& region, double param) : n_(-1), region_(region)
{
    lattice.validate_param(param);
    inner_ = static_cast<int>(region_.size());
    for (const auto& e : region_.internal_edges())
        edges_.push_back({e.a, e.b, lattice.edge_weight(e.J, param)});
    offsets_.assign(inner_ + 1, 0);
    build_adjacency();
}

void BoxGraph::build_adjacency()
{
    for (const auto& e : edges_)
    {
        ++offsets_[e.a + 1];
        ++offsets_[e.b + 1];
    }
    for (std::size_t v = 1; v < offsets_.size(); ++v)
        offsets_[v] += offsets_[v - 1];
    incidence_.resize(offsets_.back());
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (int id = 0; id < static_cast<int>(edges_.size()); ++id)
    {
        incidence_[fill[edges_[id].a]++] = {edges_[id].b, id};
        incidence_[fill[edges_[id].b]++] = {edges_[id].a, id};
    }
}

ClusterSample sample_clusters(const Lattice& lattice, int n, double param, double h, std::uint64_t seed,
                              std::uint64_t sample_index)
{
    if (n < 0)
        throw InvalidArgument("box radius must be nonnegative");
    if (!(h >= 0.0) || !std::isfinite(h))
        throw InvalidArgument("ghost field h must be finite and nonnegative");
    const BoxGraph box(lattice, n, param);
    const CounterRng rng(seed);
    ClusterSample out;
    out.config.radius = n;
    const auto edges = box.edges();
    const bool ghost = h > 0.0;
    const int vertices = box.vertex_count();
    UnionFind uf(vertices + (ghost ? 1 : 0));
    out.config.open.resize(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
    {
        const bool open = rng.uniform(sample_index, e) < edges[e].prob;
        out.config.open[e] = open;
        if (open)
            uf.unite(edges[e].a, edges[e].b);
    }
    if (ghost)
    {
        const double gp = -std::expm1(-h);
        out.ghost_index = vertices;
        out.config.ghost_open.resize(box.inner_count());
        for (int v = 0; v < box.inner_count(); ++v)
        {
            const bool open = rng.uniform(sample_index, ghost_counter(box, v)) < gp;
            out.config.ghost_open[v] = open;
            if (open)
                uf.unite(v, vertices);
        }
    }
    const int total = uf.size();
    std::vector<int> smallest(total, total);
    for (int v = 0; v < total; ++v)
    {
        int& s = smallest[uf.find(v)];
        s = std::min(s, v);
    }
    out.labels.resize(total);
    for (int v = 0; v < total; ++v)
        out.labels[v] = smallest[uf.find(v)];
    return out;
}

OriginCluster ClusterExplorer::explore(const CounterRng& rng, std::uint64_t sample, double ghost_prob, Stop stop,
                                       int source)
{
    if (++generation_ == 0)
    {
        std::fill(stamp_.begin(), stamp_.end(), 0u);
        generation_ = 1;
    }
    OriginCluster out;
    members_.clear();
    queue_.clear();
    queue_.push_back(source);
    stamp_[source] = generation_;
    const auto edges = box_.edges();
    for (std::size_t head = 0; head < queue_.size(); ++head)
    {
        const int v = queue_[head];
        if (box_.is_shell(v))
        {
            out.reached_shell = true;
            if (stop.at_shell)
                return out;
            continue;
        }
        ++out.inner_size;
        members_.push_back(v);
        if (ghost_prob > 0.0 && !out.reached_ghost && rng.uniform(sample, ghost_counter(box_, v)) < ghost_prob)
        {
            out.reached_ghost = true;
            if (stop.at_ghost)
                return out;
        }
        for (const auto& inc : box_.incident(v))
        {
            if (stamp_[inc.neighbour] == generation_)
                continue;
            if (rng.uniform(sample, inc.edge) < edges[inc.edge].prob)
            {
                stamp_[inc.neighbour] = generation_;
                queue_.push_back(inc.neighbour);
            }
        }
    }
    return out;
}

namespace
{
constexpr std::size_t kBatches = 100;

// Runs `observe(explorer, sample)` over all samples in fixed batches and
// returns the batch sums in batch order.
template <typename Observe>
std::vector<NeumaierSum> batched(const BoxGraph& box, std::uint64_t samples, Observe observe)
{
    if (samples < 1)
        throw InvalidArgument("need at least one sample");
    const std::size_t batches = static_cast<std::size_t>(std::min<std::uint64_t>(kBatches, samples));
    std::vector<NeumaierSum> sums(batches);
    parallel_for(batches, [&](std::size_t b) {
        ClusterExplorer explorer(box);
        const std::uint64_t lo = samples * b / batches;
        const std::uint64_t hi = samples * (b + 1) / batches;
        for (std::uint64_t s = lo; s < hi; ++s)
            sums[b] += observe(explorer, s);
    });
    return sums;
}

MCEstimate from_batches(const std::vector<NeumaierSum>& sums, std::uint64_t samples, std::uint64_t seed,
                        std::string tag, bool binomial)
{
    NeumaierSum total;
    for (const auto& s : sums)
        total += s;
    MCEstimate e;
    e.samples = samples;
    e.seed = seed;
    e.observable = std::move(tag);
    e.mean = total.value() / static_cast<double>(samples);
    if (binomial)
    {
        e.std_error = std::sqrt(std::max(0.0, e.mean * (1.0 - e.mean)) / static_cast<double>(samples));
        return e;
    }
    const std::size_t batches = sums.size();
    if (batches < 2)
        return e;
    NeumaierSum ss;
    for (std::size_t b = 0; b < batches; ++b)
    {
        const std::uint64_t len = samples * (b + 1) / batches - samples * b / batches;
        const double m = sums[b].value() / static_cast<double>(len);
        ss += (m - e.mean) * (m - e.mean);
    }
    e.std_error = std::sqrt(ss.value() / static_cast<double>(batches - 1) / static_cast<double>(batches));
    return e;
}
} // namespace

MCEstimate estimate_exit(const Lattice& lattice, int n, double param, std::uint64_t samples, std::uint64_t seed)
{
    const BoxGraph box(lattice, n, param);
    const CounterRng rng(seed);
    auto sums = batched(box, samples, [&](ClusterExplorer& ex, std::uint64_t s) {
        return ex.explore(rng, s, 0.0, {.at_shell = true}).reached_shell ? 1.0 : 0.0;
    });
    return from_batches(sums, samples, seed, "exit", true);
}

MCEstimate estimate_susceptibility(const Lattice& lattice, int n, double param, std::uint64_t samples,
                                   std::uint64_t seed)
{
    const BoxGraph box(lattice, n, param);
    const CounterRng rng(seed);
    auto sums = batched(box, samples, [&](ClusterExplorer& ex, std::uint64_t s) {
        return static_cast<double>(ex.explore(rng, s, 0.0, {}).inner_size);
    });
    return from_batches(sums, samples, seed, "susceptibility", false);
}

MCEstimate estimate_ghost_magnetization(const Lattice& lattice, int n, double param, double h,
                                        std::uint64_t samples, std::uint64_t seed)
{
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidArgument("ghost magnetization needs a finite field h > 0");
    const BoxGraph box(lattice, n, param);
    const CounterRng rng(seed);
    const double gp = -std::expm1(-h);
    auto sums = batched(box, samples, [&](ClusterExplorer& ex, std::uint64_t s) {
        return ex.explore(rng, s, gp, {.at_ghost = true}).reached_ghost ? 1.0 : 0.0;
    });
    return from_batches(sums, samples, seed, "ghost_magnetization", true);
}

DecayFit fit_decay_rate(std::span<const DecayPoint> series)
{
    if (series.size() < 4)
        throw InvalidArgument("decay fit needs at least four points");
    std::vector<double> x, y, dropped;
    for (const auto& pt : series)
    {
        if (!(pt.estimate.mean > 0.0))
        {
            dropped.push_back(pt.n);
            continue;
        }
        x.push_back(pt.n);
        y.push_back(-std::log(pt.estimate.mean));
    }
    if (!dropped.empty())
    {
        std::string which;
        for (double d : dropped)
            which += (which.empty() ? "" : ",") + std::to_string(static_cast<int>(d));
        throw DegenerateFit("decay fit: zero mean at n = " + which, dropped);
    }
    const LinearFit fit = least_squares(x, y);
    return {fit.slope, fit.intercept, fit.r2};
}

MeanFieldReport check_mean_field(const Lattice& lattice, int n, double p, std::uint64_t samples, std::uint64_t seed,
                                 double p_c)
{
    if (!(p > p_c && p <= 1.0))
        throw InvalidArgument("mean-field check needs p_c < p <= 1");
    MeanFieldReport r;
    r.n = n;
    r.p = p;
    r.p_c = p_c;
    r.theta = estimate_exit(lattice, n, p, samples, seed);
    r.bound = (p - p_c) / (p * (1.0 - p_c));
    r.pass = r.theta.mean >= r.bound - 3.0 * r.theta.std_error;
    r.caveat = "theta is approximated by P[0 <-> outside ball " + std::to_string(n) +
               "], which overestimates the infinite-cluster density";
    return r;
}

} // namespace phasecert
