#include "phasecert/ising_mc.hpp"

#include <algorithm>
#include <cmath>

#include "phasecert/errors.hpp"

namespace phasecert
{

std::string to_string(Boundary boundary)
{
    return boundary == Boundary::plus ? "plus" : "free";
}

Boundary parse_boundary(const std::string& name)
{
    if (name == "free")
        return Boundary::free;
    if (name == "plus")
        return Boundary::plus;
    throw InvalidArgument("unknown boundary '" + name + "' (expected free or plus)");
}

IsingGraph::IsingGraph(const Lattice& lattice, int n, Boundary boundary)
    : region_(ball(lattice, n)), radius_(n), boundary_(boundary)
{
    build();
}

IsingGraph::IsingGraph(const Region& region, Boundary boundary) : region_(region), boundary_(boundary)
{
    build();
}

void IsingGraph::build()
{
    const int n = static_cast<int>(region_.size());
    exterior_.assign(n, 0.0);
    if (boundary_ == Boundary::plus)
        for (const auto& b : region_.boundary_pairs())
            exterior_[b.inside] += b.J;
    offsets_.assign(n + 1, 0);
    for (const auto& e : region_.internal_edges())
    {
        ++offsets_[e.a + 1];
        ++offsets_[e.b + 1];
    }
    for (int v = 0; v < n; ++v)
        offsets_[v + 1] += offsets_[v];
    adjacency_.resize(offsets_.back());
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : region_.internal_edges())
    {
        adjacency_[fill[e.a]++] = {e.b, e.J};
        adjacency_[fill[e.b]++] = {e.a, e.J};
    }
}

IsingChain::IsingChain(const IsingGraph& graph, double beta, double h, std::uint64_t seed, std::uint64_t stream)
    : graph_(graph), beta_(beta), h_(h), rng_(seed, stream), spins_(graph.size(), 1), stamp_(graph.size(), 0)
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw InvalidArgument("beta must be finite and nonnegative");
    if (!(h >= 0.0) || !std::isfinite(h))
        throw InvalidArgument("h must be finite and nonnegative");
    const int n = graph.size();
    field_.resize(n);
    ghost_prob_.resize(n);
    for (int v = 0; v < n; ++v)
    {
        field_[v] = h + beta * graph.exterior_coupling(v);
        ghost_prob_[v] = -std::expm1(-2.0 * field_[v]);
        for (const auto& nb : graph.neighbours(v))
            bond_prob_.push_back(-std::expm1(-2.0 * beta * nb.J));
    }
}

int IsingChain::wolff_step()
{
    const int n = graph_.size();
    if (n == 0)
        return 0;
    if (++generation_ == 0)
    {
        std::fill(stamp_.begin(), stamp_.end(), 0u);
        generation_ = 1;
    }
    const int seed_site = static_cast<int>(rng_.below(static_cast<std::uint64_t>(n)));
    const std::int8_t s = spins_[seed_site];
    stack_.clear();
    stack_.push_back(seed_site);
    stamp_[seed_site] = generation_;
    bool bound = false;
    std::size_t head = 0;
    for (; head < stack_.size(); ++head)
    {
        const int v = stack_[head];
        if (s > 0 && ghost_prob_[v] > 0.0 && rng_.uniform() < ghost_prob_[v])
        {
            bound = true;
            ++head;
            break;
        }
        const auto nbs = graph_.neighbours(v);
        const int base = graph_.adjacency_offset(v);
        for (std::size_t k = 0; k < nbs.size(); ++k)
        {
            const int u = nbs[k].site;
            if (stamp_[u] == generation_ || spins_[u] != s)
                continue;
            if (rng_.uniform() < bond_prob_[base + k])
            {
                stamp_[u] = generation_;
                stack_.push_back(u);
            }
        }
    }
    if (!bound)
        for (int v : stack_)
            spins_[v] = static_cast<std::int8_t>(-s);
    return static_cast<int>(head);
}

void IsingChain::heat_bath_sweep()
{
    const int n = graph_.size();
    for (int v = 0; v < n; ++v)
    {
        double local = field_[v];
        for (const auto& nb : graph_.neighbours(v))
            local += beta_ * nb.J * spins_[nb.site];
        const double up = 1.0 / (1.0 + std::exp(-2.0 * local));
        spins_[v] = rng_.uniform() < up ? 1 : -1;
    }
}

void IsingChain::sweep()
{
    heat_bath_sweep();
    for (int i = 0; i < wolff_moves_; ++i)
        wolff_step();
}

void IsingChain::calibrate(std::uint64_t trials)
{
    if (trials == 0 || graph_.size() == 0)
        return;
    double visited = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i)
        visited += wolff_step();
    const double mean = std::max(1.0, visited / static_cast<double>(trials));
    wolff_moves_ = std::max(1, static_cast<int>(std::ceil(graph_.size() / mean)));
}

void IsingChain::fill(std::int8_t value)
{
    std::fill(spins_.begin(), spins_.end(), value);
}

double IsingChain::magnetization() const
{
    if (spins_.empty())
        return 0.0;
    long total = 0;
    for (auto s : spins_)
        total += s;
    return static_cast<double>(total) / static_cast<double>(spins_.size());
}

SpinConfig IsingChain::config() const
{
    return {graph_.radius(), spins_, graph_.boundary(), beta_, h_};
}

std::uint64_t run_chain(const IsingGraph& graph, double beta, double h, std::uint64_t sweeps, std::uint64_t seed,
                        const IsingRunOptions& options,
                        const std::function<void(const std::vector<std::int8_t>&)>& on_sweep)
{
    if (sweeps < 1)
        throw InvalidArgument("need at least one measurement sweep");
    IsingChain chain(graph, beta, h, seed);
    chain.fill(1);
    chain.calibrate(options.burn_in_wolff);
    std::vector<double> pilot;
    pilot.reserve(options.pilot_sweeps);
    for (std::uint64_t i = 0; i < options.pilot_sweeps; ++i)
    {
        chain.sweep();
        pilot.push_back(std::fabs(chain.magnetization()));
    }
    const double tau = integrated_autocorrelation_time(pilot);
    const auto target = static_cast<std::uint64_t>(std::ceil(options.tau_factor * tau));
    std::uint64_t burn = options.pilot_sweeps;
    for (; burn < target; ++burn)
        chain.sweep();
    for (std::uint64_t i = 0; i < sweeps; ++i)
    {
        chain.sweep();
        on_sweep(chain.spins());
    }
    return burn;
}

MCEstimate estimate_magnetization(const Lattice& lattice, int n, double beta, Boundary boundary,
                                  std::uint64_t sweeps, std::uint64_t seed, double h,
                                  const IsingRunOptions& options)
{
    const IsingGraph graph(lattice, n, boundary);
    std::vector<double> series;
    series.reserve(sweeps);
    run_chain(graph, beta, h, sweeps, seed, options, [&](const auto& s) { series.push_back(s[0]); });
    return batch_mean_estimate(series, seed, "magnetization", options.batches);
}

namespace
{
std::vector<VertexId> axis_directions(const Lattice& lattice)
{
    std::vector<VertexId> dirs;
    const int axes = lattice.family() == LatticeFamily::custom ? 1 : lattice.dimension();
    for (int k = 0; k < axes; ++k)
    {
        VertexId e = VertexId::origin(lattice.dimension());
        e.coords[k] = 1;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    return dirs;
}
} // namespace

std::vector<TwoPointEstimate> estimate_two_point(const Lattice& lattice, int n, double beta, Boundary boundary,
                                                 std::uint64_t sweeps, std::uint64_t seed,
                                                 const IsingRunOptions& options)
{
    const IsingGraph graph(lattice, n, boundary);
    const auto dirs = axis_directions(lattice);
    std::vector<std::vector<int>> sites;
    for (int r = 1; r <= n / 2; ++r)
    {
        std::vector<int> at;
        for (const auto& d : dirs)
        {
            VertexId x = d;
            for (auto& c : x.coords)
                c *= r;
            if (auto idx = graph.region().index_of(x))
                at.push_back(*idx);
        }
        if (at.empty())
            break;
        sites.push_back(std::move(at));
    }
    std::vector<std::vector<double>> series(sites.size());
    run_chain(graph, beta, 0.0, sweeps, seed, options, [&](const auto& s) {
        for (std::size_t r = 0; r < sites.size(); ++r)
        {
            long acc = 0;
            for (int x : sites[r])
                acc += s[0] * s[x];
            series[r].push_back(static_cast<double>(acc) / static_cast<double>(sites[r].size()));
        }
    });
    std::vector<TwoPointEstimate> out;
    for (std::size_t r = 0; r < sites.size(); ++r)
        out.push_back({static_cast<int>(r + 1),
                       batch_mean_estimate(series[r], seed, "two_point_" + std::to_string(r + 1), options.batches)});
    return out;
}

namespace
{
// Size of the origin's cluster in an Edwards-Sokal bond draw on top of the
// spins, the ghost joining every plus site with probability 1 - exp(-2 f_x).
// Its mean is sum_x <s_0 s_x>.
class OriginFkCluster
{
  public:
    OriginFkCluster(const IsingGraph& graph, double beta, double h, std::uint64_t seed)
        : graph_(graph), rng_(seed, 1), stamp_(graph.size(), 0)
    {
        for (int v = 0; v < graph.size(); ++v)
        {
            ghost_prob_.push_back(-std::expm1(-2.0 * (h + beta * graph.exterior_coupling(v))));
            for (const auto& nb : graph.neighbours(v))
                bond_prob_.push_back(-std::expm1(-2.0 * beta * nb.J));
        }
    }

    int size(const std::vector<std::int8_t>& spins)
    {
        if (++generation_ == 0)
        {
            std::fill(stamp_.begin(), stamp_.end(), 0u);
            generation_ = 1;
        }
        queue_.assign(1, 0);
        stamp_[0] = generation_;
        bool ghost = false;
        for (std::size_t head = 0; head < queue_.size(); ++head)
        {
            const int v = queue_[head];
            if (!ghost && spins[v] > 0 && ghost_prob_[v] > 0.0 && rng_.uniform() < ghost_prob_[v])
            {
                ghost = true;
                // every plus site with an open ghost bond joins
                for (int u = 0; u < graph_.size(); ++u)
                    if (stamp_[u] != generation_ && spins[u] > 0 && ghost_prob_[u] > 0.0 &&
                        rng_.uniform() < ghost_prob_[u])
                    {
                        stamp_[u] = generation_;
                        queue_.push_back(u);
                    }
            }
            const auto nbs = graph_.neighbours(v);
            const int base = graph_.adjacency_offset(v);
            for (std::size_t k = 0; k < nbs.size(); ++k)
            {
                const int u = nbs[k].site;
                if (stamp_[u] == generation_ || spins[u] != spins[v])
                    continue;
                if (rng_.uniform() < bond_prob_[base + k])
                {
                    stamp_[u] = generation_;
                    queue_.push_back(u);
                }
            }
        }
        return static_cast<int>(queue_.size());
    }

  private:
    const IsingGraph& graph_;
    PhiloxEngine rng_;
    std::vector<double> ghost_prob_;
    std::vector<double> bond_prob_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_ = 0;
    std::vector<int> queue_;
};
} // namespace

MCEstimate estimate_ising_susceptibility(const Lattice& lattice, int n, double beta, Boundary boundary,
                                         std::uint64_t sweeps, std::uint64_t seed, const IsingRunOptions& options)
{
    const IsingGraph graph(lattice, n, boundary);
    std::vector<double> series;
    series.reserve(sweeps);
    OriginFkCluster fk(graph, beta, 0.0, seed);
    run_chain(graph, beta, 0.0, sweeps, seed, options,
              [&](const auto& s) { series.push_back(static_cast<double>(fk.size(s))); });
    return batch_mean_estimate(series, seed, "ising_susceptibility", options.batches);
}

bool strictly_increasing(std::span<const MCEstimate> series, double z)
{
    for (std::size_t i = 1; i < series.size(); ++i)
    {
        const double se = std::hypot(series[i].std_error, series[i - 1].std_error);
        if (!(series[i].mean - series[i - 1].mean > z * se))
            return false;
    }
    return true;
}

DivergenceReport check_critical_divergence(const Lattice& lattice, double beta, std::span<const int> ns,
                                           std::uint64_t sweeps, std::uint64_t seed, Boundary boundary,
                                           const IsingRunOptions& options)
{
    DivergenceReport report;
    report.beta = beta;
    std::vector<MCEstimate> estimates;
    for (int n : ns)
    {
        estimates.push_back(estimate_ising_susceptibility(lattice, n, beta, boundary, sweeps, seed, options));
        report.points.push_back({n, estimates.back()});
    }
    report.strictly_increasing = strictly_increasing(estimates);
    return report;
}

} // namespace phasecert
