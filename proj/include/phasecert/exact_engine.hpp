#pragma once

#include <cstddef>
#include <vector>

#include "phasecert/lattice.hpp"

namespace phasecert
{

/// Caps keep worst-case enumeration around 1e8 elementary steps.
struct ExactOptions
{
    std::size_t edge_cap = 26;
    std::size_t spin_cap = 22;
    /// Leading variables fixed per chunk; the chunking (not the worker count)
    /// fixes the reduction order.
    int chunk_bits = 4;
};

/// Undirected graph with independent edge-opening probabilities.
struct BondGraph
{
    struct Edge
    {
        int a;
        int b;
        double prob;
    };

    int num_vertices = 0;
    std::vector<Edge> edges;

    /// Internal edges of a region at the given parameter; vertex i is region vertex i.
    static BondGraph from_region(const Lattice& lattice, const Region& region, double param);

    /// Edges with an endpoint in the region, every outside vertex contracted into
    /// one sink (index region.size()); parallel sink edges are merged.
    static BondGraph with_exterior_sink(const Lattice& lattice, const Region& region, double param);

    /// Number of edges whose state is actually random (0 < prob < 1).
    std::size_t random_edge_count() const;
};

/// P[source <-> x] for every vertex x, by depth-first enumeration of the random
/// edges with a rollback union-find. Edges whose endpoints are already joined
/// are not branched on, since both states give the same partition.
std::vector<double> connection_probabilities(const BondGraph& graph, int source, const ExactOptions& options = {});

/// Reference enumerator: all 2^m masks, breadth-first search per mask, plain sums.
std::vector<double> connection_probabilities_naive(const BondGraph& graph, int source);

struct ExactConnectivity
{
    double param = 0.0;
    /// P[0 <-> x inside the region], aligned with region.vertices().
    std::vector<double> probs;
};

/// Connection probabilities from the region's origin using only internal edges.
ExactConnectivity perc_connect_probs(const Lattice& lattice, const Region& region, double param,
                                     const ExactOptions& options = {});

/// P[origin <-> complement of the region] using every edge touching the region.
double perc_exit_prob(const Lattice& lattice, const Region& region, double param, const ExactOptions& options = {});

/// P[0 <-> complement of the ball of radius n].
double perc_exit_prob(const Lattice& lattice, int n, double param, const ExactOptions& options = {});

/// Ising system on a region with free boundary: each internal unordered pair
/// contributes beta*J exactly once, and every site sees the field h.
struct IsingSpec
{
    int num_sites = 0;
    struct Bond
    {
        int a;
        int b;
        double J;
    };
    std::vector<Bond> bonds;
    /// Per-site field; an empty vector means h on every site.
    std::vector<double> fields;

    static IsingSpec from_region(const Region& region);
};

struct ExactIsing
{
    double beta = 0.0;
    double h = 0.0;
    /// <sigma_0 sigma_x>, aligned with sites (site 0 is the origin).
    std::vector<double> correlations;
    /// <sigma_x>.
    std::vector<double> magnetizations;
    /// Full matrix <sigma_x sigma_y> (row-major) when requested, otherwise empty.
    std::vector<double> pair_matrix;

    double pair(int x, int y) const { return pair_matrix.at(static_cast<std::size_t>(x) * magnetizations.size() + y); }
};

/// Exact free-boundary expectations for exp(-H) with
/// H = -beta sum_{pairs} J s_x s_y - sum_x h_x s_x, by Gray-code enumeration.
ExactIsing ising_exact(const IsingSpec& spec, double beta, double h, bool with_pair_matrix = false,
                       const ExactOptions& options = {});

/// Reference enumerator recomputing the energy of every configuration.
ExactIsing ising_exact_naive(const IsingSpec& spec, double beta, double h, bool with_pair_matrix = false);

/// ising_exact on a region, origin-centred.
ExactIsing ising_observables(const Region& region, double beta, double h, const ExactOptions& options = {},
                             bool with_pair_matrix = false);

/// Energy H(all plus) under the single-count convention.
double ising_all_plus_energy(const IsingSpec& spec, double beta, double h);

} // namespace phasecert
