#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phasecert/lattice.hpp"
#include "phasecert/philox.hpp"
#include "phasecert/statistics.hpp"

namespace phasecert
{

/// Ball of radius n together with its exterior shell. Holds every edge with at
/// least one endpoint in the ball, numbered in canonical vertex order so that
/// the random state of edge e in sample s is uniform(s, e) under a CounterRng.
class BoxGraph
{
  public:
    BoxGraph(const Lattice& lattice, int n, double param);
    /// Internal edges of an arbitrary region (no shell).
    BoxGraph(const Lattice& lattice, const Region& region, double param);

    struct Edge
    {
        int a;
        int b;
        double prob;
    };
    struct Incidence
    {
        int neighbour;
        int edge;
    };

    int radius() const { return n_; }
    /// Vertices [0, inner_count()) form the ball; the rest are the shell.
    int inner_count() const { return inner_; }
    int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const Incidence> incident(int v) const
    {
        return {incidence_.data() + offsets_[v], incidence_.data() + offsets_[v + 1]};
    }
    bool is_shell(int v) const { return v >= inner_; }
    const Region& ball_region() const { return region_; }

  private:
    void build_adjacency();

    int n_ = 0;
    int inner_ = 0;
    Region region_;
    std::vector<Edge> edges_;
    std::vector<int> offsets_;
    std::vector<Incidence> incidence_;
};

/// Index under which the ghost bond of vertex v is drawn.
inline std::uint64_t ghost_counter(const BoxGraph& box, int v)
{
    return box.edges().size() + static_cast<std::uint64_t>(v);
}

struct BondConfig
{
    int radius = 0;
    std::vector<bool> open;       ///< aligned with BoxGraph::edges()
    std::vector<bool> ghost_open; ///< aligned with ball vertices; empty unless ghost mode
    bool ghost_mode() const { return !ghost_open.empty(); }
};

struct ClusterSample
{
    BondConfig config;
    /// Component label (smallest member index) for every box vertex, then the ghost if present.
    std::vector<int> labels;
    int ghost_index = -1;
};

/// Draws one configuration and labels every cluster with union-find. When h > 0
/// each ball vertex gets a ghost bond open with probability 1 - exp(-h).
ClusterSample sample_clusters(const Lattice& lattice, int n, double param, double h, std::uint64_t seed,
                              std::uint64_t sample_index = 0);

/// What a breadth-first exploration of the origin's cluster found.
struct OriginCluster
{
    int inner_size = 0;
    bool reached_shell = false;
    bool reached_ghost = false;
};

/// Explores the origin's cluster in one sample, reading edge states lazily from
/// the counter RNG. Gives the same cluster as sample_clusters for the same keys.
class ClusterExplorer
{
  public:
    explicit ClusterExplorer(const BoxGraph& box) : box_(box), stamp_(box.vertex_count(), 0) {}

    struct Stop
    {
        bool at_shell = false;
        bool at_ghost = false;
    };

    OriginCluster explore(const CounterRng& rng, std::uint64_t sample, double ghost_prob, Stop stop,
                          int source = 0);

    /// Cluster members from the last explore() call (inner vertices only).
    std::span<const int> members() const { return members_; }

  private:
    const BoxGraph& box_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_ = 0;
    std::vector<int> queue_;
    std::vector<int> members_;
};

/// Fraction of samples in which the origin reaches the shell outside the ball.
MCEstimate estimate_exit(const Lattice& lattice, int n, double param, std::uint64_t samples, std::uint64_t seed);

/// Mean size of the origin's cluster inside the ball.
MCEstimate estimate_susceptibility(const Lattice& lattice, int n, double param, std::uint64_t samples,
                                   std::uint64_t seed);

/// Fraction of samples in which the origin connects to the ghost vertex.
MCEstimate estimate_ghost_magnetization(const Lattice& lattice, int n, double param, double h,
                                        std::uint64_t samples, std::uint64_t seed);

struct DecayFit
{
    double rate = 0.0; ///< c in P ~ exp(-c n)
    double intercept = 0.0;
    double r2 = 0.0;
};

struct DecayPoint
{
    int n;
    MCEstimate estimate;
};

/// Least-squares slope of -log(mean) against n. Needs at least four points;
/// throws DegenerateFit listing the n with zero mean.
DecayFit fit_decay_rate(std::span<const DecayPoint> series);

struct MeanFieldReport
{
    int n = 0;
    double p = 0.0;
    double p_c = 0.0;
    MCEstimate theta;
    double bound = 0.0;
    bool pass = false;
    std::string caveat;
};

/// Compares the finite-box proxy theta_n = P[0 <-> outside ball n] with
/// (p - p_c) / (p (1 - p_c)) at three standard errors.
MeanFieldReport check_mean_field(const Lattice& lattice, int n, double p, std::uint64_t samples, std::uint64_t seed,
                                 double p_c = 0.5);

} // namespace phasecert
