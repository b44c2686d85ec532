#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "phasecert/lattice.hpp"
#include "phasecert/philox.hpp"
#include "phasecert/statistics.hpp"

namespace phasecert
{

enum class Boundary
{
    free,
    plus, ///< frozen +1 spins outside the region, coupled through the crossing bonds
};

std::string to_string(Boundary boundary);
Boundary parse_boundary(const std::string& name);

/// Interaction graph of a finite region. Under plus boundary each site carries
/// the summed coupling to the frozen exterior.
class IsingGraph
{
  public:
    IsingGraph(const Lattice& lattice, int n, Boundary boundary);
    IsingGraph(const Region& region, Boundary boundary);

    struct Neighbour
    {
        int site;
        double J;
    };

    int size() const { return static_cast<int>(exterior_.size()); }
    /// Ball radius, or -1 for an arbitrary region.
    int radius() const { return radius_; }
    Boundary boundary() const { return boundary_; }
    const Region& region() const { return region_; }
    std::span<const Neighbour> neighbours(int v) const
    {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    /// Position of neighbours(v) in the flattened adjacency.
    int adjacency_offset(int v) const { return offsets_[v]; }
    /// Summed J to the frozen exterior (zero under free boundary).
    double exterior_coupling(int v) const { return exterior_[v]; }

  private:
    void build();

    Region region_;
    int radius_ = -1;
    Boundary boundary_;
    std::vector<int> offsets_;
    std::vector<Neighbour> adjacency_;
    std::vector<double> exterior_;
};

struct SpinConfig
{
    int radius = -1;
    std::vector<std::int8_t> spins;
    Boundary boundary = Boundary::free;
    double beta = 0.0;
    double h = 0.0;
};

/// Markov chain for exp(-H) with H = -beta sum J s_x s_y - sum_x f_x s_x,
/// where f_x = h + beta * (exterior coupling of x).
class IsingChain
{
  public:
    IsingChain(const IsingGraph& graph, double beta, double h, std::uint64_t seed, std::uint64_t stream = 0);

    /// One Wolff cluster move. The field acts through a ghost spin fixed at +1;
    /// a cluster that binds to it is left unflipped. Returns the number of
    /// sites visited.
    int wolff_step();

    /// One sequential heat-bath pass over all sites.
    void heat_bath_sweep();

    /// A heat-bath pass followed by wolff_moves() Wolff moves.
    void sweep();

    /// Fixes the Wolff moves per sweep so that about size() sites are visited,
    /// from the mean cluster size of `trials` moves.
    void calibrate(std::uint64_t trials);
    int wolff_moves() const { return wolff_moves_; }

    const std::vector<std::int8_t>& spins() const { return spins_; }
    void fill(std::int8_t value);
    double magnetization() const;
    SpinConfig config() const;

  private:
    const IsingGraph& graph_;
    double beta_;
    double h_;
    PhiloxEngine rng_;
    std::vector<std::int8_t> spins_;
    std::vector<double> field_;
    std::vector<double> ghost_prob_;
    std::vector<double> bond_prob_; ///< aligned with the graph adjacency
    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_ = 0;
    std::vector<int> stack_;
    int wolff_moves_ = 1;
};

struct IsingRunOptions
{
    std::uint64_t burn_in_wolff = 1000;
    std::uint64_t pilot_sweeps = 200;
    /// Burn-in is extended to this many integrated autocorrelation times of |m|.
    double tau_factor = 20.0;
    std::size_t batches = 100;
};

/// Time average of sigma_0, started from all plus.
MCEstimate estimate_magnetization(const Lattice& lattice, int n, double beta, Boundary boundary,
                                  std::uint64_t sweeps, std::uint64_t seed, double h = 0.0,
                                  const IsingRunOptions& options = {});

struct TwoPointEstimate
{
    int distance;
    MCEstimate estimate;
};

/// <sigma_0 sigma_x> for x = r e along coordinate axes (r = 1..n/2), averaged
/// over the axis directions equivalent under the lattice symmetry.
std::vector<TwoPointEstimate> estimate_two_point(const Lattice& lattice, int n, double beta, Boundary boundary,
                                                 std::uint64_t sweeps, std::uint64_t seed,
                                                 const IsingRunOptions& options = {});

/// Sum over x in the ball of <sigma_0 sigma_x>.
MCEstimate estimate_ising_susceptibility(const Lattice& lattice, int n, double beta, Boundary boundary,
                                         std::uint64_t sweeps, std::uint64_t seed,
                                         const IsingRunOptions& options = {});

/// Burns in a chain started from all plus, then calls on_sweep after each of
/// `sweeps` measurement sweeps. Returns the number of burn-in sweeps used.
std::uint64_t run_chain(const IsingGraph& graph, double beta, double h, std::uint64_t sweeps, std::uint64_t seed,
                        const IsingRunOptions& options,
                        const std::function<void(const std::vector<std::int8_t>&)>& on_sweep);

struct DivergencePoint
{
    int n;
    MCEstimate estimate;
};

struct DivergenceReport
{
    double beta = 0.0;
    std::vector<DivergencePoint> points;
    /// Each partial sum exceeds the previous one by more than three combined standard errors.
    bool strictly_increasing = false;
};

/// Partial susceptibilities over growing balls.
DivergenceReport check_critical_divergence(const Lattice& lattice, double beta, std::span<const int> ns,
                                           std::uint64_t sweeps, std::uint64_t seed,
                                           Boundary boundary = Boundary::plus, const IsingRunOptions& options = {});

/// True when consecutive estimates grow by more than z combined standard errors.
bool strictly_increasing(std::span<const MCEstimate> series, double z = 3.0);

} // namespace phasecert
