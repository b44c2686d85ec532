#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phasecert/lattice.hpp"

namespace phasecert
{

/// Small interaction graph for random currents. Vertex indices run over the
/// sites, and ghost() is one past the last site. Ghost pairs carry weight h.
class CurrentGraph
{
  public:
    struct Pair
    {
        int a;
        int b; ///< equals ghost() for ghost pairs
        double J;
    };

    static constexpr int kMaxSites = 5;

    /// Sites of the region with its internal couplings, plus a ghost pair per site when with_ghost.
    static CurrentGraph from_region(const Region& region, bool with_ghost);
    static CurrentGraph custom(std::vector<VertexId> sites, std::vector<Pair> edges, bool with_ghost);

    int site_count() const { return static_cast<int>(sites_.size()); }
    int ghost() const { return site_count(); }
    bool has_ghost() const { return with_ghost_; }
    const std::vector<VertexId>& sites() const { return sites_; }
    const std::vector<Pair>& pairs() const { return pairs_; }
    bool is_ghost_pair(std::size_t e) const { return pairs_[e].b == ghost(); }

    /// beta J, or h for ghost pairs.
    double pair_weight(std::size_t e, double beta, double h) const;

    /// Bitmask over vertices (ghost included) from a list of vertex indices.
    std::uint32_t mask(const std::vector<int>& vertices) const;

  private:
    std::vector<VertexId> sites_;
    std::vector<Pair> pairs_;
    bool with_ghost_ = false;
};

struct Current
{
    std::vector<int> multiplicity; ///< aligned with CurrentGraph::pairs()
};

/// Vertices (ghost included) with odd total incident multiplicity, ascending.
std::vector<int> sources(const CurrentGraph& graph, const Current& current);

/// prod over pairs of t^n / n! with t = beta J (h for the ghost).
double weight(const CurrentGraph& graph, const Current& current, double beta, double h);

/// Hard guard on enumeration size.
inline constexpr double kMaxStates = 1e9;

/// Every current with per-pair multiplicity <= N and the given sources.
std::vector<Current> enumerate_currents(const CurrentGraph& graph, const std::vector<int>& sources, double beta,
                                        double h, int N);

enum class SumMethod
{
    factorized, ///< per-pair even/odd partial exponential sums over parity patterns
    enumerate,  ///< explicit enumeration of every current
};

/// Truncated sum over currents with the given sources of w(n), per-pair cap N.
double source_sum(const CurrentGraph& graph, const std::vector<int>& sources, double beta, double h, int N,
                  SumMethod method = SumMethod::factorized);

/// <prod_{x in A} s_x> as a ratio of source sums. Odd A routes through the
/// ghost; with h = 0 that sum is asserted to vanish and 0 is returned.
double expectation_via_currents(const CurrentGraph& graph, const std::vector<int>& A, double beta, double h, int N,
                                SumMethod method = SumMethod::factorized);

/// <s_x s_y> via currents.
double correlation_via_currents(const CurrentGraph& graph, int x, int y, double beta, double h, int N,
                                SumMethod method = SumMethod::factorized);

/// Function of the combined current n1 + n2.
using CurrentFunctional = std::function<double(const CurrentGraph&, const std::vector<int>&)>;

struct FSelector
{
    enum class Kind
    {
        one,
        even_total,
        connect,
    } kind = Kind::one;
    int a = 0;
    int b = 0;

    /// "one", "even_total" or "connect(a,b)".
    static FSelector parse(const std::string& text);
    std::string to_string() const;
    CurrentFunctional functional() const;
};

/// Whether a and b are joined by pairs of positive multiplicity.
bool connected_in(const CurrentGraph& graph, const std::vector<int>& multiplicity, int a, int b);

struct SwitchingResult
{
    double lhs = 0.0;
    double rhs = 0.0;
    double relative_discrepancy() const;
};

/// Both sides of the switching identity with the per-pair cap on n1 + n2.
SwitchingResult switching_check(const CurrentGraph& graph, const std::vector<int>& A, int u, int v,
                                const CurrentFunctional& F, double beta, double h, int N);

/// Reference: explicit enumeration of every pair (n1, n2). Tiny graphs only.
SwitchingResult switching_check_bruteforce(const CurrentGraph& graph, const std::vector<int>& A, int u, int v,
                                           const CurrentFunctional& F, double beta, double h, int N);

struct OrientedEdge
{
    int from;
    int to;
    int pair;
    bool operator==(const OrientedEdge&) const = default;
};

/// Position of every oriented edge in the fixed global order: by source
/// coordinates, then target coordinates, the ghost sorting last.
bool oriented_before(const CurrentGraph& graph, const OrientedEdge& a, const OrientedEdge& b);

/// Lexicographically least edge-self-avoiding path from x to y through pairs of
/// positive multiplicity, stopping at the first arrival at y. Throws NoPath.
std::vector<OrientedEdge> extract_backbone(const CurrentGraph& graph, const Current& current, int x, int y);

struct BackboneWeight
{
    std::vector<OrientedEdge> path;
    double rho = 0.0;
};

/// Currents with sources {x, y} grouped by backbone, each group's weight over
/// the sourceless sum. The rho add up to the current correlation.
std::vector<BackboneWeight> backbone_decomposition(const CurrentGraph& graph, int x, int y, double beta, double h,
                                                   int N);

} // namespace phasecert
