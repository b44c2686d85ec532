#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phasecert
{

/// Integer lattice coordinates of a vertex; the origin is the all-zero tuple.
struct VertexId
{
    std::vector<int> coords;

    VertexId() = default;
    explicit VertexId(std::vector<int> c) : coords(std::move(c)) {}
    VertexId(std::initializer_list<int> c) : coords(c) {}

    static VertexId origin(int dimension) { return VertexId(std::vector<int>(dimension, 0)); }

    int dimension() const { return static_cast<int>(coords.size()); }
    bool is_origin() const;

    VertexId operator+(const VertexId& other) const;
    VertexId operator-(const VertexId& other) const;
    VertexId operator-() const;

    auto operator<=>(const VertexId&) const = default;
    bool operator==(const VertexId&) const = default;

    std::string to_string() const;
};

struct CouplingOffset
{
    VertexId offset;
    double J = 0.0;
};

enum class LatticeFamily
{
    square,
    hypercubic,
    triangular,
    custom,
};

/// How a bond parameter is mapped to an opening probability.
enum class ParamMode
{
    beta, ///< weight 1 - exp(-beta J)
    p,    ///< nearest-neighbour weight p, all couplings equal to one
};

std::string to_string(LatticeFamily family);
std::string to_string(ParamMode mode);
LatticeFamily parse_family(const std::string& name);
ParamMode parse_mode(const std::string& name);

/// Translation-invariant lattice on Z^d given by a finite coupling table.
///
/// The table is closed under negation and only holds strictly positive J, so
/// the coupling graph (edges = nonzero J) has range one in its own graph
/// distance. Immutable after construction.
class Lattice
{
  public:
    static Lattice square(ParamMode mode = ParamMode::p);
    static Lattice hypercubic(int dimension, ParamMode mode = ParamMode::p);
    /// Z^2 with the six offsets (+-1,0), (0,+-1), +-(1,-1).
    static Lattice triangular(ParamMode mode = ParamMode::p);
    static Lattice custom(int dimension, std::vector<CouplingOffset> couplings, ParamMode mode);

    LatticeFamily family() const { return family_; }
    ParamMode mode() const { return mode_; }
    int dimension() const { return dimension_; }
    std::span<const CouplingOffset> couplings() const { return couplings_; }

    /// Same couplings under another parameterisation.
    Lattice with_mode(ParamMode mode) const { return Lattice(family_, dimension_, couplings_, mode); }

    /// Coupling J_{x,y}; zero when y - x is not in the table.
    double coupling(const VertexId& x, const VertexId& y) const;

    /// Sum over y of J_{0,y}.
    double coupling_sum() const;

    /// Range R in graph distance of the coupling graph (always 1 here).
    int range() const { return 1; }

    /// Probability that a bond of strength J is open at the given parameter.
    double edge_weight(double J, double param) const;

    /// Throws InvalidArgument when param is outside the mode's domain.
    void validate_param(double param) const;

    /// Graph distance from the origin; searches at most max_radius layers.
    std::optional<int> distance_from_origin(const VertexId& x, int max_radius) const;

    bool operator==(const Lattice& other) const;

  private:
    Lattice(LatticeFamily family, int dimension, std::vector<CouplingOffset> couplings, ParamMode mode);

    LatticeFamily family_;
    int dimension_;
    std::vector<CouplingOffset> couplings_;
    ParamMode mode_;
};

struct InternalEdge
{
    int a; ///< index into Region::vertices, a < b
    int b;
    double J;
};

struct BoundaryPair
{
    int inside; ///< index into Region::vertices
    VertexId outside;
    double J;
};

/// Finite vertex set containing a distinguished origin, with its internal
/// edges and the couplings crossing its boundary.
///
/// Vertices are kept in canonical order: graph distance from the origin, then
/// lexicographic coordinates. The origin is therefore always index 0.
class Region
{
  public:
    Region() = default;

    /// Builds the region spanned by an explicit vertex list; the origin must be listed.
    static Region from_vertices(const Lattice& lattice, std::vector<VertexId> vertices, const VertexId& origin);

    const VertexId& origin() const { return origin_; }
    std::span<const VertexId> vertices() const { return vertices_; }
    std::span<const InternalEdge> internal_edges() const { return internal_edges_; }
    std::span<const BoundaryPair> boundary_pairs() const { return boundary_pairs_; }
    /// Distance of each vertex from the origin, aligned with vertices().
    std::span<const int> distances() const { return distances_; }

    std::size_t size() const { return vertices_.size(); }
    bool contains(const VertexId& x) const { return index_.contains(x); }
    std::optional<int> index_of(const VertexId& x) const;

    /// Smallest L with every vertex in the ball of radius L - R around the origin.
    int radius_L() const { return radius_L_; }

    /// Summed opening weight of the boundary pairs leaving each vertex, aligned with vertices().
    std::vector<double> boundary_coupling(const Lattice& lattice, double param) const;

    /// Compact descriptor, e.g. "ball(2)@(0,0)" or "set[5]@(0,0)".
    const std::string& descriptor() const { return descriptor_; }

  private:
    friend Region ball(const Lattice& lattice, int n);
    friend Region translate_region(const Region& region, const VertexId& shift);

    void build(const Lattice& lattice, std::vector<VertexId> vertices, std::vector<int> distances);

    VertexId origin_;
    std::vector<VertexId> vertices_;
    std::vector<int> distances_;
    std::map<VertexId, int> index_;
    std::vector<InternalEdge> internal_edges_;
    std::vector<BoundaryPair> boundary_pairs_;
    int radius_L_ = 0;
    std::string descriptor_;
};

/// Ball of graph radius n around the origin.
Region ball(const Lattice& lattice, int n);

/// Image of a region under the translation by `shift`.
Region translate_region(const Region& region, const VertexId& shift);

/// Free-function form of Lattice::edge_weight.
double edge_weight(const Lattice& lattice, double J, double param);

} // namespace phasecert
