#include "phasecert/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

#include "phasecert/errors.hpp"

namespace phasecert
{

bool VertexId::is_origin() const
{
    return std::all_of(coords.begin(), coords.end(), [](int c) { return c == 0; });
}

VertexId VertexId::operator+(const VertexId& other) const
{
    VertexId out(coords);
    for (std::size_t i = 0; i < coords.size(); ++i)
        out.coords[i] += other.coords[i];
    return out;
}

VertexId VertexId::operator-(const VertexId& other) const
{
    VertexId out(coords);
    for (std::size_t i = 0; i < coords.size(); ++i)
        out.coords[i] -= other.coords[i];
    return out;
}

VertexId VertexId::operator-() const
{
    VertexId out(coords);
    for (int& c : out.coords)
        c = -c;
    return out;
}

std::string VertexId::to_string() const
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < coords.size(); ++i)
        os << (i ? "," : "") << coords[i];
    os << ')';
    return os.str();
}

std::string to_string(LatticeFamily family)
{
    switch (family)
    {
    case LatticeFamily::square: return "square";
    case LatticeFamily::hypercubic: return "hypercubic";
    case LatticeFamily::triangular: return "triangular";
    case LatticeFamily::custom: return "custom";
    }
    return "custom";
}

std::string to_string(ParamMode mode)
{
    return mode == ParamMode::p ? "p" : "beta";
}

LatticeFamily parse_family(const std::string& name)
{
    if (name == "square")
        return LatticeFamily::square;
    if (name == "hypercubic")
        return LatticeFamily::hypercubic;
    if (name == "triangular")
        return LatticeFamily::triangular;
    if (name == "custom")
        return LatticeFamily::custom;
    throw InvalidArgument("unknown lattice family '" + name + "'");
}

ParamMode parse_mode(const std::string& name)
{
    if (name == "p")
        return ParamMode::p;
    if (name == "beta")
        return ParamMode::beta;
    throw InvalidArgument("unknown parameter mode '" + name + "' (expected 'p' or 'beta')");
}

namespace
{
std::vector<CouplingOffset> unit_offsets(int dimension)
{
    std::vector<CouplingOffset> out;
    for (int axis = 0; axis < dimension; ++axis)
    {
        for (int sign : {+1, -1})
        {
            std::vector<int> c(dimension, 0);
            c[axis] = sign;
            out.push_back({VertexId(std::move(c)), 1.0});
        }
    }
    return out;
}
} // namespace

Lattice::Lattice(LatticeFamily family, int dimension, std::vector<CouplingOffset> couplings, ParamMode mode)
    : family_(family), dimension_(dimension), couplings_(std::move(couplings)), mode_(mode)
{
    if (dimension_ < 1)
        throw InvalidArgument("lattice dimension must be at least 1");
    if (couplings_.empty())
        throw InvalidArgument("coupling table is empty");
    std::map<VertexId, double> table;
    for (const auto& c : couplings_)
    {
        if (c.offset.dimension() != dimension_)
            throw InvalidArgument("coupling offset " + c.offset.to_string() + " has wrong dimension");
        if (c.offset.is_origin())
            throw InvalidArgument("coupling offset must be nonzero");
        if (!(c.J > 0.0) || !std::isfinite(c.J))
            throw InvalidArgument("coupling J must be finite and positive for offset " + c.offset.to_string());
        if (!table.emplace(c.offset, c.J).second)
            throw InvalidArgument("duplicate coupling offset " + c.offset.to_string());
    }
    for (const auto& [offset, J] : table)
    {
        auto it = table.find(-offset);
        if (it == table.end() || it->second != J)
            throw InvalidArgument("coupling table is not symmetric at offset " + offset.to_string());
    }
    if (mode_ == ParamMode::p)
    {
        for (const auto& c : couplings_)
            if (c.J != 1.0)
                throw InvalidArgument("p-parameterisation requires every coupling to equal 1");
    }
}

Lattice Lattice::square(ParamMode mode)
{
    return Lattice(LatticeFamily::square, 2, unit_offsets(2), mode);
}

Lattice Lattice::hypercubic(int dimension, ParamMode mode)
{
    if (dimension < 1)
        throw InvalidArgument("hypercubic dimension must be at least 1");
    return Lattice(LatticeFamily::hypercubic, dimension, unit_offsets(dimension), mode);
}

Lattice Lattice::triangular(ParamMode mode)
{
    auto offsets = unit_offsets(2);
    offsets.push_back({VertexId{1, -1}, 1.0});
    offsets.push_back({VertexId{-1, 1}, 1.0});
    return Lattice(LatticeFamily::triangular, 2, std::move(offsets), mode);
}

Lattice Lattice::custom(int dimension, std::vector<CouplingOffset> couplings, ParamMode mode)
{
    return Lattice(LatticeFamily::custom, dimension, std::move(couplings), mode);
}

double Lattice::coupling(const VertexId& x, const VertexId& y) const
{
    const VertexId d = y - x;
    for (const auto& c : couplings_)
        if (c.offset == d)
            return c.J;
    return 0.0;
}

double Lattice::coupling_sum() const
{
    return std::accumulate(couplings_.begin(), couplings_.end(), 0.0,
                           [](double acc, const CouplingOffset& c) { return acc + c.J; });
}

void Lattice::validate_param(double param) const
{
    if (!std::isfinite(param))
        throw InvalidArgument("parameter must be finite");
    if (mode_ == ParamMode::beta && param < 0.0)
        throw InvalidArgument("beta must be nonnegative");
    if (mode_ == ParamMode::p && (param < 0.0 || param > 1.0))
        throw InvalidArgument("p must lie in [0, 1]");
}

double Lattice::edge_weight(double J, double param) const
{
    validate_param(param);
    if (mode_ == ParamMode::p)
        return param;
    return -std::expm1(-param * J);
}

double edge_weight(const Lattice& lattice, double J, double param)
{
    return lattice.edge_weight(J, param);
}

std::optional<int> Lattice::distance_from_origin(const VertexId& x, int max_radius) const
{
    if (x.dimension() != dimension_)
        throw InvalidArgument("vertex " + x.to_string() + " has wrong dimension");
    if (x.is_origin())
        return 0;
    std::set<VertexId> seen{VertexId::origin(dimension_)};
    std::vector<VertexId> frontier{VertexId::origin(dimension_)};
    for (int d = 1; d <= max_radius && !frontier.empty(); ++d)
    {
        std::vector<VertexId> next;
        for (const auto& v : frontier)
        {
            for (const auto& c : couplings_)
            {
                VertexId w = v + c.offset;
                if (w == x)
                    return d;
                if (seen.insert(w).second)
                    next.push_back(std::move(w));
            }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

bool Lattice::operator==(const Lattice& other) const
{
    if (family_ != other.family_ || dimension_ != other.dimension_ || mode_ != other.mode_ ||
        couplings_.size() != other.couplings_.size())
        return false;
    for (std::size_t i = 0; i < couplings_.size(); ++i)
        if (couplings_[i].offset != other.couplings_[i].offset || couplings_[i].J != other.couplings_[i].J)
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Region

std::optional<int> Region::index_of(const VertexId& x) const
{
    auto it = index_.find(x);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

void Region::build(const Lattice& lattice, std::vector<VertexId> vertices, std::vector<int> distances)
{
    std::vector<std::size_t> order(vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (distances[i] != distances[j])
            return distances[i] < distances[j];
        return vertices[i] < vertices[j];
    });
    vertices_.clear();
    distances_.clear();
    index_.clear();
    for (std::size_t k : order)
    {
        index_.emplace(vertices[k], static_cast<int>(vertices_.size()));
        vertices_.push_back(vertices[k]);
        distances_.push_back(distances[k]);
    }
    internal_edges_.clear();
    boundary_pairs_.clear();
    for (int i = 0; i < static_cast<int>(vertices_.size()); ++i)
    {
        for (const auto& c : lattice.couplings())
        {
            VertexId y = vertices_[i] + c.offset;
            auto it = index_.find(y);
            if (it == index_.end())
                boundary_pairs_.push_back({i, std::move(y), c.J});
            else if (i < it->second)
                internal_edges_.push_back({i, it->second, c.J});
        }
    }
    const int max_distance = distances_.empty() ? 0 : *std::max_element(distances_.begin(), distances_.end());
    radius_L_ = max_distance + lattice.range();
}

Region Region::from_vertices(const Lattice& lattice, std::vector<VertexId> vertices, const VertexId& origin)
{
    for (const auto& v : vertices)
        if (v.dimension() != lattice.dimension())
            throw InvalidArgument("region vertex " + v.to_string() + " has wrong dimension");
    std::set<VertexId> unique(vertices.begin(), vertices.end());
    if (unique.size() != vertices.size())
        throw InvalidArgument("region vertex list contains duplicates");
    if (!unique.contains(origin))
        throw InvalidArgument("region must contain its origin " + origin.to_string());

    // Breadth-first layers from the origin until every listed vertex is reached.
    std::map<VertexId, int> dist{{origin, 0}};
    std::vector<VertexId> frontier{origin};
    std::size_t found = 1;
    int far = 0;
    for (const auto& v : unique)
    {
        int norm = 0;
        for (int k = 0; k < lattice.dimension(); ++k)
            norm += std::abs(v.coords[k] - origin.coords[k]);
        far = std::max(far, norm);
    }
    const int max_depth = 4 * far + 16;
    for (int d = 1; found < unique.size(); ++d)
    {
        if (frontier.empty() || d > max_depth)
            throw InvalidArgument("region vertex unreachable in the coupling graph");
        std::vector<VertexId> next;
        for (const auto& v : frontier)
        {
            for (const auto& c : lattice.couplings())
            {
                VertexId w = v + c.offset;
                if (dist.emplace(w, d).second)
                {
                    if (unique.contains(w))
                        ++found;
                    next.push_back(std::move(w));
                }
            }
        }
        frontier = std::move(next);
    }

    std::vector<int> distances;
    distances.reserve(vertices.size());
    for (const auto& v : vertices)
        distances.push_back(dist.at(v));
    Region r;
    r.origin_ = origin;
    r.build(lattice, std::move(vertices), std::move(distances));
    r.descriptor_ = "set[" + std::to_string(r.size()) + "]@" + origin.to_string();
    return r;
}

std::vector<double> Region::boundary_coupling(const Lattice& lattice, double param) const
{
    std::vector<double> out(vertices_.size(), 0.0);
    for (const auto& bp : boundary_pairs_)
        out[bp.inside] += lattice.edge_weight(bp.J, param);
    return out;
}

Region ball(const Lattice& lattice, int n)
{
    if (n < 0)
        throw InvalidArgument("ball radius must be nonnegative");
    const VertexId origin = VertexId::origin(lattice.dimension());
    std::vector<VertexId> vertices{origin};
    std::vector<int> distances{0};
    std::set<VertexId> seen{origin};
    std::vector<VertexId> frontier{origin};
    for (int d = 1; d <= n; ++d)
    {
        std::vector<VertexId> next;
        for (const auto& v : frontier)
        {
            for (const auto& c : lattice.couplings())
            {
                VertexId w = v + c.offset;
                if (seen.insert(w).second)
                {
                    vertices.push_back(w);
                    distances.push_back(d);
                    next.push_back(std::move(w));
                }
            }
        }
        frontier = std::move(next);
    }
    Region r;
    r.origin_ = origin;
    r.build(lattice, std::move(vertices), std::move(distances));
    r.descriptor_ = "ball(" + std::to_string(n) + ")@" + origin.to_string();
    return r;
}

Region translate_region(const Region& region, const VertexId& shift)
{
    if (shift.dimension() != region.origin_.dimension())
        throw InvalidArgument("translation vector has wrong dimension");
    Region out = region;
    out.origin_ = region.origin_ + shift;
    out.index_.clear();
    for (std::size_t i = 0; i < out.vertices_.size(); ++i)
    {
        out.vertices_[i] = region.vertices_[i] + shift;
        out.index_.emplace(out.vertices_[i], static_cast<int>(i));
    }
    for (auto& bp : out.boundary_pairs_)
        bp.outside = bp.outside + shift;
    const auto at = region.descriptor_.find('@');
    out.descriptor_ = region.descriptor_.substr(0, at) + "@" + out.origin_.to_string();
    return out;
}

} // namespace phasecert
