#include "phasecert/json_io.hpp"

#include <cstdio>
#include <fstream>

namespace phasecert
{

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json to_json(const VertexId& v)
{
    return Json(v.coords);
}

VertexId vertex_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array())
        throw ConfigError(path, "vertex must be an array of integers");
    std::vector<int> coords;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number_integer())
            throw ConfigError(path + "[" + std::to_string(i) + "]", "coordinate must be an integer");
        coords.push_back(j[i].get<int>());
    }
    return VertexId(std::move(coords));
}

Json to_json(const Lattice& lattice)
{
    Json j;
    j["family"] = to_string(lattice.family());
    j["dimension"] = lattice.dimension();
    j["mode"] = to_string(lattice.mode());
    if (lattice.family() == LatticeFamily::custom)
    {
        Json table = Json::array();
        for (const auto& c : lattice.couplings())
            table.push_back({{"offset", to_json(c.offset)}, {"J", c.J}});
        j["couplings"] = table;
    }
    return j;
}

Lattice lattice_from_json(const Json& j, const std::string& path)
{
    if (!j.is_object())
        throw ConfigError(path, "lattice must be an object");
    ParamMode mode = ParamMode::p;
    try
    {
        mode = parse_mode(get_field_or<std::string>(j, "mode", path, "p"));
        const LatticeFamily family = parse_family(get_field_or<std::string>(j, "family", path, "square"));
        switch (family)
        {
        case LatticeFamily::square: return Lattice::square(mode);
        case LatticeFamily::triangular: return Lattice::triangular(mode);
        case LatticeFamily::hypercubic: return Lattice::hypercubic(get_field<int>(j, "dimension", path), mode);
        case LatticeFamily::custom: break;
        }
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError(path, e.what());
    }
    const int dimension = get_field<int>(j, "dimension", path);
    if (!j.contains("couplings") || !j["couplings"].is_array())
        throw ConfigError(path + ".couplings", "custom lattice needs an array of {offset, J}");
    std::vector<CouplingOffset> table;
    for (std::size_t i = 0; i < j["couplings"].size(); ++i)
    {
        const std::string p = path + ".couplings[" + std::to_string(i) + "]";
        const Json& c = j["couplings"][i];
        if (!c.is_object() || !c.contains("offset"))
            throw ConfigError(p + ".offset", "missing required field");
        table.push_back({vertex_from_json(c["offset"], p + ".offset"), get_field<double>(c, "J", p)});
    }
    try
    {
        return Lattice::custom(dimension, std::move(table), mode);
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError(path + ".couplings", e.what());
    }
}

Json to_json(const Region& region)
{
    Json verts = Json::array();
    for (const auto& v : region.vertices())
        verts.push_back(to_json(v));
    return {{"origin", to_json(region.origin())}, {"size", region.size()}, {"vertices", verts}};
}

Region region_from_json(const Lattice& lattice, const Json& j, const std::string& path)
{
    const Json* list = &j;
    VertexId origin = VertexId::origin(lattice.dimension());
    std::string list_path = path;
    if (j.is_object())
    {
        if (!j.contains("vertices"))
            throw ConfigError(path + ".vertices", "missing required field");
        list = &j["vertices"];
        list_path = path + ".vertices";
        if (j.contains("origin"))
            origin = vertex_from_json(j["origin"], path + ".origin");
    }
    if (!list->is_array())
        throw ConfigError(list_path, "expected an array of vertices");
    std::vector<VertexId> verts;
    for (std::size_t i = 0; i < list->size(); ++i)
        verts.push_back(vertex_from_json((*list)[i], list_path + "[" + std::to_string(i) + "]"));
    try
    {
        return Region::from_vertices(lattice, std::move(verts), origin);
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError(path, e.what());
    }
}

Json to_json(const PhiResult& phi)
{
    Json j{{"value", phi.value},
           {"method", to_string(phi.method)},
           {"upper_confidence", phi.upper_confidence},
           {"param", phi.param},
           {"region_id", phi.region_id}};
    if (phi.method == PhiMethod::monte_carlo)
    {
        j["std_error"] = phi.std_error;
        j["samples"] = phi.samples;
        j["seed"] = phi.seed;
    }
    return j;
}

Json to_json(const Certificate& c)
{
    return {{"kind", "certificate"},
            {"model", to_string(c.model)},
            {"lattice", to_json(c.lattice)},
            {"region", to_json(c.region)},
            {"param", c.param},
            {"phi", to_json(c.phi)},
            {"method", to_string(c.phi.method)},
            {"epsilon", kEpsCert},
            {"exact", c.exact},
            {"statement", c.statement}};
}

Json to_json(const Refusal& r)
{
    return {{"kind", "refusal"},
            {"model", to_string(r.model)},
            {"region", to_json(r.region)},
            {"param", r.param},
            {"phi", to_json(r.phi)},
            {"method", to_string(r.phi.method)},
            {"epsilon", kEpsCert},
            {"reason", r.reason}};
}

Json to_json(const MCEstimate& e)
{
    return {{"observable", e.observable},
            {"mean", e.mean},
            {"std_error", e.std_error},
            {"samples", e.samples},
            {"seed", e.seed}};
}

Json to_json(const InequalityReport& r)
{
    Json points = Json::array();
    for (std::size_t i = 0; i < r.grid.size(); ++i)
    {
        Json at;
        for (std::size_t k = 0; k < r.axes.size() && k < r.grid[i].size(); ++k)
            at[r.axes[k]] = r.grid[i][k];
        points.push_back({{"at", at}, {"lhs", r.lhs[i]}, {"rhs", r.rhs[i]}, {"margin", r.margins[i]}});
    }
    return {{"name", r.name},
            {"relation", to_string(r.relation)},
            {"points", points},
            {"min_margin", r.min_margin},
            {"tolerance", r.tolerance},
            {"in_scope", r.in_scope},
            {"pass", r.pass},
            {"note", r.note}};
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path, "cannot open file");
    try
    {
        return Json::parse(in);
    }
    catch (const nlohmann::json::parse_error& e)
    {
        throw ConfigError(path, std::string("invalid JSON: ") + e.what());
    }
}

} // namespace phasecert
