#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "phasecert/certificates.hpp"
#include "phasecert/current_lab.hpp"
#include "phasecert/errors.hpp"
#include "phasecert/lattice.hpp"
#include "phasecert/statistics.hpp"
#include "phasecert/verify_suite.hpp"

namespace phasecert
{

using Json = nlohmann::ordered_json;

/// Schema violation, reported with the JSON path of the offending field.
class ConfigError : public Error
{
  public:
    ConfigError(const std::string& path, const std::string& message)
        : Error(path + ": " + message), path_(path)
    {
    }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

/// Shortest decimal form with 17 significant digits.
std::string format_double(double x);

Json to_json(const VertexId& v);
VertexId vertex_from_json(const Json& j, const std::string& path);

/// {"family", "dimension", "mode", "couplings": [{"offset", "J"}]}; the
/// coupling table is only written for custom lattices.
Json to_json(const Lattice& lattice);
Lattice lattice_from_json(const Json& j, const std::string& path = "lattice");

/// {"origin": [...], "vertices": [[...], ...]}, or a bare vertex list whose origin is the zero vector.
Json to_json(const Region& region);
Region region_from_json(const Lattice& lattice, const Json& j, const std::string& path = "region");

Json to_json(const PhiResult& phi);
Json to_json(const Certificate& certificate);
Json to_json(const Refusal& refusal);
Json to_json(const MCEstimate& estimate);
Json to_json(const InequalityReport& report);

/// Reads a JSON document from disk; errors name the file.
Json read_json_file(const std::string& path);

/// Typed field access with path-qualified errors.
template <typename T>
T get_field(const Json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(path + "." + key, "missing required field");
    try
    {
        return j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception&)
    {
        throw ConfigError(path + "." + key, "wrong type");
    }
}

template <typename T>
T get_field_or(const Json& j, const std::string& key, const std::string& path, T fallback)
{
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null())
        return fallback;
    return get_field<T>(j, key, path);
}

} // namespace phasecert
