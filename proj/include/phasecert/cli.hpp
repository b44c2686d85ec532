#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "phasecert/certificates.hpp"
#include "phasecert/ising_mc.hpp"
#include "phasecert/json_io.hpp"

namespace phasecert
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRefusal = 2;

struct RunConfig
{
    std::string subcommand;
    Lattice lattice = Lattice::square();
    Model model = Model::percolation;
    std::vector<double> params;
    std::vector<double> h{0.0};
    std::vector<int> n{16};
    std::optional<int> ball;
    std::optional<Json> region; ///< inline vertex list, as read from --region
    std::uint64_t samples = 200000;
    std::uint64_t sweeps = 20000;
    std::optional<std::uint64_t> seed;
    Boundary boundary = Boundary::plus;
    std::vector<std::string> observables;
    int max_radius = 2;
    double tol = 1e-9;
    std::string check = "all";
    std::optional<Json> scenario;
    std::vector<std::string> inputs;
    bool allow_monte_carlo = true;
    std::string out = ".";
};

const std::vector<std::string>& subcommands();

Json to_json(const RunConfig& config);
RunConfig config_from_json(const Json& j);

/// Hex SHA-256 of the canonical JSON dump of the config.
std::string config_hash(const RunConfig& config);

/// Builds a config from argv (subcommand first). Flags override a --config file.
RunConfig parse_command_line(int argc, const char* const* argv);

/// Executes one run, writing artifacts and a manifest under config.out.
int run(RunConfig config, std::ostream& out, std::ostream& err);

/// parse_command_line + run with the exit-code contract applied to errors.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phasecert
