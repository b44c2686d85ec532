#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phasecert/exact_engine.hpp"
#include "phasecert/lattice.hpp"
#include "phasecert/statistics.hpp"

namespace phasecert
{

enum class Model
{
    percolation,
    ising,
};

enum class PhiMethod
{
    exact,
    monte_carlo,
};

std::string to_string(Model model);
std::string to_string(PhiMethod method);
Model parse_model(const std::string& name);

inline constexpr double kEpsCert = 1e-9;
/// Rounding allowance added to exact values, relative to max(1, value).
inline constexpr double kExactRounding = 1e-12;

struct PhiResult
{
    double value = 0.0;
    PhiMethod method = PhiMethod::exact;
    double upper_confidence = 0.0;
    double param = 0.0;
    std::string region_id;
    /// Monte Carlo bookkeeping (zero for exact results).
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

struct PhiOptions
{
    ExactOptions exact;
    bool allow_monte_carlo = true;
    /// Percolation samples, or Ising measurement sweeps.
    std::uint64_t mc_samples = 200000;
    std::uint64_t mc_sweeps = 20000;
    std::uint64_t seed = 1;
    double z = kZ999;
};

/// sum over boundary pairs (x in S, y outside) of weight(x, y) * P[0 <->_S x].
PhiResult phi_percolation(const Lattice& lattice, const Region& region, double param, const PhiOptions& options = {});

/// sum over boundary pairs of tanh(beta J) <s_0 s_x>_{S, beta, 0}.
PhiResult phi_ising(const Lattice& lattice, const Region& region, double beta, const PhiOptions& options = {});

PhiResult phi(Model model, const Lattice& lattice, const Region& region, double param,
              const PhiOptions& options = {});

struct Certificate
{
    Model model = Model::percolation;
    Lattice lattice;
    Region region;
    double param = 0.0;
    PhiResult phi;
    bool exact = false;
    std::string statement; ///< "param <= critical point"
};

/// phi did not clear 1 - eps. This says nothing about supercriticality.
struct Refusal
{
    Model model = Model::percolation;
    Region region;
    double param = 0.0;
    PhiResult phi;
    std::string reason;
};

using CertifyOutcome = std::variant<Certificate, Refusal>;

CertifyOutcome certify_subcritical(Model model, const Lattice& lattice, const Region& region, double param,
                                   const PhiOptions& options = {});

struct CriticalRoot
{
    /// Largest parameter found with phi below 1 - eps; phi >= 1 - eps just above it.
    double param = 0.0;
    PhiMethod method = PhiMethod::exact;
    int iterations = 0;
};

/// Bisection for the level crossing phi = 1 (200 iterations at most). In beta
/// mode the upper bracket is doubled from 1 up to 64.
CriticalRoot critical_root(Model model, const Lattice& lattice, const Region& region, double tol = 1e-9,
                           const PhiOptions& options = {});

struct BoundRow
{
    int radius = 0;
    std::string region_id;
    std::size_t size = 0;
    std::optional<CriticalRoot> root; ///< empty when no root exists in the bracket
    std::string note;
};

struct BestBound
{
    std::vector<BoundRow> table;
    /// Index into table of the largest root, and of the largest exact root.
    std::optional<std::size_t> best;
    std::optional<std::size_t> best_exact;
};

BestBound best_bound(Model model, const Lattice& lattice, int max_radius, double tol = 1e-9,
                     const PhiOptions& options = {});

struct GrowResult
{
    Region region;
    PhiResult phi;
    /// phi after each accepted step of the winning start.
    std::vector<double> trajectory;
};

/// Greedy region growth. Each start ({0}, then every ball of size <= max_size)
/// repeatedly adds the outside neighbour that lowers phi most, stopping at
/// max_size or when no candidate lowers it; the start with the lowest phi wins.
GrowResult greedy_grow(Model model, const Lattice& lattice, double param, std::size_t max_size,
                       const PhiOptions& options = {});

/// |S| / (1 - phi), using the upper confidence value.
double chi_upper_bound(const Region& region, const PhiResult& phi);

/// phi^floor(n / L) with L the region's radius_L.
double decay_upper_bound(const Region& region, const PhiResult& phi, int n);

} // namespace phasecert
