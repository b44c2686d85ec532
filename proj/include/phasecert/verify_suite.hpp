#pragma once

#include <string>
#include <vector>

#include "phasecert/certificates.hpp"
#include "phasecert/lattice.hpp"

namespace phasecert
{

enum class Relation
{
    greater_equal, ///< lhs >= rhs, margin = lhs - rhs
    less_equal,    ///< lhs <= rhs, margin = rhs - lhs
};

struct InequalityReport
{
    std::string name;
    Relation relation = Relation::greater_equal;
    std::vector<std::string> axes;          ///< names of the grid coordinates
    std::vector<std::vector<double>> grid;  ///< one coordinate tuple per point
    std::vector<double> lhs;
    std::vector<double> rhs;
    std::vector<double> margins;
    double min_margin = 0.0;
    double tolerance = 0.0;
    /// False when the instance falls outside the inequality's hypotheses.
    bool in_scope = true;
    bool pass = false;
    std::string note;

    void add(std::vector<double> point, double l, double r);
    /// Sets min_margin and pass from the margins and the tolerance.
    void finalize();
};

std::string to_string(Relation relation);

struct SubsetInfimum
{
    double value = 0.0;
    std::vector<VertexId> argmin;
};

/// Exact infimum of phi over every subset of the region containing its origin.
SubsetInfimum subset_phi_infimum(Model model, const Lattice& lattice, const Region& region, double param);

/// Derivative of P[0 <-> outside ball n] in beta against
/// (1/beta) inf_S phi(S) (1 - P), on a grid of p values.
InequalityReport check_perc_differential(const Lattice& lattice, int n, const std::vector<double>& p_grid,
                                         double delta = 1e-5, double tolerance = 1e-6);

/// P[u <->_A B] against sum_{x in S, y not in S} w(x,y) P[u <->_S x] P[y <->_A B] on a grid of parameters.
InequalityReport check_bk_decomposition(const Lattice& lattice, const std::vector<VertexId>& S,
                                        const std::vector<VertexId>& A, const std::vector<VertexId>& B,
                                        const VertexId& u, const std::vector<double>& params,
                                        double tolerance = 1e-9);

/// P[u <->_A B] with B contracted into one absorbing vertex.
double connect_within(const Lattice& lattice, const std::vector<VertexId>& A, const std::vector<VertexId>& B,
                      const VertexId& u, double param);

/// d/dbeta <s_0>^2 against (2 c / beta) inf_S phi(S) (1 - <s_0>^2) on ball n,
/// with phi counting every boundary pair of S in the whole lattice.
InequalityReport check_ising_differential(const Lattice& lattice, int n, const std::vector<double>& beta_grid,
                                          double h, double delta = 1e-5, double tolerance = 1e-6);

/// Finite-volume form: d/dbeta <s_0>^2 against
/// (2 c / beta) sum_S phi_Lambda(S) P(S_g = S), where phi_Lambda only counts
/// pairs inside the ball and S_g is the set of sites not joined to the ghost in
/// two independent sourceless currents. Exact by enumeration of current parity
/// classes; the note records how well sum_{S containing 0} P(S_g = S)
/// reproduces 1 - <s_0>^2.
InequalityReport check_ising_differential_finite_volume(const Lattice& lattice, int n,
                                                     const std::vector<double>& beta_grid, double h,
                                                     double delta = 1e-5, double tolerance = 1e-6);

/// Distribution of S_g (bitmask over region sites) under two independent
/// sourceless currents on the region plus ghost.
std::vector<double> double_current_cluster_law(const Region& region, double beta, double h);

/// <s_0 s_z>_Lambda against sum_{x in S, y in Lambda \ S} <s_0 s_x>_S <s_x s_y>_{x,y} <s_y s_z>_Lambda.
InequalityReport check_modified_simon(const Lattice& lattice, const std::vector<VertexId>& Lambda,
                                      const std::vector<VertexId>& S, const VertexId& z,
                                      const std::vector<double>& beta_grid, double h, double tolerance = 1e-9);

/// dM/dbeta against (sum_y J_{0,y}) M dM/dh for M = <s_0> on ball n.
InequalityReport check_ghs_differential(const Lattice& lattice, int n, const std::vector<double>& beta_grid,
                                        const std::vector<double>& h_grid, double delta = 1e-5,
                                        double tolerance = 1e-6);

struct BkScenario
{
    std::string name;
    std::vector<VertexId> S;
    std::vector<VertexId> A;
    std::vector<VertexId> B;
    VertexId u;
};

/// Three fixed scenarios built from balls around the origin.
std::vector<BkScenario> bk_scenarios(const Lattice& lattice);

struct SimonInstance
{
    std::vector<VertexId> Lambda;
    std::vector<VertexId> S;
    VertexId z;
};

/// In two dimensions the 4x3 grid [-1,2]x[-1,1] with S = ball 1 and z = (2,1);
/// otherwise ball 2 with S = ball 1 and z = 2 e_1.
SimonInstance simon_instance(const Lattice& lattice);

} // namespace phasecert
