// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phasecert/certificates.hpp"
#include "phasecert/cli.hpp"
#include "phasecert/current_lab.hpp"
#include "phasecert/exact_engine.hpp"
#include "phasecert/ising_mc.hpp"
#include "phasecert/perc_mc.hpp"
#include "phasecert/verify_suite.hpp"

using namespace phasecert;
namespace fs = std::filesystem;

namespace
{
// tolerances and thresholds
constexpr double kRootTol = 1e-8;
constexpr double kPercPcBound = 0.5;
constexpr double kIsingBetaCBound = 0.4406868;
constexpr double kCriticalSlack = 1e-6;
constexpr double kSigmas = 3.0;
constexpr double kDecayR2 = 0.98;
constexpr double kDegradedR2 = 0.95;
constexpr double kGhostFloor = 0.5;
constexpr double kIsingMeanField = 0.41666;
constexpr double kSwitchingTol = 1e-10;
constexpr double kCurrentTol = 1e-6;
constexpr double kMarginTol = -1e-6;

const double kBetaC = 0.5 * std::log(1.0 + std::sqrt(2.0));

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

PhiOptions exact_only()
{
    PhiOptions o;
    o.allow_monte_carlo = false;
    return o;
}

Outcome criterion1()
{
    const Lattice sq = Lattice::square();
    const Lattice bs = Lattice::square(ParamMode::beta);
    const double r0 = critical_root(Model::percolation, sq, ball(sq, 0), 1e-12, exact_only()).param;
    const double r1 = critical_root(Model::percolation, sq, ball(sq, 1), 1e-12, exact_only()).param;
    const double ri = critical_root(Model::ising, bs, ball(bs, 0), 1e-12, exact_only()).param;
    const double e0 = std::fabs(r0 - 0.25), e1 = std::fabs(r1 - 1.0 / std::sqrt(12.0)),
                 ei = std::fabs(ri - std::atanh(0.25));
    return {e0 < kRootTol && e1 < kRootTol && ei < kRootTol,
            fmt("perc L0 %.12f L1 %.12f, ising L0 %.12f, max err %.1e", r0, r1, ri, std::max({e0, e1, ei}))};
}

Outcome criterion2()
{
    const Lattice sq = Lattice::square();
    const Lattice bs = Lattice::square(ParamMode::beta);
    bool ok = true;
    std::string detail;
    for (const auto& [model, lattice, cap] : {std::tuple{Model::percolation, sq, kPercPcBound},
                                              std::tuple{Model::ising, bs, kIsingBetaCBound}})
    {
        const BestBound b = best_bound(model, lattice, 2, 1e-12, exact_only());
        std::vector<double> roots;
        for (const auto& row : b.table)
        {
            if (!row.root || row.root->method != PhiMethod::exact)
            {
                ok = false;
                continue;
            }
            roots.push_back(row.root->param);
            ok = ok && row.root->param <= cap;
        }
        ok = ok && roots.size() == 3 && roots[2] > roots[1];
        detail += fmt("%s roots", to_string(model).c_str());
        for (double r : roots)
            detail += fmt(" %.9f", r);
        detail += fmt(" (cap %.7f); ", cap);
    }
    return {ok, detail};
}

Outcome criterion3()
{
    const Lattice sq = Lattice::square();
    const Lattice bs = Lattice::square(ParamMode::beta);
    bool ok = true;
    std::string detail;
    for (int n = 0; n <= 2; ++n)
    {
        const double a = phi_percolation(sq, ball(sq, n), kPercPcBound, exact_only()).value;
        const double b = phi_ising(bs, ball(bs, n), kIsingBetaCBound, exact_only()).value;
        ok = ok && a >= 1.0 - kCriticalSlack && b >= 1.0 - kCriticalSlack;
        detail += fmt("L%d perc %.6f ising %.6f; ", n, a, b);
    }
    return {ok, detail};
}

Outcome criterion4(std::uint64_t seed)
{
    const Lattice sq = Lattice::square();
    const Region s = ball(sq, 1);
    const double bound = chi_upper_bound(s, phi_percolation(sq, s, 0.25, exact_only()));
    bool ok = true;
    std::string detail = fmt("bound %.6f;", bound);
    for (int n : {16, 32})
    {
        const MCEstimate chi = estimate_susceptibility(sq, n, 0.25, 200000, seed + n);
        ok = ok && chi.mean <= bound + kSigmas * chi.std_error;
        detail += fmt(" n=%d chi %.4f +- %.4f", n, chi.mean, chi.std_error);
    }
    return {ok, detail};
}

Outcome criterion5(std::uint64_t seed)
{
    const Lattice sq = Lattice::square();
    PhiOptions mc;
    mc.mc_samples = 400000;
    mc.seed = seed;
    const Region cert = ball(sq, 12);
    const PhiResult phi = phi_percolation(sq, cert, 0.4, mc);
    if (!(phi.upper_confidence < 1.0))
        return {false, fmt("no certificate at p=0.4 from ball 12 (phi upper %.4f)", phi.upper_confidence)};

    std::vector<DecayPoint> sub, crit;
    bool bounded = true;
    for (int n = 8; n <= 48; n += 8)
    {
        const MCEstimate e = estimate_exit(sq, n, 0.4, 1000000, seed + n);
        bounded = bounded && e.mean <= decay_upper_bound(cert, phi, n) + kSigmas * e.std_error;
        sub.push_back({n, e});
        crit.push_back({n, estimate_exit(sq, n, 0.5, 100000, seed + 100 + n)});
    }
    const DecayFit f4 = fit_decay_rate(sub);
    const DecayFit f5 = fit_decay_rate(crit);
    const bool degraded = f5.r2 < kDegradedR2 || f5.rate < f4.rate / 3.0;
    return {f4.rate > 0.0 && f4.r2 >= kDecayR2 && bounded && degraded,
            fmt("p=0.4 c %.4f r2 %.4f, bound respected %s (phi12 upper %.4f); p=0.5 c %.4f r2 %.4f", f4.rate, f4.r2,
                bounded ? "yes" : "no", phi.upper_confidence, f5.rate, f5.r2)};
}

Outcome criterion6(std::uint64_t seed)
{
    const Lattice sq = Lattice::square();
    bool ok = true;
    std::string detail;
    for (double p : {0.6, 0.55})
    {
        const MeanFieldReport r = check_mean_field(sq, 64, p, 20000, seed + static_cast<std::uint64_t>(p * 100));
        ok = ok && r.theta.mean >= r.bound - kSigmas * r.theta.std_error;
        detail += fmt("p=%.2f theta %.4f +- %.4f vs %.4f; ", p, r.theta.mean, r.theta.std_error, r.bound);
    }
    return {ok, detail};
}

Outcome criterion7(std::uint64_t seed)
{
    const Lattice sq = Lattice::square();
    double worst = 1e300;
    std::string detail;
    for (int k = 0; k < 5; ++k)
    {
        const double h = 0.002 * std::pow(100.0, k / 4.0);
        const MCEstimate m = estimate_ghost_magnetization(sq, 96, 0.5, h, 20000, seed + k);
        const double ratio = (m.mean - kSigmas * m.std_error) / std::sqrt(h);
        worst = std::min(worst, ratio);
        detail += fmt("h=%.4g M %.4f; ", h, m.mean);
    }
    return {worst >= kGhostFloor, fmt("min (M-3s)/sqrt(h) %.4f vs floor %.2f; ", worst, kGhostFloor) + detail};
}

Outcome criterion8(std::uint64_t seed)
{
    const Lattice sq = Lattice::square();
    const MCEstimate m = estimate_magnetization(sq, 128, 1.1 * kBetaC, Boundary::plus, 2000, seed);
    return {m.mean >= kIsingMeanField - kSigmas * m.std_error,
            fmt("m %.4f +- %.4f vs %.5f", m.mean, m.std_error, kIsingMeanField)};
}

// every graph on 2..4 labelled sites
std::vector<CurrentGraph> small_graphs(bool ghost)
{
    std::vector<CurrentGraph> out;
    for (int k = 2; k <= 4; ++k)
    {
        std::vector<VertexId> sites;
        for (int i = 0; i < k; ++i)
            sites.push_back({i, 0});
        std::vector<std::pair<int, int>> all;
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b)
                all.emplace_back(a, b);
        for (unsigned mask = 0; mask < (1u << all.size()); ++mask)
        {
            std::vector<CurrentGraph::Pair> pairs;
            for (std::size_t e = 0; e < all.size(); ++e)
                if (mask >> e & 1u)
                    pairs.push_back({all[e].first, all[e].second, 1.0});
            out.push_back(CurrentGraph::custom(sites, pairs, ghost));
        }
    }
    return out;
}

Outcome criterion9()
{
    const CurrentGraph tri =
        CurrentGraph::custom({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}, true);
    double worst_switch = 0.0;
    for (const char* name : {"one", "even_total", "connect(0,2)"})
    {
        const CurrentFunctional F = FSelector::parse(name).functional();
        worst_switch = std::max(
            worst_switch, switching_check(tri, {0, 1}, 0, tri.ghost(), F, 0.4, 0.3, 8).relative_discrepancy());
    }
    double worst_corr = 0.0;
    int graphs = 0;
    for (const auto& [ghost, h] : {std::pair{false, 0.0}, std::pair{true, 0.3}})
        for (const CurrentGraph& g : small_graphs(ghost))
        {
            ++graphs;
            IsingSpec spec;
            spec.num_sites = g.site_count();
            for (std::size_t e = 0; e < g.pairs().size(); ++e)
                if (!g.is_ghost_pair(e))
                    spec.bonds.push_back({g.pairs()[e].a, g.pairs()[e].b, g.pairs()[e].J});
            const ExactIsing ex = ising_exact(spec, 0.5, h, true);
            for (int x = 0; x < g.site_count(); ++x)
                for (int y = x + 1; y < g.site_count(); ++y)
                    worst_corr = std::max(worst_corr,
                                          std::fabs(correlation_via_currents(g, x, y, 0.5, h, 14) - ex.pair(x, y)));
        }
    return {worst_switch < kSwitchingTol && worst_corr < kCurrentTol,
            fmt("switching max rel %.2e; correlations max abs %.2e over %d graphs", worst_switch, worst_corr,
                graphs)};
}

Outcome criterion10(std::string& extra)
{
    const Lattice sq = Lattice::square();
    const Lattice bs = Lattice::square(ParamMode::beta);
    std::vector<InequalityReport> reports;
    reports.push_back(check_perc_differential(sq, 1, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}));
    for (const auto& s : bk_scenarios(sq))
    {
        InequalityReport r = check_bk_decomposition(sq, s.S, s.A, s.B, s.u, {0.2, 0.5, 0.8});
        r.name = "bk:" + s.name;
        reports.push_back(r);
    }
    const std::vector<double> beta8{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    reports.push_back(check_ising_differential(bs, 1, beta8, 0.1));
    const SimonInstance si = simon_instance(bs);
    reports.push_back(check_modified_simon(bs, si.Lambda, si.S, si.z, {0.2, 0.3, 0.4}, 0.0));
    reports.push_back(check_ghs_differential(bs, 1, {0.2, 0.4}, {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}));
    bool ok = true;
    std::string detail;
    for (const auto& r : reports)
    {
        const bool good = r.in_scope && r.min_margin >= kMarginTol;
        ok = ok && good;
        detail += fmt("%s %s (min margin %.3g); ", r.name.c_str(), good ? "ok" : "FAILS", r.min_margin);
    }
    const InequalityReport proof = check_ising_differential_finite_volume(bs, 1, beta8, 0.1);
    extra = fmt("ising-diff finite-volume form: %s, min margin %.4g", proof.min_margin >= kMarginTol ? "ok" : "FAILS",
                proof.min_margin);
    return {ok, detail};
}

Outcome criterion11(std::uint64_t seed)
{
    const Lattice sq = Lattice::square();
    const int ns[] = {16, 32, 64};
    std::vector<MCEstimate> crit, ctrl;
    for (int n : ns)
    {
        crit.push_back(estimate_susceptibility(sq, n, 0.5, 20000, seed + n));
        ctrl.push_back(estimate_susceptibility(sq, n, 0.25, 100000, seed + 1000 + n));
    }
    const bool perc_up = strictly_increasing(crit, kSigmas);
    const double perc_bound = chi_upper_bound(ball(sq, 1), phi_percolation(sq, ball(sq, 1), 0.25, exact_only()));
    bool perc_ctrl = true;
    for (const auto& c : ctrl)
        perc_ctrl = perc_ctrl && c.mean <= perc_bound + kSigmas * c.std_error;
    perc_ctrl = perc_ctrl && std::fabs(ctrl[2].mean - ctrl[1].mean) <=
                                 kSigmas * std::hypot(ctrl[2].std_error, ctrl[1].std_error);

    const DivergenceReport ising = check_critical_divergence(sq, kBetaC, ns, 2000, seed + 7);
    const Lattice bs = Lattice::square(ParamMode::beta);
    const double ising_bound = chi_upper_bound(ball(bs, 2), phi_ising(bs, ball(bs, 2), 0.25, exact_only()));
    const DivergenceReport control = check_critical_divergence(sq, 0.25, ns, 2000, seed + 8);
    bool ising_ctrl = true;
    for (const auto& p : control.points)
        ising_ctrl = ising_ctrl && p.estimate.mean <= ising_bound + kSigmas * p.estimate.std_error;
    const auto& cp = control.points;
    ising_ctrl = ising_ctrl && std::fabs(cp[2].estimate.mean - cp[1].estimate.mean) <=
                                   kSigmas * std::hypot(cp[2].estimate.std_error, cp[1].estimate.std_error);

    std::string detail = "perc p=0.5 chi";
    for (const auto& c : crit)
        detail += fmt(" %.1f", c.mean);
    detail += fmt(" (%s); control p=0.25", perc_up ? "increasing" : "NOT increasing");
    for (const auto& c : ctrl)
        detail += fmt(" %.3f", c.mean);
    detail += fmt(" vs %.1f; ising beta_c chi", perc_bound);
    for (const auto& p : ising.points)
        detail += fmt(" %.1f", p.estimate.mean);
    detail += fmt(" (%s); control beta=0.25", ising.strictly_increasing ? "increasing" : "NOT increasing");
    for (const auto& p : cp)
        detail += fmt(" %.3f", p.estimate.mean);
    detail += fmt(" vs %.2f", ising_bound);
    return {perc_up && perc_ctrl && ising.strictly_increasing && ising_ctrl, detail};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion12(std::uint64_t seed, const fs::path& scratch)
{
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"simulate_perc.csv",
         {"simulate-perc", "--param", "0.5", "--n", "16", "--samples", "20000", "--observable", "exit", "chi"}},
        {"simulate_ising.csv",
         {"simulate-ising", "--param", "0.4", "--n", "8", "--sweeps", "1000", "--observable", "magnetization",
          "two_point"}},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [artifact, args] : runs)
    {
        std::string bytes[2];
        for (int rep = 0; rep < 2; ++rep)
        {
            const fs::path dir = scratch / (args[0] + "_" + std::to_string(rep));
            fs::remove_all(dir);
            std::vector<std::string> full = args;
            full.insert(full.end(), {"--seed", std::to_string(seed), "--out", dir.string()});
            std::vector<const char*> argv{"phasecert"};
            for (const auto& a : full)
                argv.push_back(a.c_str());
            std::ostringstream out, err;
            if (main_entry(static_cast<int>(argv.size()), argv.data(), out, err) != kExitOk)
                ok = false;
            bytes[rep] = slurp(dir / artifact);
        }
        const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
        ok = ok && same;
        detail += fmt("%s %s (%zu bytes); ", artifact.c_str(), same ? "identical" : "DIFFERS", bytes[0].size());
    }
    return {ok, detail};
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks for phasecert"};
    std::uint64_t seed = 20240601;
    std::vector<int> only;
    std::vector<int> known;
    std::string scratch = (fs::temp_directory_path() / "phasecert_acceptance").string();
    app.add_option("--seed", seed, "base seed for the stochastic criteria");
    app.add_option("--only", only, "run only these criteria");
    app.add_option("--known-failure", known,
                   "criteria expected to fail; exit status is 0 when exactly these fail");
    app.add_option("--scratch", scratch, "directory for the reproducibility runs");
    CLI11_PARSE(app, argc, argv);

    std::string extra10;
    const std::vector<std::function<Outcome()>> criteria{
        criterion1,
        criterion2,
        criterion3,
        [&] { return criterion4(seed); },
        [&] { return criterion5(seed); },
        [&] { return criterion6(seed); },
        [&] { return criterion7(seed); },
        [&] { return criterion8(seed); },
        criterion9,
        [&] { return criterion10(extra10); },
        [&] { return criterion11(seed); },
        [&] { return criterion12(seed, scratch); },
    };
    const std::set<int> wanted(only.begin(), only.end());
    std::set<int> failed;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const int id = static_cast<int>(i) + 1;
        if (!wanted.empty() && !wanted.contains(id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[i]();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass)
            failed.insert(id);
        std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  [" << fmt("%.1fs", secs) << "] "
                  << o.detail << "\n";
        if (id == 10 && !extra10.empty())
            std::cout << "    note: " << extra10 << "\n";
        std::cout.flush();
    }
    std::set<int> expected;
    for (int k : known)
        if (wanted.empty() || wanted.contains(k))
            expected.insert(k);
    std::cout << "failed: " << failed.size() << " of " << (wanted.empty() ? criteria.size() : wanted.size()) << "\n";
    return failed == expected ? 0 : 1;
}
