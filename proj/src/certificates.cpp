#include "phasecert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "phasecert/errors.hpp"
#include "phasecert/ising_mc.hpp"
#include "phasecert/parallel.hpp"
#include "phasecert/perc_mc.hpp"
#include "phasecert/summation.hpp"

namespace phasecert
{

std::string to_string(Model model)
{
    return model == Model::ising ? "ising" : "percolation";
}

std::string to_string(PhiMethod method)
{
    return method == PhiMethod::exact ? "exact" : "monte_carlo";
}

Model parse_model(const std::string& name)
{
    if (name == "perc" || name == "percolation")
        return Model::percolation;
    if (name == "ising")
        return Model::ising;
    throw InvalidArgument("unknown model '" + name + "' (expected perc or ising)");
}

namespace
{
PhiResult exact_result(double value, double param, const Region& region)
{
    PhiResult r;
    r.value = value;
    r.method = PhiMethod::exact;
    r.upper_confidence = value + kExactRounding * std::max(1.0, value);
    r.param = param;
    r.region_id = region.descriptor();
    return r;
}

std::vector<double> tanh_boundary(const Region& region, double beta)
{
    std::vector<double> out(region.size(), 0.0);
    for (const auto& bp : region.boundary_pairs())
        out[bp.inside] += std::tanh(beta * bp.J);
    return out;
}

PhiResult perc_phi_mc(const Lattice& lattice, const Region& region, double param, const PhiOptions& options)
{
    const auto weights = region.boundary_coupling(lattice, param);
    NeumaierSum total_w;
    for (double w : weights)
        total_w += w;
    const double wt = total_w.value();
    PhiResult r;
    r.method = PhiMethod::monte_carlo;
    r.param = param;
    r.region_id = region.descriptor();
    r.samples = options.mc_samples;
    r.seed = options.seed;
    if (wt == 0.0)
        return r;
    const BoxGraph box(lattice, region, param);
    const CounterRng rng(options.seed);
    const std::uint64_t samples = std::max<std::uint64_t>(options.mc_samples, 1);
    const std::size_t batches = static_cast<std::size_t>(std::min<std::uint64_t>(100, samples));
    std::vector<NeumaierSum> sums(batches), squares(batches);
    parallel_for(batches, [&](std::size_t b) {
        ClusterExplorer ex(box);
        for (std::uint64_t s = samples * b / batches; s < samples * (b + 1) / batches; ++s)
        {
            ex.explore(rng, s, 0.0, {});
            double y = 0.0;
            for (int v : ex.members())
                y += weights[v];
            y /= wt;
            sums[b] += y;
            squares[b] += y * y;
        }
    });
    NeumaierSum s1, s2;
    for (std::size_t b = 0; b < batches; ++b)
    {
        s1 += sums[b];
        s2 += squares[b];
    }
    const double n = static_cast<double>(samples);
    const double mean = s1.value() / n;
    r.value = wt * mean;
    r.std_error = wt * std::sqrt(std::max(0.0, s2.value() / n - mean * mean) / n);
    r.upper_confidence = wt * wilson_upper(std::clamp(mean, 0.0, 1.0), n, options.z);
    return r;
}

PhiResult ising_phi_mc(const Region& region, double beta, const PhiOptions& options)
{
    const auto weights = tanh_boundary(region, beta);
    const IsingGraph graph(region, Boundary::free);
    std::vector<double> series;
    series.reserve(options.mc_sweeps);
    run_chain(graph, beta, 0.0, options.mc_sweeps, options.seed, {}, [&](const auto& s) {
        double y = 0.0;
        for (std::size_t x = 0; x < s.size(); ++x)
            y += weights[x] * s[0] * s[x];
        series.push_back(y);
    });
    const MCEstimate est = batch_mean_estimate(series, options.seed, "phi");
    PhiResult r;
    r.value = std::max(0.0, est.mean);
    r.method = PhiMethod::monte_carlo;
    r.std_error = est.std_error;
    r.upper_confidence = std::max(r.value, est.mean + options.z * est.std_error);
    r.param = beta;
    r.region_id = region.descriptor();
    r.samples = options.mc_sweeps;
    r.seed = options.seed;
    return r;
}
} // namespace

PhiResult phi_percolation(const Lattice& lattice, const Region& region, double param, const PhiOptions& options)
{
    lattice.validate_param(param);
    try
    {
        const auto conn = perc_connect_probs(lattice, region, param, options.exact);
        const auto weights = region.boundary_coupling(lattice, param);
        NeumaierSum sum;
        for (std::size_t x = 0; x < weights.size(); ++x)
            sum += weights[x] * conn.probs[x];
        return exact_result(sum.value(), param, region);
    }
    catch (const CapExceeded&)
    {
        if (!options.allow_monte_carlo)
            throw;
    }
    return perc_phi_mc(lattice, region, param, options);
}

PhiResult phi_ising(const Lattice& lattice, const Region& region, double beta, const PhiOptions& options)
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw InvalidArgument("beta must be finite and nonnegative");
    (void)lattice;
    try
    {
        const auto obs = ising_observables(region, beta, 0.0, options.exact);
        const auto weights = tanh_boundary(region, beta);
        NeumaierSum sum;
        for (std::size_t x = 0; x < weights.size(); ++x)
            sum += weights[x] * obs.correlations[x];
        return exact_result(sum.value(), beta, region);
    }
    catch (const CapExceeded&)
    {
        if (!options.allow_monte_carlo)
            throw;
    }
    return ising_phi_mc(region, beta, options);
}

PhiResult phi(Model model, const Lattice& lattice, const Region& region, double param, const PhiOptions& options)
{
    return model == Model::ising ? phi_ising(lattice, region, param, options)
                                 : phi_percolation(lattice, region, param, options);
}

CertifyOutcome certify_subcritical(Model model, const Lattice& lattice, const Region& region, double param,
                                   const PhiOptions& options)
{
    PhiResult result = phi(model, lattice, region, param, options);
    if (result.upper_confidence < 1.0 - kEpsCert)
    {
        const bool exact = result.method == PhiMethod::exact;
        return Certificate{model,
                           lattice,
                           region,
                           param,
                           result,
                           exact,
                           "param <= critical point" + std::string(exact ? "" : " (statistical)")};
    }
    return Refusal{model, region, param, result,
                   "phi upper confidence " + std::to_string(result.upper_confidence) + " is not below 1 - eps"};
}

CriticalRoot critical_root(Model model, const Lattice& lattice, const Region& region, double tol,
                           const PhiOptions& options)
{
    if (!(tol > 0.0))
        throw InvalidArgument("root tolerance must be positive");
    PhiMethod method = PhiMethod::exact;
    auto certified = [&](double param) {
        const PhiResult r = phi(model, lattice, region, param, options);
        if (r.method == PhiMethod::monte_carlo)
            method = PhiMethod::monte_carlo;
        return r.upper_confidence < 1.0 - kEpsCert;
    };
    const bool p_mode = model == Model::percolation && lattice.mode() == ParamMode::p;
    double lo = 0.0;
    double hi = 1.0;
    if (p_mode)
    {
        if (certified(hi))
            throw NoRoot("phi stays below 1 on [0, 1] for " + region.descriptor());
    }
    else
    {
        while (certified(hi))
        {
            lo = hi;
            hi *= 2.0;
            if (hi > 64.0)
                throw NoRoot("phi stays below 1 up to parameter 64 for " + region.descriptor());
        }
    }
    int it = 0;
    for (; it < 200 && hi - lo > tol; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (certified(mid) ? lo : hi) = mid;
    }
    return {lo, method, it};
}

BestBound best_bound(Model model, const Lattice& lattice, int max_radius, double tol, const PhiOptions& options)
{
    if (max_radius < 0)
        throw InvalidArgument("max_radius must be nonnegative");
    BestBound out;
    for (int n = 0; n <= max_radius; ++n)
    {
        const Region region = ball(lattice, n);
        BoundRow row;
        row.radius = n;
        row.region_id = region.descriptor();
        row.size = region.size();
        try
        {
            row.root = critical_root(model, lattice, region, tol, options);
            if (row.root->method == PhiMethod::monte_carlo)
                row.note = "statistical";
        }
        catch (const NoRoot& e)
        {
            row.note = e.what();
        }
        catch (const CapExceeded& e)
        {
            row.note = e.what();
        }
        out.table.push_back(row);
        const std::size_t idx = out.table.size() - 1;
        if (!row.root)
            continue;
        if (!out.best || row.root->param > out.table[*out.best].root->param)
            out.best = idx;
        if (row.root->method == PhiMethod::exact &&
            (!out.best_exact || row.root->param > out.table[*out.best_exact].root->param))
            out.best_exact = idx;
    }
    return out;
}

namespace
{
struct Grown
{
    Region region;
    PhiResult phi;
    std::vector<double> trajectory;
};

Grown grow_from(Model model, const Lattice& lattice, double param, std::size_t max_size, Region start,
                const PhiOptions& options)
{
    Grown g{start, phi(model, lattice, start, param, options), {}};
    g.trajectory.push_back(g.phi.value);
    while (g.region.size() < max_size)
    {
        std::set<VertexId> candidates;
        for (const auto& bp : g.region.boundary_pairs())
            candidates.insert(bp.outside);
        std::optional<Grown> best;
        for (const auto& c : candidates)
        {
            std::vector<VertexId> verts(g.region.vertices().begin(), g.region.vertices().end());
            verts.push_back(c);
            Region next = Region::from_vertices(lattice, std::move(verts), g.region.origin());
            PhiResult r = phi(model, lattice, next, param, options);
            if (r.value < (best ? best->phi.value : g.phi.value))
                best = Grown{std::move(next), r, {}};
        }
        if (!best)
            break;
        g.region = std::move(best->region);
        g.phi = best->phi;
        g.trajectory.push_back(g.phi.value);
    }
    return g;
}
} // namespace

GrowResult greedy_grow(Model model, const Lattice& lattice, double param, std::size_t max_size,
                       const PhiOptions& options)
{
    if (max_size < 1)
        throw InvalidArgument("max_size must be at least 1");
    std::vector<Region> starts{ball(lattice, 0)};
    for (int n = 1;; ++n)
    {
        Region b = ball(lattice, n);
        if (b.size() > max_size)
            break;
        starts.push_back(std::move(b));
    }
    std::optional<Grown> best;
    for (auto& s : starts)
    {
        Grown g = grow_from(model, lattice, param, max_size, std::move(s), options);
        if (!best || g.phi.value < best->phi.value)
            best = std::move(g);
    }
    return {best->region, best->phi, best->trajectory};
}

double chi_upper_bound(const Region& region, const PhiResult& phi)
{
    if (!(phi.upper_confidence < 1.0))
        throw InvalidArgument("susceptibility bound needs phi < 1");
    return static_cast<double>(region.size()) / (1.0 - phi.upper_confidence);
}

double decay_upper_bound(const Region& region, const PhiResult& phi, int n)
{
    if (!(phi.upper_confidence < 1.0))
        throw InvalidArgument("decay bound needs phi < 1");
    if (n < 0)
        throw InvalidArgument("n must be nonnegative");
    return std::pow(phi.upper_confidence, n / region.radius_L());
}

} // namespace phasecert
