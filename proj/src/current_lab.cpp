#include "phasecert/current_lab.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <regex>

#include "phasecert/errors.hpp"
#include "phasecert/parallel.hpp"
#include "phasecert/summation.hpp"
#include "phasecert/union_find.hpp"

namespace phasecert
{

CurrentGraph CurrentGraph::from_region(const Region& region, bool with_ghost)
{
    std::vector<Pair> edges;
    for (const auto& e : region.internal_edges())
        edges.push_back({e.a, e.b, e.J});
    return custom({region.vertices().begin(), region.vertices().end()}, std::move(edges), with_ghost);
}

CurrentGraph CurrentGraph::custom(std::vector<VertexId> sites, std::vector<Pair> edges, bool with_ghost)
{
    if (sites.empty() || sites.size() > kMaxSites)
        throw InvalidArgument("current graphs hold 1 to " + std::to_string(kMaxSites) + " sites");
    CurrentGraph g;
    g.sites_ = std::move(sites);
    g.with_ghost_ = with_ghost;
    const int n = g.site_count();
    std::map<std::pair<int, int>, bool> seen;
    for (auto e : edges)
    {
        if (e.a == e.b || e.a < 0 || e.b < 0 || e.a >= n || e.b >= n)
            throw InvalidArgument("current graph edge has invalid endpoints");
        if (!(e.J > 0.0) || !std::isfinite(e.J))
            throw InvalidArgument("current graph couplings must be positive");
        if (e.a > e.b)
            std::swap(e.a, e.b);
        if (!seen.emplace(std::pair{e.a, e.b}, true).second)
            throw InvalidArgument("current graph edge listed twice");
        g.pairs_.push_back(e);
    }
    if (with_ghost)
        for (int v = 0; v < n; ++v)
            g.pairs_.push_back({v, n, 1.0});
    return g;
}

double CurrentGraph::pair_weight(std::size_t e, double beta, double h) const
{
    return is_ghost_pair(e) ? h : beta * pairs_[e].J;
}

std::uint32_t CurrentGraph::mask(const std::vector<int>& vertices) const
{
    std::uint32_t m = 0;
    for (int v : vertices)
    {
        if (v < 0 || v > ghost() || (v == ghost() && !with_ghost_))
            throw InvalidArgument("source vertex " + std::to_string(v) + " is not in the current graph");
        m ^= 1u << v;
    }
    return m;
}

namespace
{
std::uint32_t endpoint_mask(const CurrentGraph::Pair& p)
{
    return (1u << p.a) | (1u << p.b);
}

std::uint32_t boundary_mask(const CurrentGraph& graph, const std::vector<int>& multiplicity)
{
    std::uint32_t m = 0;
    for (std::size_t e = 0; e < multiplicity.size(); ++e)
        if (multiplicity[e] & 1)
            m ^= endpoint_mask(graph.pairs()[e]);
    return m;
}

void check_inputs(double beta, double h, int N)
{
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw InvalidArgument("beta must be finite and nonnegative");
    if (!(h >= 0.0) || !std::isfinite(h))
        throw InvalidArgument("h must be finite and nonnegative");
    if (N < 1 || N > 16)
        throw InvalidArgument("truncation N must lie in [1, 16]");
}

/// Per-pair caps; ghost pairs are inactive without a field.
std::vector<int> pair_caps(const CurrentGraph& graph, double h, int N)
{
    std::vector<int> caps(graph.pairs().size(), N);
    for (std::size_t e = 0; e < caps.size(); ++e)
        if (graph.is_ghost_pair(e) && h == 0.0)
            caps[e] = 0;
    return caps;
}

void guard_states(const std::vector<int>& caps, std::uint64_t per_state_width = 0)
{
    double states = 1.0;
    for (int c : caps)
        states *= per_state_width ? static_cast<double>((c + 1) * (c + 2) / 2) : static_cast<double>(c + 1);
    if (states > kMaxStates)
        throw StateSpaceOverflow("current enumeration would visit " + std::to_string(states) + " states");
}

/// Sums fn(m) over every multiplicity vector m <= caps with boundary `target`,
/// one task per value of the first pair, reduced in order.
template <typename Fn>
double sum_currents(const CurrentGraph& graph, const std::vector<int>& caps, std::uint32_t target, Fn fn)
{
    guard_states(caps);
    const std::size_t P = caps.size();
    if (P == 0)
        return target == 0 ? fn(std::vector<int>{}) : 0.0;
    std::vector<NeumaierSum> parts(caps[0] + 1);
    parallel_for(parts.size(), [&](std::size_t first) {
        std::vector<int> m(P, 0);
        m[0] = static_cast<int>(first);
        while (true)
        {
            if (boundary_mask(graph, m) == target)
                parts[first] += fn(m);
            std::size_t k = 1;
            for (; k < P; ++k)
            {
                if (m[k] < caps[k])
                {
                    ++m[k];
                    break;
                }
                m[k] = 0;
            }
            if (k == P)
                break;
        }
    });
    NeumaierSum total;
    for (const auto& p : parts)
        total += p;
    return total.value();
}

std::vector<int> normalized(std::vector<int> A)
{
    std::sort(A.begin(), A.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < A.size();)
    {
        std::size_t j = i;
        while (j < A.size() && A[j] == A[i])
            ++j;
        if ((j - i) % 2 == 1)
            out.push_back(A[i]);
        i = j;
    }
    return out;
}

std::vector<int> symmetric_difference(std::vector<int> A, const std::vector<int>& B)
{
    A.insert(A.end(), B.begin(), B.end());
    return normalized(std::move(A));
}
} // namespace

std::vector<int> sources(const CurrentGraph& graph, const Current& current)
{
    if (current.multiplicity.size() != graph.pairs().size())
        throw InvalidArgument("current does not match the graph");
    const std::uint32_t m = boundary_mask(graph, current.multiplicity);
    std::vector<int> out;
    for (int v = 0; v <= graph.ghost(); ++v)
        if (m & (1u << v))
            out.push_back(v);
    return out;
}

double weight(const CurrentGraph& graph, const Current& current, double beta, double h)
{
    if (current.multiplicity.size() != graph.pairs().size())
        throw InvalidArgument("current does not match the graph");
    double w = 1.0;
    for (std::size_t e = 0; e < current.multiplicity.size(); ++e)
    {
        const int n = current.multiplicity[e];
        if (n < 0)
            throw InvalidArgument("negative multiplicity");
        const double t = graph.pair_weight(e, beta, h);
        for (int k = 1; k <= n; ++k)
            w *= t / k;
    }
    return w;
}

std::vector<Current> enumerate_currents(const CurrentGraph& graph, const std::vector<int>& srcs, double beta,
                                        double h, int N)
{
    check_inputs(beta, h, N);
    const std::uint32_t target = graph.mask(srcs);
    std::vector<Current> out;
    const auto caps = pair_caps(graph, h, N);
    guard_states(caps);
    const std::size_t P = caps.size();
    std::vector<int> m(P, 0);
    while (true)
    {
        const std::uint32_t b = boundary_mask(graph, m);
        if (std::popcount(b) % 2 != 0)
            throw Error("current with an odd number of sources");
        if (b == target)
            out.push_back({m});
        std::size_t k = 0;
        for (; k < P; ++k)
        {
            if (m[k] < caps[k])
            {
                ++m[k];
                break;
            }
            m[k] = 0;
        }
        if (k == P)
            break;
    }
    return out;
}

double source_sum(const CurrentGraph& graph, const std::vector<int>& srcs, double beta, double h, int N,
                  SumMethod method)
{
    check_inputs(beta, h, N);
    const std::uint32_t target = graph.mask(srcs);
    const auto caps = pair_caps(graph, h, N);
    const std::size_t P = caps.size();
    if (method == SumMethod::enumerate)
        return sum_currents(graph, caps, target,
                            [&](const std::vector<int>& m) { return weight(graph, Current{m}, beta, h); });

    if (std::ldexp(1.0, static_cast<int>(P)) > kMaxStates)
        throw StateSpaceOverflow("too many parity patterns");
    // Partial sums of t^k / k! over even and odd k up to each pair's cap.
    std::vector<std::array<double, 2>> parts(P);
    for (std::size_t e = 0; e < P; ++e)
    {
        const double t = graph.pair_weight(e, beta, h);
        double term = 1.0;
        NeumaierSum even, odd;
        even += term;
        for (int k = 1; k <= caps[e]; ++k)
        {
            term *= t / k;
            (k % 2 ? odd : even) += term;
        }
        parts[e] = {even.value(), odd.value()};
    }
    NeumaierSum total;
    for (std::uint64_t pi = 0; pi < (std::uint64_t{1} << P); ++pi)
    {
        std::uint32_t b = 0;
        double prod = 1.0;
        for (std::size_t e = 0; e < P; ++e)
        {
            const int bit = static_cast<int>((pi >> e) & 1u);
            if (bit)
                b ^= endpoint_mask(graph.pairs()[e]);
            prod *= parts[e][bit];
        }
        if (b == target)
            total += prod;
    }
    return total.value();
}

double expectation_via_currents(const CurrentGraph& graph, const std::vector<int>& A_in, double beta, double h,
                                int N, SumMethod method)
{
    std::vector<int> A = normalized(A_in);
    if (std::find(A.begin(), A.end(), graph.ghost()) != A.end())
        throw InvalidArgument("the ghost cannot be a requested spin");
    const double z = source_sum(graph, {}, beta, h, N, method);
    if (A.size() % 2 == 1)
    {
        if (!graph.has_ghost() || h == 0.0)
        {
            const double odd = source_sum(graph, A, beta, h, N, method);
            if (odd != 0.0)
                throw Error("odd source set gave a nonzero sum without a field");
            return 0.0;
        }
        A.push_back(graph.ghost());
    }
    return source_sum(graph, A, beta, h, N, method) / z;
}

double correlation_via_currents(const CurrentGraph& graph, int x, int y, double beta, double h, int N,
                                SumMethod method)
{
    return expectation_via_currents(graph, {x, y}, beta, h, N, method);
}

FSelector FSelector::parse(const std::string& text)
{
    if (text == "one")
        return {Kind::one, 0, 0};
    if (text == "even_total")
        return {Kind::even_total, 0, 0};
    static const std::regex connect(R"(connect\(\s*(\d+)\s*,\s*(\d+)\s*\))");
    std::smatch m;
    if (std::regex_match(text, m, connect))
        return {Kind::connect, std::stoi(m[1]), std::stoi(m[2])};
    throw InvalidArgument("unknown functional '" + text + "' (one, even_total, connect(a,b))");
}

std::string FSelector::to_string() const
{
    switch (kind)
    {
    case Kind::one: return "one";
    case Kind::even_total: return "even_total";
    case Kind::connect: return "connect(" + std::to_string(a) + "," + std::to_string(b) + ")";
    }
    return "one";
}

CurrentFunctional FSelector::functional() const
{
    switch (kind)
    {
    case Kind::one: return [](const CurrentGraph&, const std::vector<int>&) { return 1.0; };
    case Kind::even_total:
        return [](const CurrentGraph&, const std::vector<int>& m) {
            long total = 0;
            for (int k : m)
                total += k;
            return total % 2 == 0 ? 1.0 : 0.0;
        };
    case Kind::connect:
        return [a = a, b = b](const CurrentGraph& g, const std::vector<int>& m) {
            return connected_in(g, m, a, b) ? 1.0 : 0.0;
        };
    }
    throw InvalidArgument("unknown functional");
}

bool connected_in(const CurrentGraph& graph, const std::vector<int>& multiplicity, int a, int b)
{
    UnionFind uf(graph.ghost() + 1);
    for (std::size_t e = 0; e < multiplicity.size(); ++e)
        if (multiplicity[e] > 0)
            uf.unite(graph.pairs()[e].a, graph.pairs()[e].b);
    return uf.connected(a, b);
}

double SwitchingResult::relative_discrepancy() const
{
    const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    return scale == 0.0 ? 0.0 : std::fabs(lhs - rhs) / scale;
}

namespace
{
void check_switching(const CurrentGraph& graph, const std::vector<int>& A, int u, int v)
{
    if (u == v)
        throw InvalidArgument("switching check needs distinct u and v");
    graph.mask(A);
    graph.mask({u, v});
}
} // namespace

SwitchingResult switching_check(const CurrentGraph& graph, const std::vector<int>& A_in, int u, int v,
                                const CurrentFunctional& F, double beta, double h, int N)
{
    check_inputs(beta, h, N);
    check_switching(graph, A_in, u, v);
    const auto A = normalized(A_in);
    const std::uint32_t left = graph.mask(symmetric_difference(A, {u, v}));
    const std::uint32_t right = graph.mask(A);
    const auto caps = pair_caps(graph, h, N);
    const std::size_t P = caps.size();
    if (std::ldexp(1.0, static_cast<int>(P)) > kMaxStates)
        throw StateSpaceOverflow("too many parity patterns");

    // c[m][par] = sum over k <= m with k = par (mod 2) of 1 / (k! (m - k)!).
    std::vector<std::array<double, 2>> c(N + 1);
    std::vector<double> inv_fact(N + 1, 1.0);
    for (int k = 1; k <= N; ++k)
        inv_fact[k] = inv_fact[k - 1] / k;
    for (int m = 0; m <= N; ++m)
    {
        c[m] = {0.0, 0.0};
        for (int k = 0; k <= m; ++k)
            c[m][k % 2] += inv_fact[k] * inv_fact[m - k];
    }
    std::vector<std::uint64_t> left_patterns, right_patterns;
    for (std::uint64_t pi = 0; pi < (std::uint64_t{1} << P); ++pi)
    {
        std::uint32_t b = 0;
        bool feasible = true;
        for (std::size_t e = 0; e < P; ++e)
            if ((pi >> e) & 1u)
            {
                b ^= endpoint_mask(graph.pairs()[e]);
                feasible = feasible && caps[e] >= 1;
            }
        if (!feasible)
            continue;
        if (b == left)
            left_patterns.push_back(pi);
        if (b == right)
            right_patterns.push_back(pi);
    }
    std::vector<double> t(P);
    for (std::size_t e = 0; e < P; ++e)
        t[e] = graph.pair_weight(e, beta, h);

    auto split_sum = [&](const std::vector<int>& m, const std::vector<std::uint64_t>& patterns) {
        NeumaierSum s;
        for (auto pi : patterns)
        {
            double prod = 1.0;
            for (std::size_t e = 0; e < P && prod != 0.0; ++e)
                prod *= c[m[e]][(pi >> e) & 1u];
            s += prod;
        }
        return s.value();
    };
    auto power = [&](const std::vector<int>& m) {
        double p = 1.0;
        for (std::size_t e = 0; e < P; ++e)
            for (int k = 0; k < m[e]; ++k)
                p *= t[e];
        return p;
    };
    // Both sides range over combined currents m = n1 + n2 with boundary A.
    SwitchingResult r;
    r.lhs = sum_currents(graph, caps, right, [&](const std::vector<int>& m) {
        const double f = F(graph, m);
        return f == 0.0 ? 0.0 : f * power(m) * split_sum(m, left_patterns);
    });
    r.rhs = sum_currents(graph, caps, right, [&](const std::vector<int>& m) {
        if (!connected_in(graph, m, u, v))
            return 0.0;
        const double f = F(graph, m);
        return f == 0.0 ? 0.0 : f * power(m) * split_sum(m, right_patterns);
    });
    return r;
}

SwitchingResult switching_check_bruteforce(const CurrentGraph& graph, const std::vector<int>& A_in, int u, int v,
                                           const CurrentFunctional& F, double beta, double h, int N)
{
    check_inputs(beta, h, N);
    check_switching(graph, A_in, u, v);
    const auto A = normalized(A_in);
    const std::uint32_t left1 = graph.mask(symmetric_difference(A, {u, v}));
    const std::uint32_t left2 = graph.mask({u, v});
    const std::uint32_t right1 = graph.mask(A);
    const auto caps = pair_caps(graph, h, N);
    guard_states(caps, 1);
    const std::size_t P = caps.size();
    std::vector<int> n1(P, 0), n2(P, 0), m(P, 0);
    NeumaierSum lhs, rhs;
    while (true)
    {
        const std::uint32_t b1 = boundary_mask(graph, n1);
        const std::uint32_t b2 = boundary_mask(graph, n2);
        const bool l = b1 == left1 && b2 == left2;
        const bool r = b1 == right1 && b2 == 0;
        if (l || r)
        {
            for (std::size_t e = 0; e < P; ++e)
                m[e] = n1[e] + n2[e];
            const double w = weight(graph, {n1}, beta, h) * weight(graph, {n2}, beta, h) * F(graph, m);
            if (l)
                lhs += w;
            if (r && connected_in(graph, m, u, v))
                rhs += w;
        }
        // Odometer over (n1_e, n2_e) with n1_e + n2_e <= cap_e.
        std::size_t k = 0;
        for (; k < P; ++k)
        {
            if (n1[k] + n2[k] < caps[k])
            {
                ++n2[k];
                break;
            }
            if (n1[k] < caps[k])
            {
                ++n1[k];
                n2[k] = 0;
                break;
            }
            n1[k] = 0;
            n2[k] = 0;
        }
        if (k == P)
            break;
    }
    return {lhs.value(), rhs.value()};
}

namespace
{
bool vertex_before(const CurrentGraph& graph, int a, int b)
{
    const bool ga = a == graph.ghost();
    const bool gb = b == graph.ghost();
    if (ga || gb)
        return !ga && gb;
    return graph.sites()[a] < graph.sites()[b];
}
} // namespace

bool oriented_before(const CurrentGraph& graph, const OrientedEdge& a, const OrientedEdge& b)
{
    if (a.from != b.from)
        return vertex_before(graph, a.from, b.from);
    return vertex_before(graph, a.to, b.to);
}

namespace
{
struct BackboneSearch
{
    const CurrentGraph& graph;
    std::vector<std::vector<OrientedEdge>> out; ///< outgoing edges per vertex in global order
    int target;
    std::vector<bool> used;
    std::vector<OrientedEdge> path;

    bool dfs(int v)
    {
        if (v == target)
            return true;
        for (const auto& e : out[v])
        {
            if (used[e.pair])
                continue;
            used[e.pair] = true;
            path.push_back(e);
            if (dfs(e.to))
                return true;
            path.pop_back();
            used[e.pair] = false;
        }
        return false;
    }
};
} // namespace

std::vector<OrientedEdge> extract_backbone(const CurrentGraph& graph, const Current& current, int x, int y)
{
    const auto src = sources(graph, current);
    auto expected = normalized({x, y});
    if (x == y || src != expected)
        throw NoPath("backbone needs a current with sources exactly {x, y}");
    BackboneSearch search{graph, std::vector<std::vector<OrientedEdge>>(graph.ghost() + 1), y,
                          std::vector<bool>(graph.pairs().size(), false), {}};
    for (std::size_t e = 0; e < graph.pairs().size(); ++e)
    {
        if (current.multiplicity[e] <= 0)
            continue;
        const auto& p = graph.pairs()[e];
        search.out[p.a].push_back({p.a, p.b, static_cast<int>(e)});
        search.out[p.b].push_back({p.b, p.a, static_cast<int>(e)});
    }
    for (auto& list : search.out)
        std::sort(list.begin(), list.end(),
                  [&](const OrientedEdge& a, const OrientedEdge& b) { return oriented_before(graph, a, b); });
    if (!search.dfs(x))
        throw NoPath("no positive path between the sources");
    return search.path;
}

std::vector<BackboneWeight> backbone_decomposition(const CurrentGraph& graph, int x, int y, double beta, double h,
                                                   int N)
{
    check_inputs(beta, h, N);
    if (x == y)
        throw InvalidArgument("backbone decomposition needs distinct endpoints");
    const double z = source_sum(graph, {}, beta, h, N);
    const auto caps = pair_caps(graph, h, N);
    const std::uint32_t target = graph.mask({x, y});
    guard_states(caps);
    std::map<std::vector<int>, std::pair<std::vector<OrientedEdge>, NeumaierSum>> groups;
    const std::size_t P = caps.size();
    std::vector<int> m(P, 0);
    while (true)
    {
        if (boundary_mask(graph, m) == target)
        {
            const Current cur{m};
            auto path = extract_backbone(graph, cur, x, y);
            std::vector<int> key;
            for (const auto& e : path)
            {
                key.push_back(e.from);
                key.push_back(e.to);
            }
            auto& slot = groups[key];
            slot.first = std::move(path);
            slot.second += weight(graph, cur, beta, h);
        }
        std::size_t k = 0;
        for (; k < P; ++k)
        {
            if (m[k] < caps[k])
            {
                ++m[k];
                break;
            }
            m[k] = 0;
        }
        if (k == P)
            break;
    }
    std::vector<BackboneWeight> out;
    for (auto& [key, g] : groups)
        out.push_back({g.first, g.second.value() / z});
    std::sort(out.begin(), out.end(), [&](const BackboneWeight& a, const BackboneWeight& b) {
        return std::lexicographical_compare(
            a.path.begin(), a.path.end(), b.path.begin(), b.path.end(),
            [&](const OrientedEdge& p, const OrientedEdge& q) { return oriented_before(graph, p, q); });
    });
    return out;
}

} // namespace phasecert
