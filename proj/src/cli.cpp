#include "phasecert/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "phasecert/current_lab.hpp"
#include "phasecert/perc_mc.hpp"
#include "phasecert/verify_suite.hpp"

#ifndef PHASECERT_VERSION
#define PHASECERT_VERSION "0.0.0"
#endif

namespace phasecert
{

namespace fs = std::filesystem;

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"certify",        "phi",    "best-bound",  "simulate-perc",
                                                "simulate-ising", "verify", "current-lab", "report"};
    return names;
}

namespace
{
const std::map<std::string, std::string> kSubcommandHelp{
    {"certify", "issue or refuse a subcriticality certificate for a region"},
    {"phi", "evaluate phi on a region over a parameter grid"},
    {"best-bound", "critical roots of phi on balls up to --max-radius"},
    {"simulate-perc", "percolation Monte Carlo: exit, chi, ghost"},
    {"simulate-ising", "Ising Monte Carlo: magnetization, susceptibility, two_point"},
    {"verify", "exact inequality checks on small regions"},
    {"current-lab", "random-current sums, switching and backbones on a tiny graph"},
    {"report", "merge run manifests into a summary"},
};
} // namespace

Json to_json(const RunConfig& c)
{
    Json j;
    j["subcommand"] = c.subcommand;
    j["lattice"] = to_json(c.lattice);
    j["model"] = c.model == Model::ising ? "ising" : "perc";
    j["params"] = c.params;
    j["h"] = c.h;
    j["n"] = c.n;
    j["ball"] = c.ball ? Json(*c.ball) : Json(nullptr);
    j["region"] = c.region ? *c.region : Json(nullptr);
    j["samples"] = c.samples;
    j["sweeps"] = c.sweeps;
    j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
    j["boundary"] = to_string(c.boundary);
    j["observables"] = c.observables;
    j["max_radius"] = c.max_radius;
    j["tol"] = c.tol;
    j["check"] = c.check;
    j["scenario"] = c.scenario ? *c.scenario : Json(nullptr);
    j["inputs"] = c.inputs;
    j["allow_monte_carlo"] = c.allow_monte_carlo;
    j["out"] = c.out;
    return j;
}

namespace
{
const std::set<std::string> kChecks{"perc-diff", "bk", "ising-diff", "simon", "ghs", "all"};

void validate(const RunConfig& c)
{
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
        throw ConfigError("config.subcommand", "unknown subcommand '" + c.subcommand + "'");
    if (!kChecks.contains(c.check))
        throw ConfigError("config.check", "unknown check '" + c.check + "'");
    for (std::size_t i = 0; i < c.n.size(); ++i)
        if (c.n[i] < 0)
            throw ConfigError("config.n[" + std::to_string(i) + "]", "box radius must be nonnegative");
    if (c.ball && *c.ball < 0)
        throw ConfigError("config.ball", "ball radius must be nonnegative");
    if (c.max_radius < 0)
        throw ConfigError("config.max_radius", "must be nonnegative");
    if (!(c.tol > 0.0))
        throw ConfigError("config.tol", "must be positive");
    for (std::size_t i = 0; i < c.h.size(); ++i)
        if (!(c.h[i] >= 0.0) || !std::isfinite(c.h[i]))
            throw ConfigError("config.h[" + std::to_string(i) + "]", "field must be finite and nonnegative");
}
} // namespace

RunConfig config_from_json(const Json& j)
{
    const std::string p = "config";
    if (!j.is_object())
        throw ConfigError(p, "config must be a JSON object");
    static const std::set<std::string> known{"subcommand", "lattice",  "model",      "params",    "h",
                                             "n",          "ball",     "region",     "samples",   "sweeps",
                                             "seed",       "boundary", "observables", "max_radius", "tol",
                                             "check",      "scenario", "inputs",     "allow_monte_carlo", "out"};
    for (const auto& item : j.items())
        if (!known.contains(item.key()))
            throw ConfigError(p + "." + item.key(), "unknown field");
    RunConfig c;
    c.subcommand = get_field_or<std::string>(j, "subcommand", p, "");
    if (j.contains("lattice") && !j["lattice"].is_null())
        c.lattice = lattice_from_json(j["lattice"], p + ".lattice");
    try
    {
        c.model = parse_model(get_field_or<std::string>(j, "model", p, "perc"));
        c.boundary = parse_boundary(get_field_or<std::string>(j, "boundary", p, "plus"));
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError(p, e.what());
    }
    c.params = get_field_or<std::vector<double>>(j, "params", p, {});
    c.h = get_field_or<std::vector<double>>(j, "h", p, {0.0});
    c.n = get_field_or<std::vector<int>>(j, "n", p, {16});
    if (j.contains("ball") && !j["ball"].is_null())
        c.ball = get_field<int>(j, "ball", p);
    if (j.contains("region") && !j["region"].is_null())
    {
        region_from_json(c.lattice, j["region"], p + ".region");
        c.region = j["region"];
    }
    c.samples = get_field_or<std::uint64_t>(j, "samples", p, c.samples);
    c.sweeps = get_field_or<std::uint64_t>(j, "sweeps", p, c.sweeps);
    if (j.contains("seed") && !j["seed"].is_null())
        c.seed = get_field<std::uint64_t>(j, "seed", p);
    c.observables = get_field_or<std::vector<std::string>>(j, "observables", p, {});
    c.max_radius = get_field_or<int>(j, "max_radius", p, c.max_radius);
    c.tol = get_field_or<double>(j, "tol", p, c.tol);
    c.check = get_field_or<std::string>(j, "check", p, c.check);
    if (j.contains("scenario") && !j["scenario"].is_null())
        c.scenario = j["scenario"];
    c.inputs = get_field_or<std::vector<std::string>>(j, "inputs", p, {});
    c.allow_monte_carlo = get_field_or<bool>(j, "allow_monte_carlo", p, true);
    c.out = get_field_or<std::string>(j, "out", p, ".");
    validate(c);
    return c;
}

std::string config_hash(const RunConfig& config)
{
    const std::string text = to_json(config).dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    static const char* digits = "0123456789abcdef";
    for (unsigned int i = 0; i < len; ++i)
    {
        hex.push_back(digits[digest[i] >> 4]);
        hex.push_back(digits[digest[i] & 15]);
    }
    return hex;
}

namespace
{
struct HelpRequested
{
    explicit HelpRequested(std::string t) : text(std::move(t)) {}
    std::string text;
};

Lattice lattice_from_flag(const std::string& text, const std::string& mode)
{
    const ParamMode m = parse_mode(mode);
    if (text.ends_with(".json"))
    {
        Json j = read_json_file(text);
        if (!j.contains("mode"))
            j["mode"] = mode;
        return lattice_from_json(j, text);
    }
    if (text == "square")
        return Lattice::square(m);
    if (text == "triangular")
        return Lattice::triangular(m);
    if (text.starts_with("hypercubic"))
    {
        const std::string rest = text.substr(std::string("hypercubic").size());
        const std::string digits = rest.starts_with(":") ? rest.substr(1) : rest;
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
            throw ConfigError("--lattice", "expected hypercubic:<dimension>");
        return Lattice::hypercubic(std::stoi(digits), m);
    }
    throw ConfigError("--lattice", "unknown lattice '" + text + "' (square, triangular, hypercubic:<d> or a .json file)");
}
} // namespace

RunConfig parse_command_line(int argc, const char* const* argv)
{
    CLI::App app{"phase transition certificates and checks", "phasecert"};
    app.require_subcommand(1, 1);

    std::string config_file, lattice = "square", mode = "p", model, boundary, check, scenario, region_file, out;
    std::vector<double> params, h;
    std::vector<int> n;
    int ball = 0, max_radius = 0;
    std::uint64_t samples = 0, sweeps = 0, seed = 0;
    double tol = 0.0;
    std::vector<std::string> observables, inputs;
    bool exact_only = false;

    struct Flags
    {
        CLI::Option *config, *lattice, *mode, *model, *params, *h, *n, *ball, *region, *samples, *sweeps, *seed,
            *boundary, *observables, *max_radius, *tol, *check, *scenario, *inputs, *exact_only, *out;
    };
    std::map<std::string, Flags> flags;
    for (const auto& name : subcommands())
    {
        CLI::App* sub = app.add_subcommand(name, kSubcommandHelp.at(name));
        sub->set_help_flag("--help", "print the options of this subcommand");
        Flags f;
        f.config = sub->add_option("--config", config_file, "JSON run config; flags given here override it");
        f.lattice = sub->add_option("--lattice", lattice, "square, triangular, hypercubic:<d> or a .json table");
        f.mode = sub->add_option("--mode", mode, "p or beta");
        f.model = sub->add_option("--model", model, "perc or ising");
        f.params = sub->add_option("--param", params, "parameter value(s)");
        f.h = sub->add_option("--h", h, "ghost field value(s)");
        f.n = sub->add_option("--n", n, "box radius/radii");
        f.ball = sub->add_option("--ball", ball, "region = ball of this radius");
        f.region = sub->add_option("--region", region_file, "region as a JSON vertex list");
        f.samples = sub->add_option("--samples", samples, "percolation samples");
        f.sweeps = sub->add_option("--sweeps", sweeps, "Ising measurement sweeps");
        f.seed = sub->add_option("--seed", seed, "RNG seed");
        f.boundary = sub->add_option("--boundary", boundary, "free or plus");
        f.observables = sub->add_option("--observable", observables, "observable(s) to estimate");
        f.max_radius = sub->add_option("--max-radius", max_radius, "largest ball for best-bound");
        f.tol = sub->add_option("--tol", tol, "root tolerance");
        f.check = sub->add_option("--check", check, "perc-diff, bk, ising-diff, simon, ghs or all");
        f.scenario = sub->add_option("--scenario", scenario, "current-lab scenario JSON");
        f.inputs = sub->add_option("--input", inputs, "manifests to merge");
        f.exact_only = sub->add_flag("--exact-only", exact_only, "refuse Monte Carlo fallback");
        f.out = sub->add_option("--out", out, "output directory");
        flags.emplace(name, f);
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        if (e.get_exit_code() != 0)
            throw ConfigError("argv", e.what());
        std::ostringstream text;
        app.exit(e, text, text);
        throw HelpRequested(text.str());
    }
    const std::string name = app.get_subcommands().front()->get_name();
    const Flags& f = flags.at(name);

    RunConfig c;
    if (f.config->count())
    {
        Json j = read_json_file(config_file);
        if (j.is_object() && !j.contains("subcommand"))
            j["subcommand"] = name;
        c = config_from_json(j);
        if (c.subcommand != name)
            throw ConfigError("config.subcommand", "config is for '" + c.subcommand + "', not '" + name + "'");
    }
    c.subcommand = name;
    try
    {
        if (f.lattice->count() || f.mode->count())
        {
            const std::string m = f.mode->count() ? mode : to_string(c.lattice.mode());
            c.lattice = f.lattice->count() ? lattice_from_flag(lattice, m) : c.lattice.with_mode(parse_mode(m));
        }
        if (f.model->count())
            c.model = parse_model(model);
        if (f.boundary->count())
            c.boundary = parse_boundary(boundary);
    }
    catch (const InvalidArgument& e)
    {
        throw ConfigError("argv", e.what());
    }
    if (f.params->count())
        c.params = params;
    if (f.h->count())
        c.h = h;
    if (f.n->count())
        c.n = n;
    if (f.ball->count())
        c.ball = ball;
    if (f.region->count())
    {
        c.region = read_json_file(region_file);
        region_from_json(c.lattice, *c.region, region_file);
    }
    if (f.samples->count())
        c.samples = samples;
    if (f.sweeps->count())
        c.sweeps = sweeps;
    if (f.seed->count())
        c.seed = seed;
    if (f.observables->count())
        c.observables = observables;
    if (f.max_radius->count())
        c.max_radius = max_radius;
    if (f.tol->count())
        c.tol = tol;
    if (f.check->count())
        c.check = check;
    if (f.scenario->count())
        c.scenario = read_json_file(scenario);
    if (f.inputs->count())
        c.inputs = inputs;
    if (f.exact_only->count())
        c.allow_monte_carlo = false;
    if (f.out->count())
        c.out = out;
    validate(c);
    return c;
}

namespace
{
std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
    {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + "\"";
}

class Csv
{
  public:
    explicit Csv(std::vector<std::string> header) { row(header); }

    void row(const std::vector<std::string>& fields)
    {
        for (std::size_t i = 0; i < fields.size(); ++i)
            text_ << (i ? "," : "") << csv_field(fields[i]);
        text_ << '\n';
    }
    std::string str() const { return text_.str(); }

  private:
    std::ostringstream text_;
};

std::string num(double x)
{
    return format_double(x);
}

std::string num(std::uint64_t x)
{
    return std::to_string(x);
}

struct Artifact
{
    std::string kind;
    std::string file;
};

struct Context
{
    RunConfig config;
    fs::path dir;
    std::vector<Artifact> artifacts;
    std::ostream& out;
    std::ostream& err;

    void write(const std::string& file, const std::string& kind, const std::string& text)
    {
        std::ofstream f(dir / file, std::ios::binary);
        if (!f)
            throw Error("cannot write " + (dir / file).string());
        f << text;
        artifacts.push_back({kind, file});
    }
};

std::uint64_t seed_of(const RunConfig& c)
{
    return c.seed.value_or(1);
}

Region region_of(const RunConfig& c)
{
    if (c.region)
        return region_from_json(c.lattice, *c.region, "config.region");
    return ball(c.lattice, c.ball.value_or(1));
}

PhiOptions phi_options(const RunConfig& c)
{
    PhiOptions o;
    o.allow_monte_carlo = c.allow_monte_carlo;
    o.mc_samples = c.samples;
    o.mc_sweeps = c.sweeps;
    o.seed = seed_of(c);
    return o;
}

std::vector<double> params_or_fail(const RunConfig& c)
{
    if (c.params.empty())
        throw ConfigError("config.params", "at least one --param is required");
    return c.params;
}

int cmd_phi(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const Region region = region_of(c);
    Csv csv({"model", "param", "region", "value", "upper_confidence", "method", "std_error", "samples", "seed"});
    for (double param : params_or_fail(c))
    {
        const PhiResult r = phi(c.model, c.lattice, region, param, phi_options(c));
        const bool mc = r.method == PhiMethod::monte_carlo;
        csv.row({to_string(c.model), num(param), region.descriptor(), num(r.value), num(r.upper_confidence),
                 to_string(r.method), mc ? num(r.std_error) : "", mc ? num(r.samples) : "", mc ? num(r.seed) : ""});
        ctx.out << to_string(c.model) << " param=" << num(param) << " " << region.descriptor()
                << " phi=" << num(r.value) << " upper=" << num(r.upper_confidence) << " (" << to_string(r.method)
                << ")\n";
    }
    ctx.write("phi.csv", "csv", csv.str());
    return kExitOk;
}

int cmd_certify(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const Region region = region_of(c);
    Json records = Json::array();
    Csv csv({"model", "param", "region", "phi", "upper_confidence", "method", "verdict"});
    bool refused = false;
    const auto stamp = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char when[32];
    std::strftime(when, sizeof when, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&stamp));
    for (double param : params_or_fail(c))
    {
        const CertifyOutcome outcome = certify_subcritical(c.model, c.lattice, region, param, phi_options(c));
        Json rec = std::visit([](const auto& o) { return to_json(o); }, outcome);
        rec["timestamp"] = when;
        rec["seed"] = seed_of(c);
        const PhiResult& r = std::visit([](const auto& o) -> const PhiResult& { return o.phi; }, outcome);
        const bool ok = std::holds_alternative<Certificate>(outcome);
        refused = refused || !ok;
        csv.row({to_string(c.model), num(param), region.descriptor(), num(r.value), num(r.upper_confidence),
                 to_string(r.method), ok ? "certificate" : "refusal"});
        records.push_back(rec);
        ctx.out << (ok ? "certificate: " : "refusal: ") << to_string(c.model) << " param=" << num(param) << " "
                << region.descriptor() << " phi=" << num(r.value) << " upper=" << num(r.upper_confidence) << "\n";
    }
    ctx.write("certify.json", "json", records.dump(2) + "\n");
    ctx.write("certify.csv", "csv", csv.str());
    return refused ? kExitRefusal : kExitOk;
}

int cmd_best_bound(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const BestBound b = best_bound(c.model, c.lattice, c.max_radius, c.tol, phi_options(c));
    Csv csv({"model", "radius", "region", "size", "root", "method", "iterations", "note"});
    for (const auto& row : b.table)
    {
        csv.row({to_string(c.model), std::to_string(row.radius), row.region_id, std::to_string(row.size),
                 row.root ? num(row.root->param) : "", row.root ? to_string(row.root->method) : "",
                 row.root ? std::to_string(row.root->iterations) : "", row.note});
        ctx.out << "radius " << row.radius << " (" << row.size << " sites): "
                << (row.root ? num(row.root->param) : "no root") << (row.note.empty() ? "" : "  " + row.note)
                << "\n";
    }
    if (b.best_exact)
        ctx.out << "best exact bound: " << num(b.table[*b.best_exact].root->param) << " <= critical point\n";
    ctx.write("best_bound.csv", "csv", csv.str());
    return kExitOk;
}

const std::vector<std::string> kSimHeader{"observable", "n", "param", "h", "mean", "stderr", "samples", "seed"};

std::vector<std::string> sim_row(const MCEstimate& e, const std::string& observable, int n, double param, double h)
{
    return {observable, std::to_string(n), num(param), num(h), num(e.mean), num(e.std_error), num(e.samples),
            num(e.seed)};
}

int cmd_simulate_perc(Context& ctx)
{
    const RunConfig& c = ctx.config;
    std::vector<std::string> obs = c.observables;
    const bool any_field = std::any_of(c.h.begin(), c.h.end(), [](double v) { return v > 0.0; });
    if (obs.empty())
        obs = any_field ? std::vector<std::string>{"ghost"} : std::vector<std::string>{"exit", "chi"};
    Csv csv(kSimHeader);
    for (int n : c.n)
        for (double param : params_or_fail(c))
            for (const auto& o : obs)
            {
                if (o == "exit")
                    csv.row(sim_row(estimate_exit(c.lattice, n, param, c.samples, seed_of(c)), o, n, param, 0.0));
                else if (o == "chi")
                    csv.row(sim_row(estimate_susceptibility(c.lattice, n, param, c.samples, seed_of(c)), o, n,
                                    param, 0.0));
                else if (o == "ghost")
                {
                    for (double h : c.h)
                        if (h > 0.0)
                            csv.row(sim_row(
                                estimate_ghost_magnetization(c.lattice, n, param, h, c.samples, seed_of(c)), o, n,
                                param, h));
                }
                else
                    throw ConfigError("config.observables", "unknown percolation observable '" + o +
                                                                "' (exit, chi, ghost)");
            }
    ctx.out << csv.str();
    ctx.write("simulate_perc.csv", "csv", csv.str());
    return kExitOk;
}

int cmd_simulate_ising(Context& ctx)
{
    const RunConfig& c = ctx.config;
    std::vector<std::string> obs = c.observables.empty() ? std::vector<std::string>{"magnetization"} : c.observables;
    Csv csv(kSimHeader);
    for (int n : c.n)
        for (double beta : params_or_fail(c))
            for (const auto& o : obs)
            {
                if (o == "magnetization")
                {
                    for (double h : c.h)
                        csv.row(sim_row(
                            estimate_magnetization(c.lattice, n, beta, c.boundary, c.sweeps, seed_of(c), h), o, n,
                            beta, h));
                }
                else if (o == "susceptibility")
                    csv.row(sim_row(
                        estimate_ising_susceptibility(c.lattice, n, beta, c.boundary, c.sweeps, seed_of(c)), o, n,
                        beta, 0.0));
                else if (o == "two_point")
                {
                    for (const auto& tp : estimate_two_point(c.lattice, n, beta, c.boundary, c.sweeps, seed_of(c)))
                        csv.row(sim_row(tp.estimate, "two_point_r" + std::to_string(tp.distance), n, beta, 0.0));
                }
                else
                    throw ConfigError("config.observables", "unknown Ising observable '" + o +
                                                                "' (magnetization, susceptibility, two_point)");
            }
    ctx.out << csv.str();
    ctx.write("simulate_ising.csv", "csv", csv.str());
    return kExitOk;
}

std::vector<double> grid_or(const RunConfig& c, std::vector<double> fallback)
{
    return c.params.empty() ? fallback : c.params;
}

double first_field(const RunConfig& c, double fallback)
{
    for (double h : c.h)
        if (h > 0.0)
            return h;
    return fallback;
}

int cmd_verify(Context& ctx)
{
    const RunConfig& c = ctx.config;
    const int n = c.ball.value_or(1);
    const bool all = c.check == "all";
    std::vector<InequalityReport> reports;
    if (all || c.check == "perc-diff")
    {
        std::vector<double> grid = c.lattice.mode() == ParamMode::p
                                       ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}
                                       : std::vector<double>{0.1, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0};
        reports.push_back(check_perc_differential(c.lattice, n, grid_or(c, grid)));
    }
    if (all || c.check == "bk")
    {
        const std::vector<double> grid = c.lattice.mode() == ParamMode::p ? std::vector<double>{0.2, 0.5, 0.8}
                                                                           : std::vector<double>{0.2, 0.7, 1.6};
        for (const auto& s : bk_scenarios(c.lattice))
        {
            InequalityReport r = check_bk_decomposition(c.lattice, s.S, s.A, s.B, s.u, grid_or(c, grid));
            r.name = "bk:" + s.name;
            reports.push_back(r);
        }
    }
    const std::vector<double> beta8{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
    if (all || c.check == "ising-diff")
    {
        const double h = first_field(c, 0.1);
        reports.push_back(check_ising_differential(c.lattice, n, grid_or(c, beta8), h));
        reports.push_back(check_ising_differential_finite_volume(c.lattice, n, grid_or(c, beta8), h));
    }
    if (all || c.check == "simon")
    {
        const SimonInstance s = simon_instance(c.lattice);
        const double h = c.h.empty() ? 0.0 : c.h.front();
        reports.push_back(check_modified_simon(c.lattice, s.Lambda, s.S, s.z, grid_or(c, {0.2, 0.3, 0.4}), h));
    }
    if (all || c.check == "ghs")
    {
        std::vector<double> hs;
        for (double h : c.h)
            if (h > 0.0)
                hs.push_back(h);
        if (hs.empty())
            hs = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
        reports.push_back(check_ghs_differential(c.lattice, n, grid_or(c, {0.2, 0.4}), hs));
    }
    Json doc = Json::array();
    Csv csv({"check", "point", "lhs", "rhs", "margin", "pass"});
    for (const auto& r : reports)
    {
        doc.push_back(to_json(r));
        for (std::size_t i = 0; i < r.lhs.size(); ++i)
        {
            std::string at;
            for (std::size_t k = 0; k < r.grid[i].size(); ++k)
                at += (k ? " " : "") + r.axes[k] + "=" + num(r.grid[i][k]);
            csv.row({r.name, at, num(r.lhs[i]), num(r.rhs[i]), num(r.margins[i]), r.margins[i] >= -r.tolerance ? "1" : "0"});
        }
        ctx.out << r.name << ": " << (r.in_scope ? (r.pass ? "pass" : "FAIL") : "out of scope")
                << " (min margin " << num(r.min_margin) << ", tolerance " << num(r.tolerance) << ")"
                << (r.note.empty() ? "" : "  " + r.note) << "\n";
    }
    ctx.write("verify.json", "json", doc.dump(2) + "\n");
    ctx.write("verify.csv", "csv", csv.str());
    return kExitOk;
}

int vertex_index(const Json& v, const CurrentGraph& g, const std::string& path)
{
    if (v.is_string() && v.get<std::string>() == "g")
    {
        if (!g.has_ghost())
            throw ConfigError(path, "the scenario graph has no ghost");
        return g.ghost();
    }
    if (!v.is_number_integer())
        throw ConfigError(path, "vertex must be a site index or \"g\"");
    const int i = v.get<int>();
    if (i < 0 || i > g.ghost() || (i == g.ghost() && !g.has_ghost()))
        throw ConfigError(path, "vertex index out of range");
    return i;
}

std::vector<int> vertex_list(const Json& j, const std::string& key, const CurrentGraph& g, const std::string& path)
{
    std::vector<int> out;
    if (!j.contains(key))
        return out;
    if (!j[key].is_array())
        throw ConfigError(path + "." + key, "expected an array");
    for (std::size_t i = 0; i < j[key].size(); ++i)
        out.push_back(vertex_index(j[key][i], g, path + "." + key + "[" + std::to_string(i) + "]"));
    return out;
}

Json path_json(const std::vector<OrientedEdge>& path, const CurrentGraph& g)
{
    Json steps = Json::array();
    for (const auto& e : path)
    {
        auto label = [&](int v) { return v == g.ghost() ? Json("g") : Json(v); };
        steps.push_back({label(e.from), label(e.to)});
    }
    return steps;
}

int cmd_current_lab(Context& ctx)
{
    const RunConfig& c = ctx.config;
    if (!c.scenario)
        throw ConfigError("config.scenario", "current-lab needs --scenario");
    const Json& s = *c.scenario;
    const std::string p = "scenario";
    if (!s.contains("graph") || !s["graph"].is_object())
        throw ConfigError(p + ".graph", "missing required field");
    const Json& gj = s["graph"];
    const bool with_ghost = get_field_or<bool>(gj, "ghost", p + ".graph", false);
    CurrentGraph graph = [&] {
        try
        {
            if (gj.contains("ball"))
                return CurrentGraph::from_region(ball(c.lattice, get_field<int>(gj, "ball", p + ".graph")), with_ghost);
            if (!gj.contains("sites") || !gj["sites"].is_array())
                throw ConfigError(p + ".graph.sites", "expected a vertex list or \"ball\"");
            std::vector<VertexId> sites;
            for (std::size_t i = 0; i < gj["sites"].size(); ++i)
                sites.push_back(vertex_from_json(gj["sites"][i], p + ".graph.sites[" + std::to_string(i) + "]"));
            std::vector<CurrentGraph::Pair> edges;
            for (std::size_t i = 0; gj.contains("edges") && i < gj["edges"].size(); ++i)
            {
                const std::string ep = p + ".graph.edges[" + std::to_string(i) + "]";
                const Json& e = gj["edges"][i];
                edges.push_back({get_field<int>(e, "a", ep), get_field<int>(e, "b", ep),
                                 get_field_or<double>(e, "J", ep, 1.0)});
            }
            return CurrentGraph::custom(std::move(sites), std::move(edges), with_ghost);
        }
        catch (const InvalidArgument& e)
        {
            throw ConfigError(p + ".graph", e.what());
        }
    }();
    const double beta = get_field<double>(s, "beta", p);
    const double h = get_field_or<double>(s, "h", p, 0.0);
    const int N = get_field_or<int>(s, "truncation", p, 8);
    if (N < 0)
        throw ConfigError(p + ".truncation", "must be nonnegative");

    Json result;
    result["sites"] = graph.site_count();
    result["ghost"] = graph.has_ghost();
    result["beta"] = beta;
    result["h"] = h;
    result["truncation"] = N;
    const std::vector<int> A = vertex_list(s, "sources", graph, p);
    result["source_sum"] = source_sum(graph, A, beta, h, N);
    {
        const std::vector<int> none;
        const double z = source_sum(graph, none, beta, h, N);
        result["sourceless_sum"] = z;
        std::vector<int> spins;
        for (int v : A)
            if (v != graph.ghost())
                spins.push_back(v);
        result["expectation"] = expectation_via_currents(graph, spins, beta, h, N);
    }
    ctx.out << "source sum " << num(result["source_sum"].get<double>()) << ", expectation "
            << num(result["expectation"].get<double>()) << "\n";
    if (s.contains("switching"))
    {
        const Json& sw = s["switching"];
        const std::string sp = p + ".switching";
        const std::vector<int> SA = vertex_list(sw, "A", graph, sp);
        if (!sw.contains("u") || !sw.contains("v"))
            throw ConfigError(sp, "needs u and v");
        const int u = vertex_index(sw["u"], graph, sp + ".u");
        const int v = vertex_index(sw["v"], graph, sp + ".v");
        FSelector sel;
        try
        {
            sel = FSelector::parse(get_field_or<std::string>(sw, "F", sp, "one"));
        }
        catch (const InvalidArgument& e)
        {
            throw ConfigError(sp + ".F", e.what());
        }
        const SwitchingResult r = switching_check(graph, SA, u, v, sel.functional(), beta, h, N);
        result["switching"] = {{"F", sel.to_string()},
                               {"lhs", r.lhs},
                               {"rhs", r.rhs},
                               {"relative_discrepancy", r.relative_discrepancy()}};
        ctx.out << "switching " << sel.to_string() << ": lhs " << num(r.lhs) << ", rhs " << num(r.rhs)
                << ", relative discrepancy " << num(r.relative_discrepancy()) << "\n";
    }
    if (s.contains("backbone"))
    {
        const Json& bb = s["backbone"];
        const std::string bp = p + ".backbone";
        if (!bb.contains("x") || !bb.contains("y"))
            throw ConfigError(bp, "needs x and y");
        const int x = vertex_index(bb["x"], graph, bp + ".x");
        const int y = vertex_index(bb["y"], graph, bp + ".y");
        Json rows = Json::array();
        double total = 0.0;
        for (const auto& w : backbone_decomposition(graph, x, y, beta, h, N))
        {
            rows.push_back({{"path", path_json(w.path, graph)}, {"rho", w.rho}});
            total += w.rho;
        }
        result["backbone"] = {{"paths", rows}, {"total", total}};
        ctx.out << "backbone decomposition: " << rows.size() << " paths, total rho " << num(total) << "\n";
    }
    ctx.write("current_lab.json", "json", result.dump(2) + "\n");
    return kExitOk;
}

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty())
            lines.push_back(line);
    return lines;
}

int cmd_report(Context& ctx)
{
    const RunConfig& c = ctx.config;
    struct Section
    {
        std::string header;
        std::vector<std::string> rows;
        std::size_t runs = 0;
    };
    std::map<std::string, std::map<std::string, Section>> by_model;
    std::set<std::string> seen;
    for (const auto& input : c.inputs)
    {
        const Json m = read_json_file(input);
        const std::string hash = get_field<std::string>(m, "config_hash", input);
        if (!seen.insert(hash).second)
            continue;
        const std::string sub = get_field<std::string>(m, "subcommand", input);
        const std::string model = get_field_or<std::string>(m, "model", input, "none");
        if (!m.contains("artifacts") || !m["artifacts"].is_array())
            throw ConfigError(input + ".artifacts", "missing artifact list");
        for (std::size_t i = 0; i < m["artifacts"].size(); ++i)
        {
            const Json& a = m["artifacts"][i];
            const std::string ap = input + ".artifacts[" + std::to_string(i) + "]";
            if (get_field<std::string>(a, "kind", ap) != "csv")
                continue;
            const fs::path file = fs::path(input).parent_path() / get_field<std::string>(a, "path", ap);
            std::ifstream f(file, std::ios::binary);
            if (!f)
                throw ConfigError(ap, "missing artifact " + file.string());
            std::stringstream buf;
            buf << f.rdbuf();
            const auto lines = split_lines(buf.str());
            if (lines.empty())
                continue;
            const std::string key = sub + ":" + fs::path(file).filename().string();
            Section& sec = by_model[model][key];
            if (sec.header.empty())
                sec.header = "config_hash," + lines.front();
            else if (sec.header != "config_hash," + lines.front())
                throw ConfigError(ap, "artifact columns differ from earlier runs of " + key);
            for (std::size_t k = 1; k < lines.size(); ++k)
                sec.rows.push_back(hash + "," + lines[k]);
            ++sec.runs;
        }
    }
    std::ostringstream consolidated, summary;
    summary << "report over " << seen.size() << " run(s)\n";
    for (const auto& [model, sections] : by_model)
    {
        summary << "\n[" << model << "]\n";
        for (const auto& [key, sec] : sections)
        {
            consolidated << "# " << model << " " << key << "\n" << sec.header << "\n";
            for (const auto& r : sec.rows)
                consolidated << r << "\n";
            summary << "  " << key << ": " << sec.rows.size() << " row(s) from " << sec.runs << " run(s)\n";
        }
    }
    ctx.out << summary.str();
    ctx.write("report.csv", "report", consolidated.str());
    ctx.write("report.txt", "summary", summary.str());
    return kExitOk;
}

bool stochastic(const std::string& sub)
{
    return sub != "verify" && sub != "current-lab" && sub != "report";
}
} // namespace

int run(RunConfig config, std::ostream& out, std::ostream& err)
{
    validate(config);
    if (stochastic(config.subcommand) && !config.seed)
    {
        config.seed = std::random_device{}();
        err << "no --seed given; using generated seed " << *config.seed << "\n";
    }
    const auto start = std::chrono::steady_clock::now();
    Context ctx{config, fs::path(config.out), {}, out, err};
    fs::create_directories(ctx.dir);
    int code = kExitOk;
    const std::string& sub = config.subcommand;
    if (sub == "phi")
        code = cmd_phi(ctx);
    else if (sub == "certify")
        code = cmd_certify(ctx);
    else if (sub == "best-bound")
        code = cmd_best_bound(ctx);
    else if (sub == "simulate-perc")
        code = cmd_simulate_perc(ctx);
    else if (sub == "simulate-ising")
        code = cmd_simulate_ising(ctx);
    else if (sub == "verify")
        code = cmd_verify(ctx);
    else if (sub == "current-lab")
        code = cmd_current_lab(ctx);
    else
        code = cmd_report(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json manifest;
    manifest["tool"] = "phasecert";
    manifest["version"] = PHASECERT_VERSION;
    manifest["compiler"] = __VERSION__;
    manifest["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    manifest["subcommand"] = sub;
    manifest["model"] = sub == "report" ? "none"
                        : (sub == "simulate-ising")   ? "ising"
                        : (sub == "simulate-perc")    ? "perc"
                                                      : (config.model == Model::ising ? "ising" : "perc");
    manifest["config"] = to_json(config);
    manifest["config_hash"] = config_hash(config);
    manifest["seeds"] = config.seed ? Json::array({*config.seed}) : Json::array();
    manifest["wall_time_s"] = wall;
    manifest["exit_code"] = code;
    Json arts = Json::array();
    for (const auto& a : ctx.artifacts)
        arts.push_back({{"kind", a.kind}, {"path", a.file}});
    manifest["artifacts"] = arts;
    std::ofstream(ctx.dir / (sub + ".manifest.json")) << manifest.dump(2) << "\n";
    return code;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    try
    {
        return run(parse_command_line(argc, argv), out, err);
    }
    catch (const HelpRequested& help)
    {
        out << help.text;
        return kExitOk;
    }
    catch (const ConfigError& e)
    {
        err << "config error at " << e.what() << "\n";
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
    }
    return kExitError;
}

} // namespace phasecert
