#include "ccheis/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccheis/distance.hpp"
#include "ccheis/poisson.hpp"
#include "ccheis/spec_file.hpp"
#include "ccheis/verify.hpp"
#include "ccheis/volume.hpp"

namespace ccheis {

namespace {

using nlohmann::json;

struct Sweep {
    std::string param;
    double start = 0.0, stop = 0.0;
    int count = 1;
    bool log_scale = false;

    std::vector<double> values() const
    {
        std::vector<double> v;
        for (int i = 0; i < count; ++i) {
            const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            v.push_back(log_scale ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                                  : start + f * (stop - start));
        }
        return v;
    }
};

Sweep parse_sweep(const std::string& text)
{
    auto fail = [&](const std::string& why) -> Sweep {
        throw Error(ErrorCode::ParseError, "sweep '" + text + "': " + why);
    };
    const auto eq = text.find('=');
    if (eq == std::string::npos) return fail("expected param=start:stop:count:scale");
    Sweep s;
    s.param = text.substr(0, eq);
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(eq + 1));
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 4) return fail("expected four ':'-separated fields");
    try {
        std::size_t used = 0;
        s.start = std::stod(parts[0], &used);
        if (used != parts[0].size()) return fail("bad start");
        s.stop = std::stod(parts[1], &used);
        if (used != parts[1].size()) return fail("bad stop");
        s.count = std::stoi(parts[2], &used);
        if (used != parts[2].size()) return fail("bad count");
    } catch (const std::logic_error&) {
        return fail("bad number");
    }
    if (parts[3] == "log") s.log_scale = true;
    else if (parts[3] != "lin") return fail("scale must be lin or log");
    if (s.count < 1) return fail("count must be at least 1");
    if (s.log_scale && !(s.start > 0.0 && s.stop > 0.0)) return fail("log scale needs positive bounds");
    return s;
}

std::string spec_hash(const GroupSpec& spec)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : spec.canonical()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

/// One emitted number with its method tag.
struct Record {
    Record(std::string m, std::optional<double> p, double v = 0.0) : method(std::move(m)), param(p), value(v) {}

    std::string method;
    std::optional<double> param;
    double value = 0.0;
    std::optional<double> abs_error, closed_form, ratio;
    json extra = json::object();
};

struct Options {
    std::string spec_path, point, method, sweep, suite = "all", out = "json", beta;
    std::optional<double> r, h, nu;
    double rel_tol = 1e-8, abs_tol = 1e-300, alpha = 1.0;
    long max_evals = 20'000'000, mc_samples = 100'000;
    std::uint64_t seed = 42;
    bool verbose = false;
};

QuadConfig quad_config(const Options& o)
{
    if (!(o.rel_tol > 0.0) || !(o.abs_tol > 0.0)) throw Error(ErrorCode::ParseError, "tolerances must be positive");
    if (o.mc_samples < 1000) throw Error(ErrorCode::ParseError, "--mc-samples must be at least 1000");
    if (o.max_evals < 1) throw Error(ErrorCode::ParseError, "--max-evals must be positive");
    QuadConfig cfg;
    cfg.rel_tol = o.rel_tol;
    cfg.abs_tol = o.abs_tol;
    cfg.max_evals = o.max_evals;
    cfg.mc_samples = o.mc_samples;
    cfg.seed = o.seed;
    return cfg;
}

std::vector<double> parameter_values(const Options& o, const std::string& name, const std::optional<double>& single)
{
    if (!o.sweep.empty()) {
        const Sweep s = parse_sweep(o.sweep);
        if (s.param != name) throw Error(ErrorCode::ParseError, "this command sweeps '" + name + "', not '" + s.param + "'");
        return s.values();
    }
    if (!single) throw Error(ErrorCode::ParseError, "--" + name + " or --sweep is required");
    return {*single};
}

std::vector<VolumeMethod> volume_methods(const std::string& m)
{
    if (m.empty() || m == "quadrature") return {VolumeMethod::ThetaQuadrature};
    if (m == "mc") return {VolumeMethod::MonteCarlo};
    if (m == "both") return {VolumeMethod::ThetaQuadrature, VolumeMethod::MonteCarlo};
    throw Error(ErrorCode::ParseError, "volume method must be quadrature, mc or both");
}

std::string method_name(VolumeMethod m) { return m == VolumeMethod::MonteCarlo ? "monte-carlo" : "theta-quadrature"; }

std::vector<Record> cmd_distance(const Options& o, const GroupSpec& spec, const GroupPoint& g, const QuadConfig& cfg)
{
    std::vector<Record> out;
    const std::string m = o.method.empty() ? "geodesic" : o.method;
    if (m != "geodesic" && m != "sup" && m != "both") throw Error(ErrorCode::ParseError, "distance method must be geodesic, sup or both");
    if (m == "geodesic" || m == "both") {
        const DistanceResult d = distance(spec, g);
        Record r{std::string(to_string(d.method)), std::nullopt, d.d};
        if (d.theta) r.extra["theta"] = std::vector<double>(d.theta->data(), d.theta->data() + d.theta->size());
        out.push_back(r);
    }
    if (m == "sup" || m == "both") out.push_back(Record(std::string(to_string(DistanceMethod::SupFormula)), std::nullopt, distance_sup(spec, g, cfg)));
    out.push_back(Record("homogeneous-norm", std::nullopt, homogeneous_norm(spec, g)));
    return out;
}

std::vector<Record> cmd_volume(const Options& o, const GroupSpec& spec, const QuadConfig& cfg, bool doubling)
{
    std::vector<Record> out;
    for (double R : parameter_values(o, "r", o.r)) {
        for (VolumeMethod vm : volume_methods(o.method)) {
            Record rec{method_name(vm), R};
            if (doubling) {
                const DoublingResult d = doubling_ratio(spec, R, vm, cfg);
                const double q = std::pow(4.0, spec.n() + spec.m());
                rec.value = d.ratio;
                rec.abs_error = d.abs_error;
                rec.closed_form = q;
                rec.ratio = d.ratio / q;
            } else {
                const VolumeResult v = ball_volume(spec, R, vm, cfg);
                const double c = closed_form_estimate(spec, R);
                rec.value = v.value;
                rec.abs_error = v.abs_error;
                rec.closed_form = c;
                rec.ratio = v.value / c;
            }
            out.push_back(rec);
        }
    }
    return out;
}

std::vector<Record> cmd_poisson(const Options& o, const GroupSpec& spec, const GroupPoint& g, const QuadConfig& cfg)
{
    const std::string m = o.method.empty() ? "saddle" : o.method;
    std::vector<std::string> methods;
    if (m == "both") methods = {"saddle", "direct", "shifted"};
    else if (m == "saddle" || m == "direct" || m == "shifted" || m == "heat") methods = {m};
    else throw Error(ErrorCode::ParseError, "poisson method must be saddle, direct, shifted, heat or both");

    std::vector<Record> out;
    for (double h : parameter_values(o, "h", o.h)) {
        for (const auto& name : methods) {
            KernelValue k;
            if (name == "saddle") k = poisson_saddle(spec, g, h);
            else if (name == "direct") k = poisson_direct(spec, g, h, cfg);
            else if (name == "shifted") k = poisson_shifted(spec, g, h, cfg);
            else k = heat_kernel(spec, g, h, cfg);
            Record rec{name == "heat" ? "heat-quadrature" : std::string(to_string(k.method)), h, k.value};
            if (name != "saddle") {
                rec.abs_error = k.est_error;
                rec.extra["evals"] = k.evals;
                rec.extra["imag_ratio"] = k.imag_ratio;
            } else {
                rec.extra["regime_warning"] = k.regime_warning;
            }
            out.push_back(rec);
        }
    }
    return out;
}

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), x);
        if (ec != std::errc() || ptr != p.data() + p.size()) throw Error(ErrorCode::ParseError, "bad number '" + p + "'");
        v.push_back(x);
    }
    return v;
}

std::vector<Record> cmd_moments(const Options& o, const GroupSpec& spec)
{
    std::vector<Record> out;
    if (!o.beta.empty()) {
        const auto beta = parse_list(o.beta);
        if (static_cast<int>(beta.size()) != spec.m()) throw Error(ErrorCode::ParseError, "--beta needs m entries");
        double denom = 1.0;
        for (double b : beta) denom *= std::pow(spec.C_H() + b, o.alpha);
        Record rec{"ball-product-average", o.alpha, ball_average_product(spec, beta, o.alpha)};
        rec.closed_form = denom;
        rec.ratio = rec.value / denom;
        out.push_back(rec);
        return out;
    }
    for (double nu : parameter_values(o, "nu", o.nu ? o.nu : std::optional<double>(2.0))) {
        Record rec{"moment-dnu", nu, moment_dnu(spec, nu)};
        rec.closed_form = std::pow(spec.C_H(), 0.5 * nu);
        rec.ratio = rec.value / *rec.closed_form;
        out.push_back(rec);
    }
    return out;
}

void emit(std::ostream& out, const Options& o, const std::string& command, const GroupSpec& spec,
          const std::optional<GroupPoint>& g, const std::string& param, const std::vector<Record>& records)
{
    if (o.out == "csv") {
        // The first seven columns are fixed; R is empty for commands without a radius.
        out << "spec_hash,R,method,value,abs_error,closed_form,ratio,command,param,param_value\n";
        auto opt = [](const std::optional<double>& v) {
            if (!v) return std::string();
            std::ostringstream os;
            os << std::setprecision(17) << *v;
            return os.str();
        };
        for (const auto& r : records)
            out << spec_hash(spec) << ',' << (param == "r" ? opt(r.param) : "") << ',' << r.method << ','
                << opt(r.value) << ',' << opt(r.abs_error) << ',' << opt(r.closed_form) << ',' << opt(r.ratio) << ','
                << command << ',' << (r.param ? param : "") << ',' << opt(r.param) << '\n';
        return;
    }
    json j;
    j["schema"] = 1;
    j["command"] = command;
    j["spec"] = spec.canonical();
    j["spec_hash"] = spec_hash(spec);
    if (g) j["point"] = format_point(spec, *g);
    j["results"] = json::array();
    for (const auto& r : records) {
        json e = r.extra;
        e["method"] = r.method;
        if (r.param) e[param] = *r.param;
        e[command == "distance" ? "d" : "value"] = r.value;
        e["abs_error"] = r.abs_error ? json(*r.abs_error) : json(nullptr);
        if (r.closed_form) e["closed_form"] = *r.closed_form;
        if (r.ratio) e["ratio"] = *r.ratio;
        j["results"].push_back(e);
    }
    out << j.dump(2) << '\n';
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err)
{
    VerifyOptions vo;
    vo.seed = o.seed;
    std::vector<int> which;
    if (o.suite == "quick") vo.quick = true;
    else if (o.suite != "all")
        for (double v : parse_list(o.suite)) which.push_back(static_cast<int>(v));
    if (o.verbose) vo.log = &err;
    const auto results = run_acceptance(vo, which);
    bool ok = true;
    json j;
    j["schema"] = 1;
    j["command"] = "verify";
    j["seed"] = o.seed;
    j["results"] = json::array();
    for (const auto& r : results) {
        ok = ok && r.pass;
        if (o.out == "json") j["results"].push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        else out << format_result(r) << '\n';
    }
    if (o.out == "json") out << j.dump(2) << '\n';
    return ok ? kExitOk : kExitVerification;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Distances, volumes and kernels on generalized H-type groups"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c, bool point) {
        c->add_option("--spec", o.spec_path, "group spec file (keys: blocks, m, b, u)")->required();
        if (point) c->add_option("--point", o.point, "point \"x1,x2|x3,x4;t1\": ',' within an x block, '|' between blocks, ';' before t")->required();
        c->add_option("--rel-tol", o.rel_tol, "relative quadrature tolerance");
        c->add_option("--abs-tol", o.abs_tol, "absolute quadrature tolerance");
        c->add_option("--max-evals", o.max_evals, "integrand evaluation budget");
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--out", o.out, "output format")->check(CLI::IsMember({"json", "csv"}));
        c->add_option("--sweep", o.sweep, "param=start:stop:count:scale with scale lin or log");
    };
    auto* dist = app.add_subcommand("distance", "CC distance d_B and homogeneous norm d_G of a point");
    common(dist, true);
    dist->add_option("--method", o.method, "geodesic, sup or both");
    auto* vol = app.add_subcommand("volume", "volume of the ball B(o, r)");
    common(vol, false);
    vol->add_option("--r", o.r, "radius");
    vol->add_option("--method", o.method, "quadrature, mc or both");
    vol->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples (at least 1000)");
    auto* dbl = app.add_subcommand("doubling", "|B(o,2r)| / |B(o,r)|");
    common(dbl, false);
    dbl->add_option("--r", o.r, "radius");
    dbl->add_option("--method", o.method, "quadrature, mc or both");
    dbl->add_option("--mc-samples", o.mc_samples, "Monte Carlo samples (at least 1000)");
    auto* poi = app.add_subcommand("poisson", "Poisson kernel P_h(g), or the heat kernel with --method heat");
    // -h would clash with --h.
    poi->set_help_flag("--help", "Print this help message and exit");
    common(poi, true);
    poi->add_option("--h", o.h, "kernel parameter h > 0");
    poi->add_option("--method", o.method, "saddle, direct, shifted, heat or both");
    auto* mom = app.add_subcommand("moments", "ball averages D_nu, or the product average with --beta");
    common(mom, false);
    mom->add_option("--nu", o.nu, "moment order (default 2)");
    mom->add_option("--beta", o.beta, "comma-separated beta_l for the product average");
    mom->add_option("--alpha", o.alpha, "exponent of the product average");
    auto* ver = app.add_subcommand("verify", "run the acceptance suite; exit 3 on any failure");
    ver->add_option("--suite", o.suite, "all, quick, or a comma-separated list of criterion numbers");
    ver->add_option("--seed", o.seed, "random seed");
    ver->add_option("--out", o.out, "output format (csv prints one line per criterion)")->check(CLI::IsMember({"json", "csv"}));
    ver->add_flag("--verbose", o.verbose, "progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (ver->parsed()) return cmd_verify(o, out, err);
        const GroupSpec spec = load_spec(o.spec_path);
        const QuadConfig cfg = quad_config(o);
        std::optional<GroupPoint> g;
        if (!o.point.empty()) g = parse_point(spec, o.point);
        if (dist->parsed()) emit(out, o, "distance", spec, g, "", cmd_distance(o, spec, *g, cfg));
        else if (vol->parsed()) emit(out, o, "volume", spec, g, "r", cmd_volume(o, spec, cfg, false));
        else if (dbl->parsed()) emit(out, o, "doubling", spec, g, "r", cmd_volume(o, spec, cfg, true));
        else if (poi->parsed()) emit(out, o, "poisson", spec, g, "h", cmd_poisson(o, spec, *g, cfg));
        else if (mom->parsed()) emit(out, o, "moments", spec, g, o.beta.empty() ? "nu" : "alpha", cmd_moments(o, spec));
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_numerical() ? kExitNumerical : kExitInput;
    }
    return kExitOk;
}

} // namespace ccheis
