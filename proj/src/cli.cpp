#include "ggbm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ggbm/covariance.hpp"
#include "ggbm/errors.hpp"
#include "ggbm/gibbs.hpp"
#include "ggbm/grid.hpp"
#include "ggbm/sampler.hpp"
#include "ggbm/specfun.hpp"

namespace ggbm::cli {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else {
                return v;
            }
        },
        c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') {
            q += '"';
        }
        q += ch;
    }
    return q + '"';
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) {
            return format_double(*d);
        }
        return *d;
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return *i;
    }
    return std::get<std::string>(c);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? " " : "") + format_double(v[i]);
    }
    return s;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

std::string OutputRecord::command_line() const {
    std::string s = "ggbm " + command;
    for (const auto& [key, value] : params) {
        if (const auto* flag = std::get_if<std::string>(&value); flag && *flag == "true") {
            s += " --" + key;
            continue;
        }
        if (const auto* flag = std::get_if<std::string>(&value); flag && *flag == "false") {
            continue;
        }
        s += " --" + key + " " + cell_text(value);
    }
    return s;
}

void write_csv(const OutputRecord& rec, std::ostream& out) {
    out << "# schema_version=" << rec.schema_version << '\n';
    out << "# command=" << rec.command_line() << '\n';
    if (rec.rng) {
        out << "# rng=" << rec.rng->algorithm << " seed=" << rec.rng->seed << ' ' << rec.rng->streams << '\n';
    }
    for (std::size_t i = 0; i < rec.columns.size(); ++i) {
        out << (i ? "," : "") << csv_field(rec.columns[i]);
    }
    out << "\r\n";
    for (const auto& row : rec.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_field(cell_text(row[i]));
        }
        out << "\r\n";
    }
}

void write_json(const OutputRecord& rec, std::ostream& out) {
    nlohmann::ordered_json j;
    j["schema_version"] = rec.schema_version;
    j["command"] = rec.command;
    j["command_line"] = rec.command_line();
    auto& params = j["params"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : rec.params) {
        params[key] = cell_json(value);
    }
    if (rec.rng) {
        j["rng"] = {{"algorithm", rec.rng->algorithm}, {"seed", rec.rng->seed}, {"streams", rec.rng->streams}};
    }
    j["columns"] = rec.columns;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rec.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) {
            r.push_back(cell_json(c));
        }
        rows.push_back(std::move(r));
    }
    out << j.dump() << '\n';
}

namespace {

struct Options {
    std::string format = "csv";
    std::string out_file;

    std::vector<double> betas;
    double beta = 0.5;
    double alpha = 1.0;
    int d = 1;
    int n = 1;
    double gap = 1.0;
    double x = 0.0;
    double tau = 0.0;
    std::vector<double> y;
    std::string grid;
    bool rezero = false;
    double hurst = 0.5;
    bool unpinned = false;
    int steps = 100;
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    double dt = 1.0;
    std::string suite;
};

// Table of (x, f(x)) over a grid or at one point.
OutputRecord function_table(const std::string& command, const std::string& var, double point, bool has_point,
                            const Options& o, const std::function<double(double)>& f) {
    OutputRecord rec;
    rec.command = command;
    rec.params.emplace_back("beta", o.beta);
    rec.columns = {var, "value"};
    std::vector<double> xs;
    if (!o.grid.empty()) {
        rec.params.emplace_back("grid", o.grid);
        xs = GridSpec::parse(o.grid).points();
    } else if (has_point) {
        rec.params.emplace_back(var, point);
        xs = {point};
    } else {
        throw UsageError("need --" + var + " or --grid");
    }
    for (double x : xs) {
        rec.rows.push_back({x, f(x)});
    }
    return rec;
}

OutputRecord cmd_energy(const Options& o) {
    if (o.betas.empty()) {
        throw UsageError("need at least one --beta");
    }
    OutputRecord rec;
    rec.command = "energy";
    rec.params = {{"beta", join(o.betas)}, {"alpha", o.alpha}, {"d", std::int64_t{o.d}},
                  {"n", std::int64_t{o.n}}, {"gap", o.gap}};
    if (!o.grid.empty()) {
        if (o.d != 1 || o.n != 1) {
            throw UsageError("--grid needs --d 1 --n 1; use --y for other shapes");
        }
        if (!o.y.empty()) {
            throw UsageError("--grid and --y are exclusive");
        }
        rec.params.emplace_back("grid", o.grid);
        rec.params.emplace_back("rezero", o.rezero ? "true" : "false");
        const auto curves = gibbs::figure2_grid(o.betas, o.alpha, o.gap, GridSpec::parse(o.grid), o.rezero);
        rec.columns = {"y"};
        for (double b : curves.betas) {
            rec.columns.push_back("H[beta=" + format_double(b) + "]");
        }
        for (std::size_t i = 0; i < curves.y.size(); ++i) {
            std::vector<Cell> row{curves.y[i]};
            for (const auto& col : curves.energy) {
                row.emplace_back(col[i]);
            }
            rec.rows.push_back(std::move(row));
        }
        return rec;
    }
    if (o.y.empty()) {
        throw UsageError("need --y (d*N values) or --grid");
    }
    if (o.rezero) {
        throw UsageError("--rezero applies to --grid only");
    }
    rec.params.emplace_back("y", join(o.y));
    rec.columns = {"beta", "H"};
    for (double b : o.betas) {
        gibbs::EnergyQuery q{covariance::ModelParams(b, o.alpha, o.d, o.n), o.y, o.gap};
        rec.rows.push_back({b, gibbs::energy(q)});
    }
    return rec;
}

OutputRecord cmd_couplings(const Options& o) {
    if (o.n < 3) {
        throw UsageError("couplings needs --n >= 3");
    }
    OutputRecord rec;
    rec.command = "couplings";
    rec.params = {{"hurst", o.hurst}, {"n", std::int64_t{o.n}}, {"unpinned", o.unpinned ? "true" : "false"}};
    rec.columns = {"index", "offset", "g"};
    Eigen::VectorXd g;
    int center = 0;
    if (o.unpinned) {
        const auto full = covariance::coupling_constants(o.hurst, o.n, false);
        center = static_cast<int>(full.rows()) / 2;
        g = full.row(center).transpose();
    } else {
        g = covariance::coupling_profile(o.hurst, o.n);
        center = (o.n + 1) / 2 - 1;
    }
    for (Eigen::Index j = 0; j < g.size(); ++j) {
        rec.rows.push_back({std::int64_t{j}, std::int64_t{j - center}, g(j)});
    }
    return rec;
}

RngMeta rng_meta(std::uint64_t seed) { return {sampler::kRngAlgorithm, seed, "stream_id=path_id"}; }

OutputRecord cmd_sample(const Options& o) {
    if (o.paths < 1) {
        throw UsageError("--paths must be >= 1");
    }
    OutputRecord rec;
    rec.command = "sample";
    rec.params = {{"beta", o.beta},         {"alpha", o.alpha}, {"d", std::int64_t{o.d}},
                  {"steps", std::int64_t{o.steps}}, {"dt", o.dt}, {"paths", o.paths},
                  {"seed", std::to_string(o.seed)}};
    rec.rng = rng_meta(o.seed);
    rec.columns = {"path_id", "t", "coord", "value"};
    const covariance::ModelParams p(o.beta, o.alpha, o.d, 1);
    const auto paths = sampler::sample_ggbm_paths(p, o.steps, o.dt, static_cast<std::size_t>(o.paths), o.seed);
    for (std::size_t id = 0; id < paths.size(); ++id) {
        const auto& path = paths[id];
        for (std::size_t i = 0; i < path.times.size(); ++i) {
            for (int j = 0; j < o.d; ++j) {
                rec.rows.push_back({static_cast<std::int64_t>(id), path.times[i], std::int64_t{j},
                                    path.values(static_cast<Eigen::Index>(i), j)});
            }
        }
    }
    return rec;
}

OutputRecord cmd_validate(const Options& o, bool& all_pass) {
    if (o.paths < 2) {
        throw UsageError("--paths must be >= 2");
    }
    OutputRecord rec;
    rec.command = "validate";
    rec.params = {{"suite", o.suite}, {"beta", o.beta}, {"alpha", o.alpha}, {"d", std::int64_t{o.d}},
                  {"paths", o.paths}, {"seed", std::to_string(o.seed)}};
    rec.rng = rng_meta(o.seed);
    rec.columns = {"check", "k", "t", "estimate", "reference", "stderr", "z", "pass"};
    const covariance::ModelParams p(o.beta, o.alpha, o.d, 1);
    // Grid 0, 0.5, ..., 2 holds every probe time.
    const auto paths = sampler::sample_ggbm_paths(p, 4, 0.5, static_cast<std::size_t>(o.paths), o.seed);
    all_pass = true;
    auto add = [&](const std::string& check, double k, double t, double est, double ref, double se) {
        const double z = se > 0.0 ? std::abs(est - ref) / se : (est == ref ? 0.0 : INFINITY);
        const bool pass = z <= 3.0;
        all_pass = all_pass && pass;
        rec.rows.push_back({check, k, t, est, ref, se, z, std::string(pass ? "pass" : "fail")});
    };
    if (o.suite == "cf") {
        for (double t : {0.5, 1.0, 2.0}) {
            for (double k : {0.5, 1.0, 2.0}) {
                std::vector<double> kv(static_cast<std::size_t>(o.d), 0.0);
                kv[0] = k;
                const auto e = sampler::mc_char_fn(paths, kv, t);
                const double ref = specfun::mittag_leffler_neg(p.beta, 0.5 * k * k * std::pow(t, o.alpha));
                add("cf", k, t, e.estimate.real(), ref, e.std_error);
            }
        }
    } else {
        for (double t : {1.0, 2.0}) {
            for (int order : {2, 3, 4}) {
                const auto e = sampler::mc_moments(paths, t, order);
                add("moment" + std::to_string(order), 0.0, t, e.estimate, sampler::moment_reference(p, t, order),
                    e.std_error);
            }
            const auto e = sampler::mc_squared_norm(paths, t);
            add("sqnorm", 0.0, t, e.estimate, o.d * std::pow(t, o.alpha) / std::tgamma(1.0 + o.beta), e.std_error);
        }
    }
    return rec;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized grey Brownian motion: special functions, Gibbs energies, sampling"};
    app.name("ggbm");
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", o.out_file, "Write output to FILE instead of stdout");

    auto* mlf = app.add_subcommand("mlf", "Mittag-Leffler E_beta(-x)");
    mlf->add_option("--beta", o.beta)->required();
    auto* mlf_x = mlf->add_option("--x", o.x);
    auto* mlf_grid = mlf->add_option("--grid", o.grid, "min:max:steps");
    mlf_x->excludes(mlf_grid);

    auto* mw = app.add_subcommand("mwright", "M-Wright M_beta(tau)");
    mw->add_option("--beta", o.beta)->required();
    auto* mw_tau = mw->add_option("--tau", o.tau);
    auto* mw_grid = mw->add_option("--grid", o.grid, "min:max:steps");
    mw_tau->excludes(mw_grid);

    auto* en = app.add_subcommand("energy", "Gibbs energy H = -ln rho_N");
    en->add_option("--beta", o.betas, "One or more beta values")->required();
    en->add_option("--alpha", o.alpha)->required();
    en->add_option("--d", o.d);
    en->add_option("--n", o.n);
    en->add_option("--gap", o.gap);
    en->add_option("--y", o.y, "d*N increment values");
    en->add_option("--grid", o.grid, "min:max:steps (d = N = 1)");
    en->add_flag("--rezero", o.rezero, "Subtract H(0)");

    auto* co = app.add_subcommand("couplings", "Coupling constants of the increment chain");
    co->add_option("--hurst", o.hurst)->required();
    co->add_option("--n", o.n)->required();
    co->add_flag("--unpinned", o.unpinned, "Free first bead instead of pinning B(0) = 0");

    auto* sa = app.add_subcommand("sample", "Sample ggBm paths (long-form CSV)");
    sa->add_option("--beta", o.beta)->required();
    sa->add_option("--alpha", o.alpha)->required();
    sa->add_option("--d", o.d);
    sa->add_option("--steps", o.steps);
    sa->add_option("--dt", o.dt);
    sa->add_option("--paths", o.paths)->required();
    sa->add_option("--seed", o.seed)->required();

    auto* va = app.add_subcommand("validate", "Monte Carlo validation suites");
    va->add_option("--suite", o.suite)->required()->check(CLI::IsMember({"cf", "moments"}));
    va->add_option("--beta", o.beta)->required();
    va->add_option("--alpha", o.alpha);
    va->add_option("--d", o.d);
    o.paths = 100000;
    va->add_option("--paths", o.paths);
    o.seed = 20261016;
    va->add_option("--seed", o.seed);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitCode::ok : ExitCode::usage;
    }

    try {
        OutputRecord rec;
        bool all_pass = true;
        if (mlf->parsed()) {
            const specfun::Beta b(o.beta);
            rec = function_table("mlf", "x", o.x, mlf_x->count() > 0, o,
                                 [&](double x) { return specfun::mittag_leffler_neg(b, x); });
        } else if (mw->parsed()) {
            const specfun::Beta b(o.beta);
            rec = function_table("mwright", "tau", o.tau, mw_tau->count() > 0, o,
                                 [&](double t) { return specfun::mwright(b, t); });
        } else if (en->parsed()) {
            rec = cmd_energy(o);
        } else if (co->parsed()) {
            rec = cmd_couplings(o);
        } else if (sa->parsed()) {
            rec = cmd_sample(o);
        } else {
            rec = cmd_validate(o, all_pass);
        }
        rec.params.emplace_back("format", o.format);

        std::ofstream file;
        std::ostream* sink = &out;
        if (!o.out_file.empty()) {
            file.open(o.out_file, std::ios::binary);
            if (!file) {
                err << "error: cannot open " << o.out_file << '\n';
                return ExitCode::usage;
            }
            sink = &file;
        }
        if (o.format == "json") {
            write_json(rec, *sink);
        } else {
            write_csv(rec, *sink);
        }
        if (!all_pass) {
            err << "validation failed\n";
            return ExitCode::validation;
        }
        return ExitCode::ok;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::usage;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::usage;
    } catch (const DimensionMismatch& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return ExitCode::usage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return ExitCode::numerical;
    }
}

}  // namespace ggbm::cli
