#include "paircorr_cli/cli.hpp"

#include <CLI11.hpp>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>
#endif

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "paircorr/correlation.hpp"
#include "paircorr/dataset.hpp"
#include "paircorr/errors.hpp"
#include "paircorr/fitting.hpp"
#include "paircorr/oracle.hpp"

namespace paircorr::cli {

namespace {

using nlohmann::json;

/// Thrown for flag combinations CLI11 cannot check by itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

GridSpec parse_grid(const std::string& text) {
    const auto a = text.find(':');
    const auto b = a == std::string::npos ? a : text.find(':', a + 1);
    if (b == std::string::npos) {
        throw UsageError("grid must be min:max:count, got '" + text + "'");
    }
    const auto lo = parse_number(std::string_view(text).substr(0, a));
    const auto hi = parse_number(std::string_view(text).substr(a + 1, b - a - 1));
    const auto count = parse_number(std::string_view(text).substr(b + 1));
    if (!lo || !hi || !count || *count < 1 || std::floor(*count) != *count) {
        throw UsageError("grid must be min:max:count, got '" + text + "'");
    }
    if (!(*lo > 0.0) || !(*hi >= *lo) || (*count > 1 && !(*hi > *lo))) {
        throw UsageError("grid needs 0 < min < max (or min = max with count 1)");
    }
    return {*lo, *hi, static_cast<std::size_t>(*count)};
}

std::vector<double> make_grid(const GridSpec& g) {
    return g.count == 1 ? std::vector<double>{g.lo} : linear_grid(g.lo, g.hi, g.count);
}

Momentum3 parse_vector(const std::string& text) {
    std::vector<double> v;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto x = parse_number(std::string_view(text).substr(start, comma - start));
        if (!x) {
            throw UsageError("expected a vector x,y,z, got '" + text + "'");
        }
        v.push_back(*x);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    if (v.size() != 3) {
        throw UsageError("expected a vector x,y,z, got '" + text + "'");
    }
    return {v[0], v[1], v[2]};
}

// Writes through a sibling temporary file so readers never see a partial result.
void write_output(const std::optional<std::string>& path, std::ostream& out,
                  const std::function<void(std::ostream&)>& emit) {
    if (!path) {
        emit(out);
        return;
    }
    const std::filesystem::path target(*path);
    const std::filesystem::path tmp =
        target.string() + ".tmp." + std::to_string(static_cast<long>(::getpid()));
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) {
            throw Error("cannot write '" + tmp.string() + "'");
        }
        emit(f);
        f.flush();
        if (!f) {
            throw Error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move result to '" + target.string() + "': " + ec.message());
    }
}

json params_json(const ModelParams& p) {
    return {{"sigma", p.sigma},
            {"f", p.f},
            {"p_tilde", p.p_tilde},
            {"p_total", {p.p_total.x, p.p_total.y, p.p_total.z}},
            {"n_tot", p.n_tot}};
}

struct Options {
    // model
    double sigma = 1.0;
    double f = 0.0;
    std::optional<double> p_tilde;
    std::string p_total = "0,0,0";
    double n_tot = 1.0;
    std::string uncor_form = "first_principles";
    // shared
    std::string grid;
    std::optional<std::string> output;
    std::string format = "csv";
    std::uint64_t seed = 0x5eed'2007ULL;
    // fit
    std::string data;
    std::vector<std::string> free = {"sigma", "f"};
    std::string p_tilde_mode = "ratio";
    double p_tilde_ratio = 0.1;
    std::string sigma_bounds = "0.001:10";
    std::string f_bounds = "0:1";
    std::string p_tilde_bounds = "0:5";
    std::size_t multistart = 16;
    std::size_t max_iterations = 200;
    // oracle-check
    std::size_t samples = 2'000'000;
    double tol = 1e-3;
    std::string quantity = "both";
    // synth
    double noise = 0.0;
};

UncorrelatedForm uncor_form(const Options& o) {
    return o.uncor_form == "published" ? UncorrelatedForm::published
                                       : UncorrelatedForm::first_principles;
}

ModelParams model_params(const Options& o) {
    ModelParams p;
    p.sigma = o.sigma;
    p.f = o.f;
    p.p_tilde = o.p_tilde.value_or(0.0);
    p.p_total = parse_vector(o.p_total);
    p.n_tot = o.n_tot;
    p.validate();
    return p;
}

Bounds parse_bounds(const std::string& text, const char* name) {
    const auto colon = text.find(':');
    const auto lo = parse_number(std::string_view(text).substr(0, colon));
    const auto hi = colon == std::string::npos
                        ? std::nullopt
                        : parse_number(std::string_view(text).substr(colon + 1));
    if (!lo || !hi) {
        throw UsageError(std::string(name) + " bounds must be lo:hi, got '" + text + "'");
    }
    return {*lo, *hi};
}

int cmd_curve(const Options& o, std::ostream& out) {
    const ModelParams p = model_params(o);
    const auto grid = make_grid(parse_grid(o.grid));
    const CorrelationCurve c = curve(p, grid, uncor_form(o));
    write_output(o.output, out, [&](std::ostream& s) {
        if (o.format == "json") {
            json j{{"params", params_json(p)},
                   {"uncor_form", o.uncor_form},
                   {"delta_p", c.delta_p},
                   {"R", c.r}};
            s << j.dump(2) << '\n';
            return;
        }
        s << "delta_p,R\n";
        for (std::size_t i = 0; i < c.size(); ++i) {
            s << format_number(c.delta_p[i]) << ',' << format_number(c.r[i]) << '\n';
        }
    });
    return ok;
}

json fit_json(const FitResult& r, const Dataset& data, const FitConfig& cfg) {
    std::vector<std::string> free;
    if (cfg.free_sigma) {
        free.emplace_back("sigma");
    }
    if (cfg.free_f) {
        free.emplace_back("f");
    }
    if (cfg.p_tilde_mode == PTildeMode::free) {
        free.emplace_back("p_tilde");
    }
    return {{"sigma", r.params.sigma},
            {"f", r.params.f},
            {"p_tilde", r.params.p_tilde},
            {"approx_error_pct", r.approx_error},
            {"converged", r.converged},
            {"residuals", r.residuals},
            {"iterations", r.iterations},
            {"objective", r.objective},
            {"objective_trace", r.objective_trace},
            {"start_index", r.start_index},
            {"free_parameters", free},
            {"label", data.label},
            {"points", data.size()}};
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
    if (!std::filesystem::is_regular_file(o.data)) {
        throw UsageError("cannot open dataset '" + o.data + "'");
    }
    const Dataset data = read_dataset_file(o.data);
    for (const auto& w : advisory_warnings(data)) {
        err << "warning: " << w << '\n';
    }

    FitConfig cfg;
    cfg.free_sigma = cfg.free_f = false;
    for (const auto& name : o.free) {
        if (name == "sigma") {
            cfg.free_sigma = true;
        } else if (name == "f") {
            cfg.free_f = true;
        } else if (name == "p_tilde") {
            cfg.p_tilde_mode = PTildeMode::free;
        }
    }
    const bool p_tilde_free = cfg.p_tilde_mode == PTildeMode::free;
    if (!p_tilde_free) {
        if (o.p_tilde_mode == "free") {
            throw UsageError("--p-tilde-mode free requires p_tilde in --free");
        }
        cfg.p_tilde_mode = o.p_tilde_mode == "fixed" ? PTildeMode::fixed : PTildeMode::ratio_to_sigma;
        if (cfg.p_tilde_mode == PTildeMode::fixed && !o.p_tilde) {
            throw UsageError("--p-tilde-mode fixed requires --p-tilde");
        }
    }
    cfg.p_tilde_ratio = o.p_tilde_ratio;
    cfg.fixed.sigma = o.sigma;
    cfg.fixed.f = o.f;
    cfg.fixed.p_tilde = o.p_tilde.value_or(0.0);
    cfg.fixed.p_total = parse_vector(o.p_total);
    cfg.sigma_bounds = parse_bounds(o.sigma_bounds, "sigma");
    cfg.f_bounds = parse_bounds(o.f_bounds, "f");
    cfg.p_tilde_bounds = parse_bounds(o.p_tilde_bounds, "p_tilde");
    cfg.multistart_count = o.multistart;
    cfg.max_iterations = o.max_iterations;
    cfg.rng_seed = o.seed;
    cfg.form = uncor_form(o);

    int status = ok;
    FitResult result;
    try {
        result = fit(data, cfg);
    } catch (const NonConvergenceError& e) {
        err << "error: " << e.what() << '\n';
        result = e.best();
        status = not_converged;
    }
    write_output(o.output, out, [&](std::ostream& s) { s << fit_json(result, data, cfg).dump(2) << '\n'; });
    return status;
}

struct ReportRow {
    double delta_p;
    double closed;
    oracle::OracleResult oracle;
    bool pass;
};

int cmd_oracle_check(const Options& o, std::ostream& out) {
    const ModelParams p = model_params(o);
    const auto grid = make_grid(parse_grid(o.grid));
    oracle::QuadratureSpec spec;
    spec.sample_count = o.samples;
    spec.rng_seed = o.seed;
    spec.target_rel_tol = o.tol;
    spec.validate();

    using OracleFn = oracle::OracleResult (*)(double, const ModelParams&, const oracle::QuadratureSpec&);
    struct Block {
        const char* name;
        std::function<double(double)> closed;
        OracleFn oracle;
    };
    std::vector<Block> blocks;
    if (o.quantity != "uncor") {
        blocks.push_back({"I_cor", [&](double dp) { return intensity_cor(dp, p); },
                          &oracle::intensity_cor_oracle});
    }
    if (o.quantity != "cor") {
        const auto form = uncor_form(o);
        blocks.push_back({"I_uncor", [&, form](double dp) { return intensity_uncor(dp, p, form); },
                          &oracle::intensity_uncor_oracle});
    }

    std::vector<std::vector<ReportRow>> rows(blocks.size());
    bool all_pass = true;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (double dp : grid) {
            ReportRow row{dp, blocks[b].closed(dp), {}, false};
            try {
                row.oracle = blocks[b].oracle(dp, p, spec);
                row.pass = oracle::agrees(row.closed, row.oracle, o.tol);
            } catch (const ToleranceNotMetError& e) {
                row.oracle = {e.value(), e.est_error(), e.samples_used()};
                row.pass = false;
            }
            all_pass = all_pass && row.pass;
            rows[b].push_back(row);
        }
    }

    write_output(o.output, out, [&](std::ostream& s) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            s << "# " << blocks[b].name << '\n' << "delta_p,closed,oracle,err,pass\n";
            for (const auto& r : rows[b]) {
                s << format_number(r.delta_p) << ',' << format_number(r.closed) << ','
                  << format_number(r.oracle.value) << ',' << format_number(r.oracle.est_error) << ','
                  << (r.pass ? "PASS" : "FAIL") << '\n';
            }
        }
    });
    return all_pass ? ok : verification_failed;
}

int cmd_synth(const Options& o, std::ostream& out) {
    if (!(o.noise >= 0.0)) {
        throw UsageError("--noise must be non-negative");
    }
    const ModelParams p = model_params(o);
    const auto grid = make_grid(parse_grid(o.grid));
    const Dataset d = synthesize(p, grid, o.noise, o.seed, uncor_form(o));
    write_output(o.output, out, [&](std::ostream& s) { write_dataset(s, d); });
    return ok;
}

void add_model_flags(CLI::App& cmd, Options& o) {
    cmd.add_option("--sigma", o.sigma, "momentum uncertainty sigma (a.u.)")->check(CLI::PositiveNumber);
    cmd.add_option("--f", o.f, "singlet-to-triplet transition probability")->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--p-tilde", o.p_tilde, "relative momentum magnitude (a.u.)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--p-total", o.p_total, "total momentum P as x,y,z (a.u.)");
    cmd.add_option("--n-tot", o.n_tot, "total cross-section")->check(CLI::PositiveNumber);
    cmd.add_option("--uncor-form", o.uncor_form, "accidental-intensity normalization")
        ->check(CLI::IsMember({"first_principles", "published"}));
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-electron momentum correlation model: curves, fits and oracle checks", "paircorr"};
    app.require_subcommand(1);
    Options o;

    auto* curve_cmd = app.add_subcommand("curve", "evaluate R on a grid");
    add_model_flags(*curve_cmd, o);
    curve_cmd->add_option("--grid", o.grid, "min:max:count")->required();
    curve_cmd->add_option("-o,--output", o.output, "output file (default stdout)");
    curve_cmd->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

    auto* fit_cmd = app.add_subcommand("fit", "fit model parameters to a dataset");
    add_model_flags(*fit_cmd, o);
    fit_cmd->add_option("--data", o.data, "dataset CSV (delta_p,R[,sigma_R])")->required();
    fit_cmd->add_option("-o,--output", o.output, "result JSON (default stdout)");
    fit_cmd->add_option("--free", o.free, "free parameters")
        ->delimiter(',')
        ->check(CLI::IsMember({"sigma", "f", "p_tilde"}));
    fit_cmd->add_option("--p-tilde-mode", o.p_tilde_mode, "how p_tilde is set when not free")
        ->check(CLI::IsMember({"ratio", "fixed", "free"}));
    fit_cmd->add_option("--p-tilde-ratio", o.p_tilde_ratio, "p_tilde / sigma in ratio mode")
        ->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--sigma-bounds", o.sigma_bounds, "lo:hi");
    fit_cmd->add_option("--f-bounds", o.f_bounds, "lo:hi");
    fit_cmd->add_option("--p-tilde-bounds", o.p_tilde_bounds, "lo:hi");
    fit_cmd->add_option("--multistart", o.multistart)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--max-iterations", o.max_iterations)->check(CLI::PositiveNumber);
    fit_cmd->add_option("--seed", o.seed);

    auto* oracle_cmd = app.add_subcommand("oracle-check", "compare closed forms with direct integration");
    add_model_flags(*oracle_cmd, o);
    oracle_cmd->add_option("--grid", o.grid, "min:max:count")->required();
    oracle_cmd->add_option("-o,--output", o.output, "report CSV (default stdout)");
    oracle_cmd->add_option("--samples", o.samples, "Monte-Carlo samples per integral")
        ->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--tol", o.tol, "relative tolerance")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--seed", o.seed);
    oracle_cmd->add_option("--quantity", o.quantity)->check(CLI::IsMember({"both", "cor", "uncor"}));

    auto* synth_cmd = app.add_subcommand("synth", "generate a noisy synthetic dataset");
    add_model_flags(*synth_cmd, o);
    synth_cmd->add_option("--grid", o.grid, "min:max:count")->required();
    synth_cmd->add_option("-o,--output", o.output, "dataset CSV (default stdout)");
    synth_cmd->add_option("--noise", o.noise, "relative noise level")->check(CLI::NonNegativeNumber);
    synth_cmd->add_option("--seed", o.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? ok : usage_error;
    }

    try {
        if (curve_cmd->parsed()) {
            return cmd_curve(o, out);
        }
        if (fit_cmd->parsed()) {
            return cmd_fit(o, out, err);
        }
        if (oracle_cmd->parsed()) {
            return cmd_oracle_check(o, out);
        }
        return cmd_synth(o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const InsufficientDataError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numeric_error;
    }
}

} // namespace paircorr::cli
