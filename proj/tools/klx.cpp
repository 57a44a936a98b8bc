#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "klx/montecarlo.hpp"
#include "klx/runconfig.hpp"
#include "klx/smallball.hpp"
#include "klx/spectrum.hpp"
#include "klx/transform.hpp"
#include "klx/transformed_kl.hpp"
#include "klx/validate.hpp"

namespace {

using namespace klx;
using nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_out(const std::string& out, const std::string& text) {
    if (out == "-" || out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + out);
    f << text;
}

Kernel kernel_from_config(const RunConfig& cfg) {
    Process p = process_from_tag(cfg.process);
    if (p == Process::Custom) {
        if (cfg.kernel_csv.empty())
            throw ConfigError("custom process needs kernel_csv = <path>");
        return kernel_from_csv(cfg.kernel_csv);
    }
    return make_kernel(p, cfg.slepian_c);
}

Spectrum spectrum_from_config(const RunConfig& cfg, const Transform& tr) {
    if (cfg.method == "nystrom")
        return nystrom_spectrum(transformed_kernel(tr), std::max(cfg.grid, 4 * cfg.count),
                                cfg.count);
    if (cfg.method != "analytic")
        throw ConfigError("method must be analytic or nystrom");
    return transformed_kl(tr, cfg.count, 1024);
}

int cmd_spectrum(const RunConfig& cfg) {
    Kernel k = kernel_from_config(cfg);
    Transform tr = make_transform(k, parse_weight(cfg.weight), cfg.alpha);
    Spectrum sp = spectrum_from_config(cfg, tr);
    const char* branch_name[] = {"first", "second"};
    if (cfg.format == "json") {
        ordered_json j;
        j["schema"] = 1;
        j["process"] = cfg.process;
        j["weight"] = cfg.weight;
        j["alpha"] = cfg.alpha;
        j["q"] = tr.q();
        j["Q"] = tr.Q();
        j["critical"] = tr.critical();
        j["rows"] = ordered_json::array();
        for (Index i = 0; i < sp.count(); ++i) {
            const SpectralEntry& e = sp.entries[i];
            ordered_json row;
            row["k"] = static_cast<int>(i + 1);
            row["branch"] = e.branch < 0 ? "nystrom" : branch_name[e.branch];
            if (std::isfinite(e.x)) row["omega_or_tau"] = e.x;
            row["lambda"] = e.lambda;
            row["multiplicity"] = e.multiplicity;
            j["rows"].push_back(row);
        }
        write_out(cfg.out, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        os << "k,branch,omega_or_tau,lambda,multiplicity\n";
        for (Index i = 0; i < sp.count(); ++i) {
            const SpectralEntry& e = sp.entries[i];
            os << (i + 1) << "," << (e.branch < 0 ? "nystrom" : branch_name[e.branch]) << ","
               << (std::isfinite(e.x) ? fmt(e.x) : "") << "," << fmt(e.lambda) << ","
               << e.multiplicity << "\n";
        }
        write_out(cfg.out, os.str());
    }
    return 0;
}

int cmd_smallball(const RunConfig& cfg) {
    Kernel k = kernel_from_config(cfg);
    Transform tr = make_transform(k, parse_weight(cfg.weight), cfg.alpha);
    AsymptoticDescriptor base = base_smallball(k.id());

    std::string form = cfg.form;
    if (form == "auto") form = tr.critical() ? "theorem3" : "theorem1";
    AsymptoticDescriptor desc{};
    if (form == "theorem1") {
        desc = theorem1_scale(base, tr.q(), tr.alpha());
    } else if (form == "theorem3" || form == "theorem2") {
        desc = theorem3_scale(base, tr.q(), tr.phi_l2_norm());
    } else {
        throw ConfigError("form must be theorem1, theorem2, theorem3, or auto");
    }

    ordered_json j;
    j["schema"] = 1;
    j["process"] = cfg.process;
    j["weight"] = cfg.weight;
    j["alpha"] = cfg.alpha;
    j["branch"] = form + (tr.critical() ? " (critical)" : " (noncritical)");
    j["C"] = desc.C;
    j["beta"] = desc.beta;
    j["D"] = desc.D;
    j["d"] = desc.d;
    j["value_at_eps"] = ordered_json::array();
    AsymptoticDescriptor dens = density_asymptotics(base);
    for (double e : cfg.eps) {
        double v;
        if (form == "theorem2") {
            auto density = [&dens](double x) {
                if (x <= 0.0) return 0.0;
                return dens.C * std::pow(x, dens.beta) * std::exp(-dens.D / x);
            };
            v = theorem2_convolution(density, tr.q(), tr.phi_l2_norm(), e);
        } else {
            v = eval_asymptotic(desc, e);
        }
        ordered_json row;
        row["eps"] = e;
        row["value"] = v;
        j["value_at_eps"].push_back(row);
    }
    write_out(cfg.out, j.dump(2) + "\n");
    return 0;
}

struct SimRow {
    double eps, predicted, empirical, lo, hi;
};

struct SimResult {
    std::vector<SimRow> rows;
    int terms;
    double tail_bound;
};

SimResult simulate_rows(const RunConfig& cfg, const Transform& tr) {
    Spectrum sp = transformed_kl(tr, std::max(cfg.count, std::max(cfg.terms, 256)), 512);
    int terms = cfg.terms > 0 ? cfg.terms : default_n_terms(sp);
    terms = std::min<int>(terms, static_cast<int>(sp.count()));
    SampleBatch nb = sample_norm2(sp.eigenvalues.head(terms), static_cast<int>(cfg.paths),
                                  cfg.seed, sp.trace, 0);
    SimResult out{{}, terms, nb.tail_bound};
    for (double e : cfg.eps) {
        SmallBallEstimate est = empirical_small_ball(nb, e);
        // processes without a base descriptor still simulate; the predicted
        // column is simply absent
        double pred = std::numeric_limits<double>::quiet_NaN();
        try {
            AsymptoticDescriptor base = base_smallball(tr.kernel().id());
            pred = tr.critical()
                       ? eval_asymptotic(theorem3_scale(base, tr.q(), tr.phi_l2_norm()), e)
                       : eval_asymptotic(theorem1_scale(base, tr.q(), tr.alpha()), e);
        } catch (const UnsupportedError&) {
        }
        out.rows.push_back({e, pred, est.estimate, est.lo, est.hi});
    }
    return out;
}

int cmd_simulate(const RunConfig& cfg) {
    Kernel k = kernel_from_config(cfg);
    Transform tr = make_transform(k, parse_weight(cfg.weight), cfg.alpha);
    SimResult sim = simulate_rows(cfg, tr);
    ordered_json j;
    j["schema"] = 1;
    j["process"] = cfg.process;
    j["weight"] = cfg.weight;
    j["alpha"] = cfg.alpha;
    j["paths"] = cfg.paths;
    j["terms"] = sim.terms;
    j["tail_bound"] = sim.tail_bound;
    j["seed"] = cfg.seed;
    j["results"] = ordered_json::array();
    for (const auto& r : sim.rows) {
        ordered_json row;
        row["eps"] = r.eps;
        row["empirical"] = r.empirical;
        row["ci_lo"] = r.lo;
        row["ci_hi"] = r.hi;
        if (std::isfinite(r.predicted)) row["predicted"] = r.predicted;
        else row["predicted"] = nullptr;
        j["results"].push_back(row);
    }
    write_out(cfg.out, j.dump(2) + "\n");
    return 0;
}

int cmd_table(const RunConfig& cfg) {
    Kernel k = kernel_from_config(cfg);
    Transform tr = make_transform(k, parse_weight(cfg.weight), cfg.alpha);
    SimResult sim = simulate_rows(cfg, tr);
    std::ostringstream os;
    os << "eps,predicted,empirical,ci_lo,ci_hi\n";
    for (const auto& r : sim.rows)
        os << fmt(r.eps) << "," << (std::isfinite(r.predicted) ? fmt(r.predicted) : "") << ","
           << fmt(r.empirical) << "," << fmt(r.lo) << "," << fmt(r.hi) << "\n";
    write_out(cfg.out, os.str());
    return 0;
}

int cmd_validate(const RunConfig& cfg) {
    Checks checks = run_suite(cfg.suite, cfg.seed);
    std::string report = cfg.format == "json" ? render_report_json(checks, cfg.suite, cfg.seed)
                                              : render_report_text(checks, cfg.suite, cfg.seed);
    write_out(cfg.out, report);
    return all_pass(checks) ? 0 : 1;
}

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--process", cfg.process, "wiener|bridge|iwiener|icwiener|slepian|custom");
    sub->add_option("--weight", cfg.weight,
                    "const1 | poly:<expr> | delta:<t0> | ddelta:<t0> | normquant | csv:<path>");
    sub->add_option("--alpha", cfg.alpha, "transform parameter");
    sub->add_option("--count", cfg.count, "number of eigenpairs");
    sub->add_option("--paths", cfg.paths, "Monte Carlo sample count");
    sub->add_option("--terms", cfg.terms, "KL truncation (0 = tail rule)");
    sub->add_option("--eps", cfg.eps, "small-ball radii")->delimiter(',');
    sub->add_option("--seed", cfg.seed, "master seed (default from KLX_SEED)");
    sub->add_option("--grid", cfg.grid, "nystrom grid size");
    sub->add_option("--method", cfg.method, "analytic|nystrom");
    sub->add_option("--form", cfg.form, "theorem1|theorem2|theorem3|auto");
    sub->add_option("--suite", cfg.suite, "lemma|spectra|smallball|montecarlo|all");
    sub->add_option("--out", cfg.out, "output path, - for stdout");
    sub->add_option("--format", cfg.format, "csv|json (text|json for validate)");
    sub->add_option("--slepian-c", cfg.slepian_c, "slepian covariance length");
    sub->add_option("--kernel-csv", cfg.kernel_csv, "custom kernel grid file");
}

// flag > config file > KLX_SEED env > default
void merge_config(CLI::App* sub, RunConfig& cfg, const std::string& config_path) {
    RunConfig file_cfg;
    std::set<std::string> file_keys;
    bool have_file = !config_path.empty();
    if (have_file) file_cfg = parse_config_file(config_path, &file_keys);
    auto keep = [&](const std::string& flag) { return sub->count(flag) > 0; };
    if (have_file) {
        if (!keep("--process")) cfg.process = file_cfg.process;
        if (!keep("--weight")) cfg.weight = file_cfg.weight;
        if (!keep("--alpha")) cfg.alpha = file_cfg.alpha;
        if (!keep("--count")) cfg.count = file_cfg.count;
        if (!keep("--paths")) cfg.paths = file_cfg.paths;
        if (!keep("--terms")) cfg.terms = file_cfg.terms;
        if (!keep("--eps")) cfg.eps = file_cfg.eps;
        if (!keep("--seed") && file_keys.count("seed")) cfg.seed = file_cfg.seed;
        if (!keep("--grid")) cfg.grid = file_cfg.grid;
        if (!keep("--method")) cfg.method = file_cfg.method;
        if (!keep("--form")) cfg.form = file_cfg.form;
        if (!keep("--suite")) cfg.suite = file_cfg.suite;
        if (!keep("--out")) cfg.out = file_cfg.out;
        if (!keep("--format")) cfg.format = file_cfg.format;
        if (!keep("--slepian-c")) cfg.slepian_c = file_cfg.slepian_c;
        if (!keep("--kernel-csv")) cfg.kernel_csv = file_cfg.kernel_csv;
    }
    if (!keep("--seed") && !(have_file && file_keys.count("seed"))) {
        if (const char* env = std::getenv("KLX_SEED")) {
            try {
                cfg.seed = std::stoull(env);
            } catch (const std::exception&) {
                throw ConfigError("KLX_SEED is not an integer");
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"klx - KL spectra and L2 small-ball asymptotics of transformed "
                 "Gaussian processes"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string names[] = {"spectrum", "smallball", "simulate", "validate", "table"};
    std::string descs[] = {
        "eigenvalue table of the transformed process",
        "small-ball asymptotic descriptor and values",
        "seeded norm sampling with empirical small-ball estimates",
        "run the validation suites",
        "plot data: (eps, predicted, empirical, CI) rows",
    };
    CLI::App* subs[5];
    for (int i = 0; i < 5; ++i) {
        subs[i] = app.add_subcommand(names[i], descs[i]);
        add_common(subs[i], cfg, config_path);
    }
    subs[1]->get_option("--format")->default_str("json");
    subs[3]->get_option("--format")->default_str("text");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = app.get_subcommands().front();
        merge_config(active, cfg, config_path);
        if (active == subs[1] && cfg.format == "csv") cfg.format = "json";
        if (active == subs[3] && cfg.format == "csv") cfg.format = "text";
        if (cfg.eps.empty()) cfg.eps = {0.1};
        if (active == subs[0]) return cmd_spectrum(cfg);
        if (active == subs[1]) return cmd_smallball(cfg);
        if (active == subs[2]) return cmd_simulate(cfg);
        if (active == subs[3]) return cmd_validate(cfg);
        return cmd_table(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
