// garchmom command-line tool: ingest return series, estimate models, compute
// moment term structures and limits, build approximate densities and test
// them against simulated samples.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "garchmom/garchmom.hpp"

namespace gm = garchmom;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt(const gm::ExtendedMoment& m) {
    return m.is_finite() ? fmt(m.value) : m.to_string();
}

struct OutputSet {
    // path -> content; written only after the whole command succeeded, so a
    // failing run leaves no partial outputs behind
    std::map<std::string, std::string> files;

    void flush(const std::string& out_dir) {
        if (!out_dir.empty()) fs::create_directories(out_dir);
        for (const auto& [name, content] : files) {
            const fs::path path = out_dir.empty() ? fs::path(name) : fs::path(out_dir) / name;
            std::ofstream os(path, std::ios::binary);
            if (!os) throw gm::Error("cannot write " + path.string());
            os << content;
            std::cout << "wrote " << path.string() << "\n";
        }
    }
};

std::string default_output_dir() {
    const char* env = std::getenv("GARCHMOM_OUTPUT_DIR");
    return env ? env : ".";
}

/// Expands `--config file` into per-key flags inserted right after the
/// subcommand, so explicit command-line flags (parsed later, checked here)
/// take precedence. The file holds plain `key=value` lines; blank lines and
/// `#` comments are allowed.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    std::vector<std::string> cleaned;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            cleaned.push_back(args[i]);
        }
    }
    if (config_path.empty()) return cleaned;

    std::ifstream in(config_path);
    if (!in) throw gm::Error("cannot open config file: " + config_path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const std::size_t b = s.find_first_not_of(" \t");
            const std::size_t e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) entries.push_back({key, value});
    }

    auto given_explicitly = [&cleaned](const std::string& key) {
        const std::string flag = "--" + key;
        for (const std::string& a : cleaned)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::vector<std::string> out;
    if (!cleaned.empty()) out.push_back(cleaned.front());  // the subcommand
    for (const auto& [key, value] : entries) {
        if (given_explicitly(key)) continue;
        out.push_back("--" + key);
        out.push_back(value);
    }
    out.insert(out.end(), cleaned.begin() + (cleaned.empty() ? 0 : 1), cleaned.end());
    return out;
}

std::vector<double> load_returns(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gm::Error("cannot open input file: " + path);
    auto res = gm::ingest_returns(in);
    for (std::size_t line : res.rejected_lines)
        std::cerr << "warning: skipped non-finite value on line " << line << "\n";
    return std::move(res.returns);
}

gm::ModelKind parse_model(const std::string& s) {
    if (s == "garch11") return gm::ModelKind::Garch11;
    if (s == "gjr") return gm::ModelKind::Gjr;
    throw gm::Error("unknown model: " + s);
}

gm::InnovationKind parse_innovation(const std::string& s) {
    if (s == "normal") return gm::InnovationKind::Normal;
    if (s == "student_t") return gm::InnovationKind::StudentT;
    throw gm::Error("unknown innovation: " + s);
}

gm::DistApprox::Method parse_method(const std::string& s) {
    if (s == "edgeworth") return gm::DistApprox::Method::Edgeworth;
    if (s == "johnson_su") return gm::DistApprox::Method::JohnsonSu;
    if (s == "auto") return gm::DistApprox::Method::Auto;
    throw gm::Error("unknown method: " + s);
}

gm::Innovation make_innovation(gm::InnovationKind kind, double nu) {
    return kind == gm::InnovationKind::Normal ? gm::Innovation::normal()
                                              : gm::Innovation::student_t(nu);
}

/// Last filtered conditional variance advanced one step: the h_{t+1} the
/// moment formulas condition on.
double one_step_variance(std::span<const double> returns, const gm::GjrParams& p) {
    gm::KahanSum mean_acc, var_acc;
    for (double r : returns) mean_acc.add(r);
    const double mean = mean_acc.value() / static_cast<double>(returns.size());
    for (double r : returns) var_acc.add((r - mean) * (r - mean));
    double h = var_acc.value() / static_cast<double>(returns.size() - 1);
    for (double r : returns) {
        const double eps = r - p.mu;
        h = p.omega + (p.alpha + (eps < 0.0 ? p.lambda : 0.0)) * eps * eps + p.beta * h;
    }
    return h;
}

// ---------------------------------------------------------------------------

struct ParamsOptions {
    std::string input;
    std::string model = "garch11";
    std::string innovation = "normal";
    double mu = 0.0, omega = 0.0, alpha = 0.0, lambda = 0.0, beta = 0.0;
    double nu = 8.0;
    double h1 = 0.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--input", input, "CSV with a 'return' or 'price' column; "
                                          "parameters are then estimated from it");
        cmd->add_option("--model", model, "garch11 | gjr")->capture_default_str();
        cmd->add_option("--innovation", innovation, "normal | student_t")
            ->capture_default_str();
        cmd->add_option("--mu", mu, "conditional mean (direct parameter mode)");
        cmd->add_option("--omega", omega, "variance intercept");
        cmd->add_option("--alpha", alpha, "squared-shock coefficient");
        cmd->add_option("--lambda", lambda, "negative-shock asymmetry coefficient");
        cmd->add_option("--beta", beta, "lagged-variance coefficient");
        cmd->add_option("--nu", nu, "Student t degrees of freedom")->capture_default_str();
        cmd->add_option("--h1", h1, "one-step-ahead variance (defaults to the steady state "
                                    "in direct mode, the filtered value in estimate mode)");
    }

    /// Resolves to (params, innovation, origin), estimating when --input set.
    void resolve(gm::GjrParams& p, gm::Innovation& inn, gm::ForecastOrigin& origin) {
        const gm::InnovationKind ikind = parse_innovation(innovation);
        if (!input.empty()) {
            const std::vector<double> returns = load_returns(input);
            const gm::FitResult fitres =
                gm::fit(returns, parse_model(model), ikind);
            if (!fitres.converged) std::cerr << "warning: estimation did not converge\n";
            p = fitres.params;
            if (fitres.nu) nu = *fitres.nu;
            if (h1 <= 0.0) h1 = one_step_variance(returns, p);
        } else {
            p = gm::GjrParams{mu, omega, alpha, lambda, beta};
            if (omega <= 0.0)
                throw gm::Error("direct parameter mode needs --omega > 0 (or use --input)");
        }
        inn = make_innovation(ikind, nu);
        if (h1 <= 0.0) {
            const double f0 = inn.cdf_at_zero();
            h1 = p.omega / (1.0 - (p.alpha + p.lambda * f0 + p.beta));
        }
        origin.h_next = h1;
    }
};

int cmd_ingest(const std::string& input, const std::string& output) {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw gm::Error("cannot open input file: " + input);
    auto res = gm::ingest_returns(in);
    for (std::size_t line : res.rejected_lines)
        std::cerr << "warning: skipped non-finite value on line " << line << "\n";
    std::ostringstream body;
    body << "return\n";
    for (double r : res.returns) body << fmt(r) << "\n";
    if (output.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream os(output, std::ios::binary);
        if (!os) throw gm::Error("cannot write " + output);
        os << body.str();
        std::cout << "wrote " << output << " (" << res.returns.size() << " returns)\n";
    }
    return 0;
}

int cmd_moments(ParamsOptions& po, std::size_t horizon, std::size_t max_n,
                const std::string& out_dir) {
    gm::GjrParams p;
    gm::Innovation inn = gm::Innovation::normal();
    gm::ForecastOrigin origin{};
    po.resolve(p, inn, origin);
    const gm::DerivedConstants dc = gm::derive_constants(p, inn, origin);

    gm::AggregationCaps caps;
    caps.max_n_variance_tail = std::max(caps.max_n_variance_tail, max_n);
    caps.max_n_returns = std::max(caps.max_n_returns, max_n);
    const std::size_t n_max = std::min(horizon, max_n);
    const gm::CrossMomentTables ctx(dc, std::max<std::size_t>(horizon, 2), 4);

    OutputSet out;
    {
        std::ostringstream os;
        os << "s,ret_mean,ret_variance,ret_skewness,ret_kurtosis,"
              "var_mean,var_variance,var_skewness,var_kurtosis\n";
        for (std::size_t s = 1; s <= horizon; ++s) {
            const gm::MomentSet r = gm::forward_return_moments(ctx.table(), s);
            os << s << ',' << fmt(r.mean) << ',' << fmt(r.variance) << ','
               << fmt(r.skewness) << ',' << fmt(r.kurtosis);
            if (s == 1) {
                os << ',' << fmt(dc.h_next) << ",0,,";
            } else {
                const gm::MomentSet v = gm::forward_variance_moments(ctx.table(), s);
                os << ',' << fmt(v.mean) << ',' << fmt(v.variance) << ','
                   << fmt(v.skewness) << ',' << fmt(v.kurtosis);
            }
            os << "\n";
        }
        out.files["forward.csv"] = os.str();
    }
    {
        std::ostringstream os;
        os << "n,ret_mean,ret_variance,ret_skewness,ret_kurtosis,"
              "var_mean,var_variance,var_skewness,var_kurtosis\n";
        for (std::size_t n = 1; n <= n_max; ++n) {
            const gm::MomentSet r = gm::aggregated_return_moments(ctx, n, caps);
            os << n << ',' << fmt(r.mean) << ',' << fmt(r.variance) << ','
               << fmt(r.skewness) << ',' << fmt(r.kurtosis);
            if (n == 1) {
                os << ',' << fmt(dc.h_next) << ",0,,";
            } else {
                const gm::MomentSet v = gm::aggregated_variance_moments(ctx, n, caps);
                os << ',' << fmt(v.mean) << ',' << fmt(v.variance) << ','
                   << fmt(v.skewness) << ',' << fmt(v.kurtosis);
            }
            os << "\n";
        }
        out.files["aggregated.csv"] = os.str();
    }
    {
        std::ostringstream os;
        os << "quantity,value,region\n";
        const auto fr = gm::limit_forward_returns(dc);
        os << "fwd_return_variance," << fmt(fr.variance) << ',' << fr.variance.region << "\n";
        os << "fwd_return_skewness," << fmt(fr.skewness) << ',' << fr.skewness.region << "\n";
        os << "fwd_return_kurtosis," << fmt(fr.kurtosis) << ',' << fr.kurtosis.region << "\n";
        const auto ar = gm::limit_aggregated_returns(dc);
        os << "agg_return_variance_per_period," << fmt(ar.variance_per_period) << ','
           << ar.variance_per_period.region << "\n";
        os << "agg_return_skewness," << fmt(ar.skewness) << ',' << ar.skewness.region << "\n";
        os << "agg_return_kurtosis," << fmt(ar.kurtosis) << ',' << ar.kurtosis.region << "\n";
        try {
            const auto vl = gm::limit_variance_moments(dc);
            os << "fwd_variance_variance," << fmt(vl.fwd_variance) << ','
               << vl.fwd_variance.region << "\n";
            os << "agg_variance_variance_per_period," << fmt(vl.agg_variance_per_period)
               << ',' << vl.agg_variance_per_period.region << "\n";
            os << "fwd_variance_skewness," << fmt(vl.fwd_skewness) << ','
               << vl.fwd_skewness.region << "\n";
            os << "agg_variance_skewness," << fmt(vl.agg_skewness) << ','
               << vl.agg_skewness.region << "\n";
        } catch (const gm::UnsupportedRegionError& e) {
            os << "variance_limits,unsupported," << e.what() << "\n";
        }
        out.files["limits.csv"] = os.str();
    }
    out.flush(out_dir);
    return 0;
}

int cmd_simulate(ParamsOptions& po, std::size_t horizon, std::size_t paths,
                 std::uint64_t seed, const std::string& family, const std::string& output) {
    gm::GjrParams p;
    gm::Innovation inn = gm::Innovation::normal();
    gm::ForecastOrigin origin{};
    po.resolve(p, inn, origin);
    gm::SimulationSpec spec;
    spec.params = p;
    spec.innovation = inn;
    spec.origin = origin;
    spec.horizon = horizon;
    spec.n_paths = paths;
    spec.seed = seed;
    const gm::SimulationOutput sim = gm::simulate(spec);
    const std::vector<std::vector<double>>* data = nullptr;
    const char* prefix = "r";
    if (family == "forward_returns") {
        data = &sim.forward_returns;
        prefix = "r";
    } else if (family == "aggregated_returns") {
        data = &sim.aggregated_returns;
        prefix = "R";
    } else if (family == "forward_variances") {
        data = &sim.forward_variances;
        prefix = "h";
    } else if (family == "aggregated_variances") {
        data = &sim.aggregated_variances;
        prefix = "H";
    } else {
        throw gm::Error("unknown family: " + family);
    }
    if (output.empty()) {
        gm::write_sample_csv(std::cout, *data, prefix);
    } else {
        std::ofstream os(output, std::ios::binary);
        if (!os) throw gm::Error("cannot write " + output);
        gm::write_sample_csv(os, *data, prefix);
        std::cout << "wrote " << output << "\n";
    }
    return 0;
}

struct GofAccumulator {
    std::vector<double> stats;
    double cv = 0.0;
    void add(double s) { stats.push_back(s); }
    double mean() const {
        gm::KahanSum s;
        for (double v : stats) s.add(v);
        return s.value() / static_cast<double>(stats.size());
    }
    double stdev() const {
        const double m = mean();
        gm::KahanSum s;
        for (double v : stats) s.add((v - m) * (v - m));
        return std::sqrt(s.value() / static_cast<double>(stats.size() - 1));
    }
    double rejection_rate() const {
        std::size_t n = 0;
        for (double v : stats)
            if (v > cv) ++n;
        return static_cast<double>(n) / static_cast<double>(stats.size());
    }
};

int cmd_gof(const std::string& input, const std::string& model_s,
            const std::string& innovation_s, const std::string& method_s,
            std::size_t horizon, std::size_t dates, std::size_t window, std::size_t paths,
            std::uint64_t seed, const std::string& target, std::size_t cv_trials,
            const std::string& out_dir) {
    const std::vector<double> returns = load_returns(input);
    const gm::ModelKind model = parse_model(model_s);
    const gm::InnovationKind ikind = parse_innovation(innovation_s);
    const gm::DistApprox::Method method = parse_method(method_s);
    const bool aggregated = target == "aggregated";
    if (!aggregated && target != "forward") throw gm::Error("target must be forward|aggregated");

    if (returns.size() < window + dates - 1)
        throw gm::Error("series too short for the requested window/dates");

    GofAccumulator ks, cvm, ad;
    ks.cv = gm::asymptotic_critical_value_5pct(gm::GofKind::KS);
    cvm.cv = gm::asymptotic_critical_value_5pct(gm::GofKind::CVM);
    ad.cv = gm::asymptotic_critical_value_5pct(gm::GofKind::AD);
    std::vector<double> ks_distances;
    std::ostringstream per_date;
    per_date << "date_index,ks_distance,ks_statistic,cvm_statistic,ad_statistic,"
                "method_used,fell_back\n";

    std::optional<gm::FitResult> prev;
    for (std::size_t d = 0; d < dates; ++d) {
        const std::size_t start = returns.size() - window - (dates - 1) + d;
        const std::span<const double> win(returns.data() + start, window);
        gm::FitOptions opt;
        if (prev && prev->converged) {
            opt.warm_start = prev->params;
            if (prev->nu) opt.warm_start_nu = *prev->nu;
        }
        const gm::FitResult fr = gm::fit(win, model, ikind, opt);
        prev = fr;
        const gm::Innovation inn = make_innovation(ikind, fr.nu.value_or(8.0));
        const gm::ForecastOrigin origin{one_step_variance(win, fr.params)};
        const gm::DerivedConstants dc = gm::derive_constants(fr.params, inn, origin);
        const gm::CrossMomentTables ctx(dc, std::max<std::size_t>(horizon, 2));

        gm::MomentSet analytic;
        if (aggregated) {
            analytic = gm::aggregated_return_moments(ctx, horizon);
        } else {
            analytic = gm::forward_return_moments(ctx.table(), horizon);
        }
        const gm::DistApprox approx = gm::approximate_distribution(analytic, method);

        gm::SimulationSpec spec;
        spec.params = fr.params;
        spec.innovation = inn;
        spec.origin = origin;
        spec.horizon = horizon;
        spec.n_paths = paths;
        spec.seed = seed + d;
        const gm::SimulationOutput sim = gm::simulate(spec);
        std::vector<double> sample =
            aggregated ? sim.aggregated_returns[horizon - 1] : sim.forward_returns[horizon - 1];
        std::sort(sample.begin(), sample.end());

        const auto cdf = [&approx](double x) { return approx.cdf(x); };
        const gm::GofResult rks = gm::ks_statistic(cdf, sample);
        const gm::GofResult rcvm = gm::cvm_statistic(cdf, sample);
        const gm::GofResult rad = gm::ad_statistic(cdf, sample);
        ks.add(rks.statistic);
        cvm.add(rcvm.statistic);
        ad.add(rad.statistic);
        ks_distances.push_back(rks.distance);
        per_date << d << ',' << fmt(rks.distance) << ',' << fmt(rks.statistic) << ','
                 << fmt(rcvm.statistic) << ',' << fmt(rad.statistic) << ','
                 << (approx.is_johnson_su() ? "johnson_su" : "edgeworth") << ','
                 << (approx.fell_back() ? 1 : 0) << "\n";
    }

    gm::KahanSum dsum;
    for (double d : ks_distances) dsum.add(d);
    const double mean_distance = dsum.value() / static_cast<double>(ks_distances.size());

    std::ostringstream summary;
    summary << "metric,value\n";
    summary << "KS-average," << fmt(mean_distance) << "\n";
    {
        GofAccumulator kd;
        kd.stats = ks_distances;
        summary << "KS-stdev," << fmt(kd.stdev()) << "\n";
    }
    summary << "KS-rejections@5%," << fmt(ks.rejection_rate()) << "\n";
    summary << "CVM-average," << fmt(cvm.mean()) << "\n";
    summary << "CVM-stdev," << fmt(cvm.stdev()) << "\n";
    summary << "CVM-rejections@5%," << fmt(cvm.rejection_rate()) << "\n";
    summary << "AD-average," << fmt(ad.mean()) << "\n";
    summary << "AD-rejections@5%," << fmt(ad.rejection_rate()) << "\n";
    if (cv_trials > 0) {
        // simulated critical value with the estimation step folded in:
        // each trial refits the approximation to its own simulated sample
        gm::CriticalValuePipeline pipe;
        pipe.sampler_quantile = [](double u) {
            return boost::math::quantile(boost::math::normal_distribution<>(), u);
        };
        pipe.build_cdf = [method](std::span<const double> sample) -> gm::CdfFn {
            const gm::EmpiricalMoments em = gm::empirical_moments(sample);
            const gm::DistApprox a = gm::approximate_distribution(em.moments, method);
            return [a](double x) { return a.cdf(x); };
        };
        const double sim_cv = gm::simulate_critical_values(pipe, gm::GofKind::KS, cv_trials,
                                                           paths, 0.05, seed ^ 0xC0FFEEull);
        summary << "KS-simulated-cv@5%," << fmt(sim_cv) << "\n";
        std::size_t rej = 0;
        for (double s : ks.stats)
            if (s > sim_cv) ++rej;
        summary << "KS-rejections@simulated,"
                << fmt(static_cast<double>(rej) / static_cast<double>(ks.stats.size())) << "\n";
    }

    OutputSet out;
    out.files["gof_dates.csv"] = per_date.str();
    out.files["gof_summary.csv"] = summary.str();
    out.flush(out_dir);
    std::cout << "mean KS distance: " << fmt(mean_distance) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytic moment term structures, limits and approximate predictive "
                 "distributions for GJR-GARCH processes, with a Monte Carlo validation "
                 "pipeline"};
    app.require_subcommand(1);

    // every subcommand accepts a plain key=value config file; flags override
    // it (expanded in expand_config_args before parsing)
    std::string config_path_doc;
    auto add_config = [&config_path_doc](CLI::App* cmd) {
        cmd->add_option("--config", config_path_doc,
                        "plain key=value config file; explicit flags override it");
    };

    // ingest
    auto* ingest = app.add_subcommand("ingest", "read a CSV and emit a clean return series");
    add_config(ingest);
    std::string ingest_input, ingest_output;
    ingest->add_option("--input", ingest_input, "CSV with 'return' or 'price' column")
        ->required();
    ingest->add_option("--output", ingest_output, "output CSV (stdout if omitted)");

    // moments
    auto* moments = app.add_subcommand(
        "moments", "forward and aggregated moment term structures plus limits");
    add_config(moments);
    ParamsOptions mo;
    mo.add_to(moments);
    std::size_t mo_horizon = 22, mo_max_n = 22;
    std::string mo_out_dir = default_output_dir();
    moments->add_option("--horizon", mo_horizon, "largest horizon s to tabulate")
        ->capture_default_str();
    moments->add_option("--max-n", mo_max_n, "cap for the aggregated-variance sums")
        ->capture_default_str();
    moments->add_option("--output-dir", mo_out_dir, "output directory")->capture_default_str();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "dump simulated sample paths as CSV");
    add_config(simulate);
    ParamsOptions so;
    so.add_to(simulate);
    std::size_t sim_horizon = 5, sim_paths = 10000;
    std::uint64_t sim_seed = 42;
    std::string sim_family = "forward_returns", sim_output;
    simulate->add_option("--horizon", sim_horizon)->capture_default_str();
    simulate->add_option("--paths", sim_paths)->capture_default_str();
    simulate->add_option("--seed", sim_seed)->capture_default_str();
    simulate
        ->add_option("--family", sim_family,
                     "forward_returns | aggregated_returns | forward_variances | "
                     "aggregated_variances")
        ->capture_default_str();
    simulate->add_option("--output", sim_output, "output CSV (stdout if omitted)");

    // gof
    auto* gof = app.add_subcommand(
        "gof", "rolling estimation, approximate densities and distribution tests");
    add_config(gof);
    std::string gof_input, gof_model = "garch11", gof_innovation = "normal",
                gof_method = "johnson_su", gof_target = "forward";
    std::size_t gof_horizon = 5, gof_dates = 50, gof_window = 2520, gof_paths = 10000,
                gof_cv_trials = 0;
    std::uint64_t gof_seed = 42;
    std::string gof_out_dir = default_output_dir();
    gof->add_option("--input", gof_input, "CSV return series")->required();
    gof->add_option("--model", gof_model, "garch11 | gjr")->capture_default_str();
    gof->add_option("--innovation", gof_innovation, "normal | student_t")
        ->capture_default_str();
    gof->add_option("--method", gof_method, "edgeworth | johnson_su | auto")
        ->capture_default_str();
    gof->add_option("--horizon", gof_horizon, "forecast horizon in days")
        ->capture_default_str();
    gof->add_option("--dates", gof_dates, "number of rolled forecast dates")
        ->capture_default_str();
    gof->add_option("--window", gof_window, "estimation window length")->capture_default_str();
    gof->add_option("--paths", gof_paths, "simulated sample size per date")
        ->capture_default_str();
    gof->add_option("--seed", gof_seed)->capture_default_str();
    gof->add_option("--target", gof_target, "forward | aggregated")->capture_default_str();
    gof->add_option("--simulated-cv", gof_cv_trials,
                    "also simulate the 5% critical value with this many trials");
    gof->add_option("--output-dir", gof_out_dir, "output directory")->capture_default_str();

    try {
        std::vector<std::string> expanded = expand_config_args(argc, argv);
        std::reverse(expanded.begin(), expanded.end());  // CLI11 wants reversed args
        app.parse(std::move(expanded));
    } catch (const CLI::ParseError& e) {
        // 0 for --help/--version, 1 for any usage error
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const gm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*ingest) return cmd_ingest(ingest_input, ingest_output);
        if (*moments) return cmd_moments(mo, mo_horizon, mo_max_n, mo_out_dir);
        if (*simulate)
            return cmd_simulate(so, sim_horizon, sim_paths, sim_seed, sim_family, sim_output);
        if (*gof)
            return cmd_gof(gof_input, gof_model, gof_innovation, gof_method, gof_horizon,
                           gof_dates, gof_window, gof_paths, gof_seed, gof_target,
                           gof_cv_trials, gof_out_dir);
    } catch (const gm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
