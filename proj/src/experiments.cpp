#include "kml/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>

#include "kml/csvio.hpp"
#include "kml/errors.hpp"
#include "kml/hilbert.hpp"
#include "kml/moment.hpp"
#include "kml/nystrom.hpp"
#include "kml/parallel.hpp"
#include "kml/radial.hpp"
#include "kml/random_gap.hpp"
#include "kml/spectral.hpp"
#include "kml/verify.hpp"

namespace kml {

namespace {

namespace fs = std::filesystem;

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(text));
        return Rational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw config_error("not a rational: '" + text + "'");
    }
}

DensityHandle density_from_config(const json& cfg) {
    const std::string name = cfg.at("name").get<std::string>();
    if (name == "uniform") return uniform_density();
    if (name == "poly-perturbed") return perturbed_density(cfg.at("eps").get<double>());
    throw config_error("unknown density '" + name + "'");
}

json density_schema() {
    return json{{"type", "object"},
                {"properties",
                 {{"name", {{"type", "string"}, {"enum", {"uniform", "poly-perturbed"}}}},
                  {"eps", {{"type", "number"}, {"minimum", 1e-6}, {"maximum", 0.999}}}}},
                {"required", {"name"}}};
}

json tolerance_schema() {
    return json{{"type", "object"},
                {"properties",
                 {{"exact_mirror", {{"type", "number"}, {"minimum", 0.0}}},
                  {"quadrature", {{"type", "number"}, {"minimum", 0.0}}},
                  {"mc_sigmas", {{"type", "number"}, {"minimum", 0.0}}}}}};
}

json int_array(int minimum) {
    return json{{"type", "array"},
                {"minItems", 1},
                {"items", {{"type", "integer"}, {"minimum", minimum}}}};
}

json number_array(double minimum) {
    return json{{"type", "array"},
                {"minItems", 1},
                {"items", {{"type", "number"}, {"minimum", minimum}}}};
}

void merge_defaults(json& base, const json& user) {
    for (const auto& [key, value] : user.items()) {
        if (value.is_object() && base.contains(key) && base.at(key).is_object())
            merge_defaults(base.at(key), value);
        else
            base[key] = value;
    }
}

std::string out_path(const std::string& out_dir, const std::string& name) {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
}

} // namespace

json RunManifest::to_json() const {
    json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["tool_version"] = tool_version;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    json checks_json = json::array();
    for (const auto& [id, ok] : checks) checks_json.push_back({{"id", id}, {"passed", ok}});
    j["checks"] = checks_json;
    j["outputs"] = outputs;
    j["notes"] = notes;
    return j;
}

void RunManifest::write(const std::string& out_dir) const {
    std::ofstream out(out_path(out_dir, "manifest.json"));
    out << to_json().dump(2) << "\n";
}

json command_schema(const std::string& command) {
    json base{{"type", "object"},
              {"properties",
               {{"experiment", {{"type", "string"}, {"enum", {command}}}},
                {"seed", {{"type", "integer"}, {"minimum", 0}}},
                {"jobs", {{"type", "integer"}, {"minimum", 1}}},
                {"tolerances", tolerance_schema()}}},
              {"required", {"experiment"}}};
    json& props = base["properties"];

    if (command == "moment") {
        props["m_values"] = int_array(1);
        props["anchors"] = json{{"type", "array"},
                                {"minItems", 1},
                                {"items", {{"type", "string"}}}};
    } else if (command == "bounds") {
        props["sigma"] = {{"type", "number"}, {"minimum", 1e-8}};
        props["dim"] = {{"type", "integer"}, {"minimum", 1}, {"maximum", 2}};
        props["density"] = density_schema();
        props["m_values"] = int_array(1);
        props["t_offsets"] = number_array(0.0);
        props["lambda_values"] = number_array(0.0);
        props["anchor_count"] = {{"type", "integer"}, {"minimum", 3}};
        props["grid_resolution"] = {{"type", "integer"}, {"minimum", 3}};
        props["spectral_q"] = {{"type", "integer"}, {"minimum", 8}};
    } else if (command == "spectrum") {
        props["sigma"] = {{"type", "number"}, {"minimum", 1e-8}};
        props["dim"] = {{"type", "integer"}, {"minimum", 1}, {"maximum", 2}};
        props["density"] = density_schema();
        props["q"] = {{"type", "integer"}, {"minimum", 8}};
        props["grid_resolution"] = {{"type", "integer"}, {"minimum", 3}};
        props["cache"] = {{"type", "boolean"}};
    } else if (command == "mingap") {
        props["n_values"] = int_array(2);
        props["c_values"] = number_array(1e-9);
        props["replications"] = {{"type", "integer"}, {"minimum", 1}};
        props["gram_n_values"] = int_array(1);
        props["gram_replications"] = {{"type", "integer"}, {"minimum", 1}, {"maximum", 2000}};
        props["histogram_bins"] = {{"type", "integer"}, {"minimum", 4}};
        props["sigma"] = {{"type", "number"}, {"minimum", 1e-8}};
    } else if (command == "nystrom") {
        props["sigma"] = {{"type", "number"}, {"minimum", 1e-8}};
        props["dim"] = {{"type", "integer"}, {"minimum", 1}};
        props["n_values"] = int_array(10);
        props["schedules"] = json{{"type", "array"},
                                  {"minItems", 1},
                                  {"items",
                                   {{"type", "string"}, {"enum", {"1/n", "exp-root", "1e-12"}}}}};
        props["m_values"] = int_array(1);
        props["seeds"] = int_array(0);
        props["target"] = {{"type", "string"}, {"enum", {"one", "gauss-bump", "sine-sum"}}};
        props["noise"] = {{"type", "number"}, {"minimum", 0.0}};
        props["support_lambdas"] = number_array(0.0);
    } else {
        throw config_error("unknown experiment command '" + command + "'");
    }
    return base;
}

json default_config(const std::string& command) {
    if (command == "moment")
        return json{{"experiment", "moment"},
                    {"m_values", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}},
                    {"anchors", {"0", "1/7", "1/3", "1/2", "2/3", "1"}}};
    if (command == "bounds")
        return json{{"experiment", "bounds"},
                    {"sigma", 1.0},
                    {"dim", 1},
                    {"density", {{"name", "uniform"}}},
                    {"m_values", {3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}},
                    {"t_offsets", {0.0, 0.25, 0.5, 1.0}},
                    {"lambda_values", {1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12}},
                    {"anchor_count", 9},
                    {"grid_resolution", 512},
                    {"spectral_q", 96},
                    {"jobs", 1}};
    if (command == "spectrum")
        return json{{"experiment", "spectrum"}, {"sigma", 1.0},
                    {"dim", 1},           {"density", {{"name", "uniform"}}},
                    {"q", 96},            {"grid_resolution", 512},
                    {"cache", true}};
    if (command == "mingap")
        return json{{"experiment", "mingap"},
                    {"n_values", {2, 5, 10}},
                    {"c_values", {0.01, 0.1, 1.0}},
                    {"replications", 1000000},
                    {"gram_n_values", {2, 5, 10, 20}},
                    {"gram_replications", 400},
                    {"histogram_bins", 40},
                    {"sigma", 1.0},
                    {"seed", 20250810}};
    if (command == "nystrom")
        return json{{"experiment", "nystrom"},
                    {"sigma", 1.0},
                    {"dim", 1},
                    {"n_values", {512}},
                    {"schedules", {"1e-12", "1/n", "exp-root"}},
                    {"m_values", {64, 128, 256}},
                    {"seeds", {1, 2, 3, 4, 5}},
                    {"target", "gauss-bump"},
                    {"noise", 0.0},
                    {"support_lambdas", {1e-2, 1e-4, 1e-6}},
                    {"jobs", 1}};
    throw config_error("unknown experiment command '" + command + "'");
}

json load_config(const std::string& command, const json& user) {
    const json schema = command_schema(command);
    if (!user.is_null()) validate_config(user, schema);
    json merged = default_config(command);
    if (!user.is_null()) merge_defaults(merged, user);
    validate_config(merged, schema);
    return merged;
}

// ---- moment --------------------------------------------------------------

RunManifest run_moment(const json& config, const std::string& out_dir) {
    RunManifest manifest;
    manifest.command = "moment";
    manifest.config_hash = config_hash(config);
    manifest.started_at = timestamp();

    const std::string csv_path = out_path(out_dir, "moment.csv");
    const std::string log_path = out_path(out_dir, "moment_identities.log");
    CsvWriter csv(csv_path);
    csv.comment("config " + manifest.config_hash);
    csv.row({"m", "x", "norm_sq", "norm_bound", "max_moment_residual", "exact"});

    std::ofstream log(log_path);
    bool all_exact = true;
    for (const auto& jm : config.at("m_values")) {
        const int m = jm.get<int>();
        for (const auto& ja : config.at("anchors")) {
            const Rational x = parse_rational(ja.get<std::string>());
            const MomentPolynomial w = build_moment_polynomial(m, x);
            const Rational norm = squared_norm(w);
            bool exact = norm <= Rational(m) * Rational(m);
            Rational worst(0);
            for (int l = 0; l < m; ++l) {
                const Rational res =
                    moment_integral(w, l) - rational_pow(x, static_cast<unsigned>(l));
                if (res != 0) exact = false;
                const Rational mag = res < 0 ? -res : res;
                if (mag > worst) worst = mag;
            }
            all_exact = all_exact && exact;
            log << "m=" << m << " x=" << ja.get<std::string>() << " moments "
                << (exact ? "exact" : "VIOLATED") << ", norm^2 = " << norm << "\n";
            csv.row({CsvWriter::field(m), ja.get<std::string>(),
                     CsvWriter::field(to_double(norm)),
                     CsvWriter::field(static_cast<double>(m) * m),
                     CsvWriter::field(to_double(worst)), CsvWriter::field(exact)});
        }
    }
    manifest.checks.emplace_back("moment-identities-exact", all_exact);
    manifest.outputs = {csv_path, log_path};
    manifest.finished_at = timestamp();
    manifest.write(out_dir);
    return manifest;
}

// ---- bounds ----------------------------------------------------------------

RunManifest run_bounds(const json& config, const std::string& out_dir) {
    RunManifest manifest;
    manifest.command = "bounds";
    manifest.config_hash = config_hash(config);
    manifest.started_at = timestamp();

    const double sigma = config.at("sigma").get<double>();
    const int dim = config.at("dim").get<int>();
    const DensityHandle density = density_from_config(config.at("density"));
    const RadialKernelSpec kernel = gaussian_kernel(sigma, dim, density);
    const int anchor_count = config.at("anchor_count").get<int>();
    const int grid_res = dim == 1 ? config.at("grid_resolution").get<int>() : 64;
    const int jobs = config.value("jobs", 1);
    const Tolerances tol = Tolerances::from_config(config);
    const double slack = tol.quad();

    std::vector<double> anchors(static_cast<std::size_t>(anchor_count));
    for (int i = 0; i < anchor_count; ++i)
        anchors[static_cast<std::size_t>(i)] = static_cast<double>(i) / (anchor_count - 1);

    const std::string csv_path = out_path(out_dir, "bounds.csv");
    CsvWriter csv(csv_path);
    csv.comment("config " + manifest.config_hash);
    csv.row({"bound", "parameter", "theoretical", "empirical", "margin", "passed", "flag"});

    bool all_passed = true;
    auto emit = [&](const BoundReport& r) {
        all_passed = all_passed && r.passed;
        csv.row({r.name, r.parameters, CsvWriter::field(r.theoretical),
                 r.empirical ? CsvWriter::field(*r.empirical) : "",
                 CsvWriter::field(r.margin), CsvWriter::field(r.passed), r.note});
    };

    // Tail-bound dominance sweep over m.
    const auto m_values = config.at("m_values").get<std::vector<int>>();
    std::vector<BoundReport> tail_reports(m_values.size());
    std::vector<BoundReport> closed_reports(m_values.size());
    parallel_for(m_values.size(), jobs, [&](std::size_t i) {
        const int m = m_values[i];
        double emp = 0.0;
        if (dim == 2 && density.uniform) {
            emp = sup_error_tensor(sigma, dim, m, std::max(2 * m, 32), anchors, grid_res);
        } else {
            const SpectralModel model = build_model(kernel, std::max(8, 2 * m));
            if (dim == 1) {
                for (double x : anchors) {
                    const ProductWeight w =
                        build_product_weight(m, std::vector<double>{x}, density);
                    emp = std::max(emp, empirical_sup_error(model, w,
                                                            std::span<const double>(&x, 1),
                                                            grid_res));
                }
            } else {
                for (double x1 : anchors)
                    for (double x2 : anchors) {
                        const ProductWeight w = build_product_weight(
                            m, std::vector<double>{x1, x2}, density);
                        emp = std::max(emp,
                                       empirical_sup_error(model, w,
                                                           std::vector<double>{x1, x2},
                                                           grid_res));
                    }
            }
        }
        tail_reports[i] = make_bound_report("taylor-uniform", "m=" + std::to_string(m),
                                            taylor_uniform_bound(kernel, m), emp, slack);
        // the closed form is looser; +inf marks orders below its validity
        // threshold and the comparison is then vacuous
        const double closed = gaussian_uniform_bound_or_inf(kernel, m);
        closed_reports[i] =
            make_bound_report("closed-form-uniform", "m=" + std::to_string(m), closed, emp,
                              slack, std::isinf(closed) ? "precondition" : "");
    });
    for (const auto& r : tail_reports) emit(r);
    for (const auto& r : closed_reports) emit(r);

    // Decay bound at and above the admissibility threshold.
    const double t_star = uniform_bound_threshold(kernel);
    for (const auto& jt : config.at("t_offsets")) {
        const double t = t_star + jt.get<double>();
        const double s = t * dim;
        const int m = schedule_m(kernel, s);
        std::optional<double> emp;
        if (dim == 1) {
            const SpectralModel model = build_model(kernel, std::max(8, 2 * m));
            double worst = 0.0;
            for (double x : anchors) {
                const ProductWeight w = build_product_weight(m, std::vector<double>{x}, density);
                worst = std::max(worst, empirical_sup_error(model, w,
                                                            std::span<const double>(&x, 1),
                                                            grid_res));
            }
            emp = worst;
        } else if (density.uniform) {
            emp = sup_error_tensor(sigma, dim, m, std::max(2 * m, 200), anchors, grid_res);
        } else if (2 * m <= 140) {
            const SpectralModel model = build_model(kernel, std::max(8, 2 * m));
            double worst = 0.0;
            for (double x1 : anchors)
                for (double x2 : anchors) {
                    const ProductWeight w =
                        build_product_weight(m, std::vector<double>{x1, x2}, density);
                    worst = std::max(worst,
                                     empirical_sup_error(model, w,
                                                         std::vector<double>{x1, x2}, grid_res));
                }
            emp = worst;
        }
        emit(make_bound_report("uniform-decay", "t=" + CsvWriter::field(t),
                               uniform_decay_bound(s), emp, slack,
                               emp ? "" : "grid-budget"));

        // RKHS-norm decay at the same schedule; the closed form needs the
        // eigensolve, so keep the order moderate.
        if (dim == 1 && m <= 80) {
            const SpectralModel model = build_model(kernel, std::max(2 * m, 32));
            double emp_k = 0.0;
            for (double x : anchors) {
                const ProductWeight w = build_product_weight(m, std::vector<double>{x}, density);
                emp_k = std::max(emp_k,
                                 empirical_rkhs_error(model, w, std::span<const double>(&x, 1)));
            }
            emit(make_bound_report("rkhs-decay", "t=" + CsvWriter::field(t), rkhs_decay_bound(s),
                                   emp_k, slack));
        }
    }

    // Weight-norm growth sweep over lambda.
    const int q = config.at("spectral_q").get<int>();
    const SpectralModel model = build_model(kernel, q);
    for (const auto& jl : config.at("lambda_values")) {
        const double lambda = jl.get<double>();
        emit(make_bound_report("ninf-growth", "lambda=" + CsvWriter::field(lambda),
                               ninf_growth_bound(kernel, lambda),
                               empirical_ninf(model, lambda, grid_res), 0.0));
    }

    manifest.checks.emplace_back("bounds-all-passed", all_passed);
    manifest.outputs = {csv_path};
    manifest.finished_at = timestamp();
    manifest.write(out_dir);
    return manifest;
}

// ---- spectrum --------------------------------------------------------------

RunManifest run_spectrum(const json& config, const std::string& out_dir) {
    RunManifest manifest;
    manifest.command = "spectrum";
    manifest.config_hash = config_hash(config);
    manifest.started_at = timestamp();

    const double sigma = config.at("sigma").get<double>();
    const int dim = config.at("dim").get<int>();
    const int q = config.at("q").get<int>();
    const DensityHandle density = density_from_config(config.at("density"));
    const RadialKernelSpec kernel = gaussian_kernel(sigma, dim, density);

    const json model_key = {{"sigma", sigma},
                            {"dim", dim},
                            {"q", q},
                            {"density", config.at("density")}};
    const std::string cache_path =
        out_path(out_dir, "model_" + config_hash(model_key) + ".json");

    std::unique_ptr<SpectralModel> model;
    const bool use_cache = config.value("cache", true);
    if (use_cache && fs::exists(cache_path)) {
        std::ifstream in(cache_path);
        json j;
        in >> j;
        model = std::make_unique<SpectralModel>(model_from_json(j));
        manifest.notes.push_back("cached");
    } else {
        model = std::make_unique<SpectralModel>(build_model(kernel, q));
        if (use_cache) {
            std::ofstream out(cache_path);
            out << to_json(*model).dump() << "\n";
            manifest.outputs.push_back(cache_path);
        }
    }

    const int grid_res = config.at("grid_resolution").get<int>();
    std::vector<double> xs(static_cast<std::size_t>(grid_res));
    for (int i = 0; i < grid_res; ++i)
        xs[static_cast<std::size_t>(i)] = static_cast<double>(i) / (grid_res - 1);

    const DecayFit fit = eigen_decay_fit(*model);
    double min_res = 0.0;
    for (double rr : fit.residuals) min_res = std::min(min_res, rr);
    const double c_big_shifted = fit.c_big * std::exp(min_res);

    // Minimal b with sup|phi_l| <= b l^2 over the retained spectrum.
    std::vector<double> sup_phi(static_cast<std::size_t>(model->rank()));
    double b = 0.0;
    for (int l = 1; l <= model->rank(); ++l) {
        double sup = 0.0;
        for (double x : xs)
            sup = std::max(sup, std::abs(model->nystrom_extend(l, std::span<const double>(&x, 1))));
        sup_phi[static_cast<std::size_t>(l - 1)] = sup;
        b = std::max(b, sup / (static_cast<double>(l) * l));
    }

    const std::string csv_path = out_path(out_dir, "spectrum.csv");
    CsvWriter csv(csv_path);
    csv.comment("config " + manifest.config_hash);
    csv.row({"l", "mu", "sup_phi", "eigen_bound", "index_bound_fitted", "b_l_sq"});
    bool monotone = true, growth_ok = true;
    for (int l = 1; l <= model->rank(); ++l) {
        const double mu = model->eigenvalues()[static_cast<std::size_t>(l - 1)];
        if (l > 1 && mu > model->eigenvalues()[static_cast<std::size_t>(l - 2)]) monotone = false;
        const double sup = sup_phi[static_cast<std::size_t>(l - 1)];
        const double b_l_sq = b * l * l;
        if (sup > b_l_sq * (1.0 + 1e-12)) growth_ok = false;
        csv.row({CsvWriter::field(l), CsvWriter::field(mu), CsvWriter::field(sup),
                 CsvWriter::field(eigenfunction_bound(kernel, mu)),
                 CsvWriter::field(eigenfunction_index_bound(kernel, l, c_big_shifted,
                                                            fit.c_small)),
                 CsvWriter::field(b_l_sq)});
    }

    manifest.checks.emplace_back("eigenvalues-non-increasing", monotone);
    manifest.checks.emplace_back("eigenfunction-quadratic-growth", growth_ok);
    manifest.outputs.push_back(csv_path);
    manifest.finished_at = timestamp();
    manifest.write(out_dir);
    return manifest;
}

// ---- mingap ----------------------------------------------------------------

RunManifest run_mingap(const json& config, const std::string& out_dir) {
    RunManifest manifest;
    manifest.command = "mingap";
    manifest.config_hash = config_hash(config);
    manifest.started_at = timestamp();

    const long long reps = config.at("replications").get<long long>();
    const std::uint64_t seed = config.value("seed", 20250810);
    const int bins = config.at("histogram_bins").get<int>();
    const Tolerances tol = Tolerances::from_config(config);

    const std::string hist_path = out_path(out_dir, "mingap_hist.csv");
    const std::string ks_path = out_path(out_dir, "mingap_ks.csv");
    const std::string exp_path = out_path(out_dir, "mingap_expectation.csv");

    CsvWriter hist(hist_path);
    hist.comment("config " + manifest.config_hash);
    hist.row({"n", "bin_lo", "bin_hi", "empirical_density", "density"});
    CsvWriter ks_csv(ks_path);
    ks_csv.comment("config " + manifest.config_hash);
    ks_csv.row({"n", "ks", "threshold", "passed"});

    // 0.002 is calibrated for 1e6 replications; the KS statistic scales as
    // 1/sqrt(R) for smaller exploratory runs.
    const double ks_threshold =
        0.002 * tol.scale * std::sqrt(1e6 / static_cast<double>(reps));
    bool ks_all = true;
    for (const auto& jn : config.at("n_values")) {
        const int n = jn.get<int>();
        const MinGapLaw law(n);
        std::vector<double> sample = sample_min_gap(law, seed + static_cast<unsigned>(n), reps);

        const double hi = 1.0 / (n - 1.0);
        std::vector<long long> counts(static_cast<std::size_t>(bins), 0);
        for (double v : sample) {
            auto b = static_cast<std::size_t>(v / hi * bins);
            if (b >= counts.size()) b = counts.size() - 1;
            ++counts[b];
        }
        for (int b = 0; b < bins; ++b) {
            const double lo_b = hi * b / bins, hi_b = hi * (b + 1) / bins;
            const double emp = static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                               static_cast<double>(reps) / (hi_b - lo_b);
            hist.row({CsvWriter::field(n), CsvWriter::field(lo_b), CsvWriter::field(hi_b),
                      CsvWriter::field(emp),
                      CsvWriter::field(min_gap_density(law, 0.5 * (lo_b + hi_b)))});
        }

        const double ks =
            ks_statistic(std::move(sample), [&](double m) { return min_gap_cdf(law, m); });
        const bool ok = ks <= ks_threshold;
        ks_all = ks_all && ok;
        ks_csv.row({CsvWriter::field(n), CsvWriter::field(ks), CsvWriter::field(ks_threshold),
                    CsvWriter::field(ok)});
    }

    CsvWriter exp_csv(exp_path);
    exp_csv.comment("config " + manifest.config_hash);
    exp_csv.row({"n", "c", "mc", "std_error", "lower", "lower_stated", "passed"});
    bool exp_all = true;
    for (const auto& jn : config.at("n_values")) {
        for (const auto& jc : config.at("c_values")) {
            const int n = jn.get<int>();
            const double c = jc.get<double>();
            const MinGapLaw law(n);
            const ExpGapBound res = expectation_exp_bound(
                law, c, seed + 977u * static_cast<unsigned>(n) + static_cast<unsigned>(c * 1000),
                reps);
            const bool ok = res.mc.value >= res.lower - tol.mc() * res.mc.std_error;
            exp_all = exp_all && ok;
            exp_csv.row({CsvWriter::field(n), CsvWriter::field(c), CsvWriter::field(res.mc.value),
                         CsvWriter::field(res.mc.std_error), CsvWriter::field(res.lower),
                         CsvWriter::field(res.lower_stated), CsvWriter::field(ok)});
        }
    }

    const std::string gram_path = out_path(out_dir, "mingap_gram.csv");
    CsvWriter gram_csv(gram_path);
    gram_csv.comment("config " + manifest.config_hash);
    gram_csv.row({"n", "sigma", "min_eigenvalue_mean", "std_error"});
    const double sigma = config.at("sigma").get<double>();
    const long long gram_reps = config.at("gram_replications").get<long long>();
    for (const auto& jn : config.at("gram_n_values")) {
        const int n = jn.get<int>();
        const McEstimate est =
            gram_min_eigen_experiment(sigma, n, seed + 31u * static_cast<unsigned>(n), gram_reps);
        gram_csv.row({CsvWriter::field(n), CsvWriter::field(sigma),
                      CsvWriter::field(est.value), CsvWriter::field(est.std_error)});
    }

    manifest.checks.emplace_back("ks-within-threshold", ks_all);
    manifest.checks.emplace_back("expectation-bound-holds", exp_all);
    manifest.outputs = {hist_path, ks_path, exp_path, gram_path};
    manifest.finished_at = timestamp();
    manifest.write(out_dir);
    return manifest;
}

// ---- nystrom ---------------------------------------------------------------

RunManifest run_nystrom(const json& config, const std::string& out_dir) {
    RunManifest manifest;
    manifest.command = "nystrom";
    manifest.config_hash = config_hash(config);
    manifest.started_at = timestamp();

    ScheduleConfig cfg;
    cfg.d = config.at("dim").get<int>();
    cfg.sigma = config.at("sigma").get<double>();
    cfg.n_values = config.at("n_values").get<std::vector<long long>>();
    for (const auto& js : config.at("schedules")) {
        const std::string s = js.get<std::string>();
        if (s == "1/n") cfg.lambda_schedules.push_back(LambdaSchedule::one_over_n);
        else if (s == "exp-root") cfg.lambda_schedules.push_back(LambdaSchedule::exp_root);
        else cfg.lambda_schedules.push_back(LambdaSchedule::fixed_tiny);
    }
    cfg.m_values = config.at("m_values").get<std::vector<int>>();
    cfg.seeds = config.at("seeds").get<std::vector<std::uint64_t>>();
    cfg.target_id = config.at("target").get<std::string>();
    cfg.noise = config.at("noise").get<double>();

    const std::vector<ScheduleRow> rows = schedule_experiment(cfg);

    const std::string csv_path = out_path(out_dir, "nystrom.csv");
    CsvWriter csv(csv_path);
    csv.comment("config " + manifest.config_hash);
    csv.row({"n", "d", "sigma", "lambda", "m", "seed", "train_rmse", "test_rmse",
             "jitter_level"});
    for (const ScheduleRow& r : rows)
        csv.row({CsvWriter::field(r.n), CsvWriter::field(r.d), CsvWriter::field(r.sigma),
                 CsvWriter::field(r.lambda), CsvWriter::field(r.m), CsvWriter::field(r.seed),
                 CsvWriter::field(r.train_rmse), CsvWriter::field(r.test_rmse),
                 CsvWriter::field(r.jitter_level)});

    const RadialKernelSpec kernel = gaussian_kernel(cfg.sigma, cfg.d);
    const std::string support_path = out_path(out_dir, "nystrom_support.csv");
    CsvWriter support(support_path);
    support.comment("config " + manifest.config_hash);
    support.row({"lambda", "required_support"});
    for (const auto& jl : config.at("support_lambdas")) {
        const double lambda = jl.get<double>();
        support.row({CsvWriter::field(lambda),
                     CsvWriter::field(required_support(kernel, lambda))});
    }

    manifest.checks.emplace_back("schedule-completed", true);
    manifest.outputs = {csv_path, support_path};
    manifest.finished_at = timestamp();
    manifest.write(out_dir);
    return manifest;
}

} // namespace kml
