#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kml/csvio.hpp"
#include "kml/errors.hpp"
#include "kml/experiments.hpp"
#include "kml/verify.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    long long seed = -1;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON experiment configuration");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--jobs", opts.jobs, "parallel cells");
}

kml::json assemble_config(const std::string& command, const CommonOpts& opts) {
    kml::json user;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw kml::config_error("cannot open config file " + opts.config_path);
        in >> user;
    }
    kml::json config = kml::load_config(command, user);
    if (opts.seed >= 0) config["seed"] = opts.seed;
    if (opts.jobs > 0) config["jobs"] = opts.jobs;
    return config;
}

int run_experiment(const std::string& command, const CommonOpts& opts) {
    const kml::json config = assemble_config(command, opts);
    kml::RunManifest manifest;
    if (command == "moment") manifest = kml::run_moment(config, opts.out_dir);
    else if (command == "bounds") manifest = kml::run_bounds(config, opts.out_dir);
    else if (command == "spectrum") manifest = kml::run_spectrum(config, opts.out_dir);
    else if (command == "mingap") manifest = kml::run_mingap(config, opts.out_dir);
    else manifest = kml::run_nystrom(config, opts.out_dir);

    bool ok = true;
    for (const auto& [id, passed] : manifest.checks) {
        std::cout << (passed ? "[PASS] " : "[FAIL] ") << id << "\n";
        ok = ok && passed;
    }
    for (const std::string& note : manifest.notes) std::cout << "note: " << note << "\n";
    std::cout << "outputs in " << opts.out_dir << " (config " << manifest.config_hash << ")\n";
    return ok ? 0 : 1;
}

int run_verify(const std::vector<std::string>& only, const CommonOpts& opts,
               bool write_summary) {
    kml::Tolerances tol;
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw kml::config_error("cannot open config file " + opts.config_path);
        kml::json cfg;
        in >> cfg;
        tol = kml::Tolerances::from_config(cfg);
    }
    tol.scale = kml::Tolerances::env_scale();
    const auto results = kml::run_acceptance(tol, only);
    bool ok = true;
    for (const auto& r : results) {
        std::printf("[%s] %s: %s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.id.c_str(),
                    r.title.c_str(), r.seconds);
        if (!r.passed)
            for (const auto& d : r.details)
                if (d.rfind("FAIL", 0) == 0) std::printf("    %s\n", d.c_str());
        ok = ok && r.passed;
    }
    if (write_summary) {
        std::filesystem::create_directories(opts.out_dir);
        kml::CsvWriter csv(opts.out_dir + "/verify.csv");
        csv.row({"id", "title", "passed", "seconds"});
        for (const auto& r : results)
            csv.row({r.id, r.title, kml::CsvWriter::field(r.passed),
                     kml::CsvWriter::field(r.seconds)});
    }
    if (!ok) {
        for (const auto& r : results)
            if (!r.passed) std::printf("verification failed at criterion %s\n", r.id.c_str());
    }
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minimal moment functions, Gaussian-kernel spectral bounds and their "
                 "numerical verification"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<std::string> only;

    for (const char* name : {"moment", "bounds", "spectrum", "mingap", "nystrom"}) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        add_common(cmd, opts);
    }
    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--only", only, "criterion ids to run (default: all)");
    add_common(verify, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "verify")
            return run_verify(only, opts, app.get_subcommands().front()->count("--out") > 0);
        return run_experiment(command, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
