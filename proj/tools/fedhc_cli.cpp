// Command-line front end for the fedhc simulator. Talks to the core only
// through the C API in fedhc.h, the same surface other bindings would use.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedhc.h"

namespace {

int exit_code_for(fedhc_status status) {
    switch (status) {
        case FEDHC_OK: return 0;
        case FEDHC_ERR_CONFIG: return 1;
        default: return 2;
    }
}

int fail(fedhc_status status) {
    std::fprintf(stderr, "error: %s\n", fedhc_last_error());
    return exit_code_for(status);
}

struct ConfigHandle {
    fedhc_config* ptr = nullptr;
    ~ConfigHandle() { fedhc_config_free(ptr); }
};

// Seed priority: --seed flag, then the config file, then FEDHC_SEED.
int apply_seed(fedhc_config* cfg, bool flag_set, std::uint64_t flag_seed, bool config_has_seed) {
    if (flag_set) return exit_code_for(fedhc_config_set_seed(cfg, flag_seed));
    if (config_has_seed) return 0;
    if (const char* env = std::getenv("FEDHC_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            std::fprintf(stderr, "error: FEDHC_SEED is not an integer: %s\n", env);
            return 1;
        }
        return exit_code_for(fedhc_config_set_seed(cfg, v));
    }
    return 0;
}

// TODO: expose seed presence through the C API instead of scanning the text.
bool file_contains_seed(const std::string& path) {
    // cheap check so an explicit config seed outranks the environment
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return false;
    std::string text;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    return text.find("\"seed\"") != std::string::npos;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedhc — hierarchical clustered federated learning over a LEO constellation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, method, k_list = "3,4,5", methods_list = "all";
    std::string run_dir, out_file;
    std::uint64_t seed = 0;
    bool seed_set = false;

    CLI::App* cmd_run = app.add_subcommand("run", "run one simulation and write its metrics");
    cmd_run->add_option("--config", config_path, "config JSON path")->required();
    cmd_run->add_option("--out", out_dir, "output directory")->required();
    cmd_run->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    cmd_run->add_option("--method", method, "method override (fedhc|c_fedavg|h_base|fedce)");

    CLI::App* cmd_compare =
        app.add_subcommand("compare", "sweep methods and cluster counts into a comparison table");
    cmd_compare->add_option("--config", config_path, "config JSON path")->required();
    cmd_compare->add_option("--out", out_dir, "output directory")->required();
    cmd_compare->add_option("--k", k_list, "cluster counts, comma separated (default 3,4,5)");
    cmd_compare->add_option("--methods", methods_list,
                            "methods, comma separated, or 'all' (default all)");
    cmd_compare->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });

    CLI::App* cmd_plotdata =
        app.add_subcommand("plotdata", "emit tidy (round, metric, value) rows from a run directory");
    cmd_plotdata->add_option("--run", run_dir, "run directory containing metrics.csv")->required();
    cmd_plotdata->add_option("--out", out_file, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_plotdata->parsed()) {
        fedhc_status s = fedhc_plotdata(run_dir.c_str(), out_file.c_str());
        if (s != FEDHC_OK) return fail(s);
        return 0;
    }

    ConfigHandle cfg;
    fedhc_status s = fedhc_config_load_file(config_path.c_str(), &cfg.ptr);
    if (s != FEDHC_OK) return fail(s);

    int seed_rc = apply_seed(cfg.ptr, seed_set, seed, file_contains_seed(config_path));
    if (seed_rc != 0) return seed_rc;

    if (cmd_run->parsed()) {
        if (!method.empty()) {
            s = fedhc_config_set_method(cfg.ptr, method.c_str());
            if (s != FEDHC_OK) return fail(s);
        }
        fedhc_result* result = nullptr;
        s = fedhc_run(cfg.ptr, out_dir.c_str(), config_path.c_str(), &result);
        if (s != FEDHC_OK) return fail(s);
        std::printf("rounds=%d reached_target=%d final_accuracy=%.4f T_c=%.6g s E_c=%.6g J\n",
                    fedhc_result_rounds_executed(result), fedhc_result_reached_target(result),
                    fedhc_result_final_accuracy(result), fedhc_result_total_time_s(result),
                    fedhc_result_total_energy_j(result));
        std::printf("wrote %s/metrics.csv, summary.json, manifest.json\n", out_dir.c_str());
        fedhc_result_free(result);
        return 0;
    }

    // compare
    std::vector<int> ks;
    for (const std::string& k : split_list(k_list)) {
        try {
            ks.push_back(std::stoi(k));
        } catch (const std::exception&) {
            std::fprintf(stderr, "error: --k entry is not an integer: %s\n", k.c_str());
            return 1;
        }
    }
    std::vector<std::string> method_names;
    if (methods_list == "all")
        method_names = {"fedhc", "c_fedavg", "h_base", "fedce"};
    else
        method_names = split_list(methods_list);
    std::vector<const char*> method_ptrs;
    for (const std::string& m : method_names) method_ptrs.push_back(m.c_str());

    s = fedhc_compare(cfg.ptr, ks.data(), ks.size(), method_ptrs.data(), method_ptrs.size(),
                      out_dir.c_str());
    if (s != FEDHC_OK) return fail(s);
    std::printf("wrote %s/table.csv and table.md\n", out_dir.c_str());
    return 0;
}
