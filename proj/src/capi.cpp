#include "fedhc.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fedhc/config.hpp"
#include "fedhc/errors.hpp"
#include "fedhc/sim.hpp"

struct fedhc_config {
    fedhc::SimConfig cfg;
};

struct fedhc_result {
    fedhc::RunResult res;
};

namespace {

thread_local std::string g_last_error;

fedhc_status fail(fedhc_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

fedhc_status status_for(const fedhc::Error& e) {
    switch (e.code()) {
        case fedhc::ErrorCode::ConfigError:
            return FEDHC_ERR_CONFIG;
        case fedhc::ErrorCode::IoError:
        case fedhc::ErrorCode::MissingMetrics:
        case fedhc::ErrorCode::BadMagic:
        case fedhc::ErrorCode::TruncatedFile:
            return FEDHC_ERR_IO;
        default:
            return FEDHC_ERR_RUNTIME;
    }
}

template <typename Fn>
fedhc_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FEDHC_OK;
    } catch (const fedhc::Error& e) {
        return fail(status_for(e), e.what());
    } catch (const std::exception& e) {
        return fail(FEDHC_ERR_RUNTIME, e.what());
    }
}

} // namespace

extern "C" {

const char* fedhc_version(void) { return "0.1.0"; }

const char* fedhc_last_error(void) { return g_last_error.c_str(); }

fedhc_status fedhc_config_load_file(const char* path, fedhc_config** out) {
    if (!path || !out) return fail(FEDHC_ERR_ARG, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new fedhc_config{fedhc::load_config_file(path)}; });
}

fedhc_status fedhc_config_load_string(const char* json_text, fedhc_config** out) {
    if (!json_text || !out) return fail(FEDHC_ERR_ARG, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new fedhc_config{fedhc::load_config_string(json_text)}; });
}

fedhc_status fedhc_config_set_seed(fedhc_config* config, uint64_t seed) {
    if (!config) return fail(FEDHC_ERR_ARG, "null config");
    config->cfg.seed = seed;
    return FEDHC_OK;
}

fedhc_status fedhc_config_set_method(fedhc_config* config, const char* method) {
    if (!config || !method) return fail(FEDHC_ERR_ARG, "null argument");
    return guarded([&] { config->cfg.method = fedhc::method_from_name(method); });
}

fedhc_status fedhc_config_set_k(fedhc_config* config, int k) {
    if (!config) return fail(FEDHC_ERR_ARG, "null config");
    return guarded([&] {
        fedhc::SimConfig next = config->cfg;
        next.k = k;
        fedhc::validate_config(next);
        config->cfg = next;
    });
}

void fedhc_config_free(fedhc_config* config) { delete config; }

fedhc_status fedhc_run(const fedhc_config* config, const char* out_dir, const char* config_path,
                       fedhc_result** out_result) {
    if (!config) return fail(FEDHC_ERR_ARG, "null config");
    if (out_result) *out_result = nullptr;
    return guarded([&] {
        fedhc::RunResult res = fedhc::run(config->cfg);
        if (out_dir)
            fedhc::write_run_outputs(config->cfg, res, out_dir, config_path ? config_path : "");
        if (out_result) *out_result = new fedhc_result{std::move(res)};
    });
}

double fedhc_result_final_accuracy(const fedhc_result* r) { return r ? r->res.final_accuracy : -1.0; }
int fedhc_result_rounds_executed(const fedhc_result* r) { return r ? r->res.rounds_executed : -1; }
int fedhc_result_rounds_to_target(const fedhc_result* r) { return r ? r->res.rounds_to_target : -1; }
int fedhc_result_reached_target(const fedhc_result* r) {
    return r ? (r->res.reached_target ? 1 : 0) : -1;
}
double fedhc_result_total_time_s(const fedhc_result* r) { return r ? r->res.total_tc_sum_s : -1.0; }
double fedhc_result_total_time_parallel_s(const fedhc_result* r) {
    return r ? r->res.total_tc_parallel_s : -1.0;
}
double fedhc_result_total_energy_j(const fedhc_result* r) { return r ? r->res.total_e_c_j : -1.0; }
uint64_t fedhc_result_partition_hash(const fedhc_result* r) {
    return r ? r->res.partition_hash : 0;
}
void fedhc_result_free(fedhc_result* result) { delete result; }

fedhc_status fedhc_compare(const fedhc_config* config, const int* k_values, size_t n_k,
                           const char* const* methods, size_t n_methods, const char* out_dir) {
    if (!config || !k_values || n_k == 0 || !methods || n_methods == 0 || !out_dir)
        return fail(FEDHC_ERR_ARG, "null or empty argument");
    return guarded([&] {
        std::vector<int> ks(k_values, k_values + n_k);
        std::vector<fedhc::Method> ms;
        for (size_t i = 0; i < n_methods; ++i) ms.push_back(fedhc::method_from_name(methods[i]));
        std::vector<fedhc::SweepRow> rows = fedhc::sweep_k(config->cfg, ks, ms);

        std::filesystem::create_directories(out_dir);
        std::ofstream csv(std::string(out_dir) + "/table.csv", std::ios::binary);
        if (!csv) throw fedhc::Error(fedhc::ErrorCode::IoError, "cannot write table.csv");
        csv << fedhc::sweep_to_csv(rows);
        std::ofstream md(std::string(out_dir) + "/table.md", std::ios::binary);
        if (!md) throw fedhc::Error(fedhc::ErrorCode::IoError, "cannot write table.md");
        md << fedhc::sweep_to_markdown(rows);
    });
}

fedhc_status fedhc_plotdata(const char* run_dir, const char* out_csv) {
    if (!run_dir || !out_csv) return fail(FEDHC_ERR_ARG, "null argument");
    return guarded([&] {
        std::string tidy = fedhc::plotdata_from_dir(run_dir);
        std::ofstream f(out_csv, std::ios::binary);
        if (!f) throw fedhc::Error(fedhc::ErrorCode::IoError, std::string("cannot write ") + out_csv);
        f << tidy;
    });
}

} // extern "C"
