#include "meco.h"

#include <exception>
#include <string>

#include "error.hpp"
#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

meco_status status_of(meco::ErrorCode code) {
    switch (code) {
    case meco::ErrorCode::invalid_argument: return MECO_EINVAL;
    case meco::ErrorCode::io: return MECO_EIO;
    case meco::ErrorCode::parse: return MECO_EPARSE;
    case meco::ErrorCode::version_mismatch: return MECO_EVERSION;
    case meco::ErrorCode::empty_input: return MECO_EEMPTY;
    case meco::ErrorCode::internal: return MECO_EINTERNAL;
    }
    return MECO_EINTERNAL;
}

template <typename Fn>
meco_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return MECO_OK;
    } catch (const meco::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MECO_EINTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MECO_EINTERNAL;
    }
}

} // namespace

struct meco_config {
    meco::RunConfig config;
};

extern "C" {

const char* meco_version(void) { return meco::version_string(); }

const char* meco_last_error(void) { return g_last_error.c_str(); }

meco_config* meco_config_new(void) { return new (std::nothrow) meco_config(); }

void meco_config_free(meco_config* config) { delete config; }

meco_status meco_config_set(meco_config* config, const char* key,
                            const char* value) {
    if (!config || !key || !value) {
        g_last_error = "null argument";
        return MECO_EINVAL;
    }
    return guarded([&] { config->config.set(key, value); });
}

meco_status meco_config_load_file(meco_config* config, const char* path) {
    if (!config || !path) {
        g_last_error = "null argument";
        return MECO_EINVAL;
    }
    return guarded([&] { config->config.load_file(path); });
}

meco_status meco_scan(const meco_config* config, meco_scan_stats* stats) {
    if (!config) {
        g_last_error = "null config";
        return MECO_EINVAL;
    }
    return guarded([&] {
        meco::ScanOutcome outcome = meco::cmd_scan(config->config);
        if (stats) {
            stats->documents = outcome.stats.documents;
            stats->posts = outcome.stats.posts;
            stats->comments = outcome.stats.comments;
            stats->skipped_records = outcome.stats.skipped;
            stats->tokens = outcome.stats.tokens;
            stats->input_bytes = outcome.stats.bytes;
            stats->elapsed_seconds = outcome.stats.elapsed_seconds;
        }
    });
}

meco_status meco_metrics(const meco_config* config) {
    if (!config) {
        g_last_error = "null config";
        return MECO_EINVAL;
    }
    return guarded([&] { meco::cmd_metrics(config->config); });
}

meco_status meco_report(const meco_config* config) {
    if (!config) {
        g_last_error = "null config";
        return MECO_EINVAL;
    }
    return guarded([&] { meco::cmd_report(config->config); });
}

meco_status meco_synth(const char* spec_path, const char* out_dir) {
    if (!spec_path || !out_dir) {
        g_last_error = "null argument";
        return MECO_EINVAL;
    }
    return guarded([&] { meco::cmd_synth(spec_path, out_dir); });
}

} // extern "C"
