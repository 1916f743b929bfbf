/* meco - meme ecology toolkit, C API.
 *
 * All functionality is reachable through an opaque configuration handle and
 * four pipeline entry points. Functions return MECO_OK on success; on any
 * other status, meco_last_error() holds a message for the calling thread.
 */
#ifndef MECO_H
#define MECO_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum meco_status {
    MECO_OK = 0,
    MECO_EINVAL = 1,    /* invalid argument or configuration */
    MECO_EIO = 2,       /* file system failure */
    MECO_EPARSE = 3,    /* malformed input */
    MECO_EVERSION = 4,  /* count cache version mismatch; re-scan required */
    MECO_EEMPTY = 5,    /* required data is empty */
    MECO_EINTERNAL = 6  /* internal invariant violation */
} meco_status;

const char* meco_version(void);

/* Message for the most recent failure on this thread; "" when none. */
const char* meco_last_error(void);

typedef struct meco_config meco_config;

meco_config* meco_config_new(void);
void meco_config_free(meco_config* config);

/* Sets one configuration key (same keys as the key=value config file):
 *   input, phrases, background, background_sample, background_min_count,
 *   seed, window, alpha, gap_tolerance, peak_window, bins_per_decade,
 *   count_mode, mrr_mode, out, shards, dump_series, dump_counts_csv.
 * "input" appends; other keys overwrite. */
meco_status meco_config_set(meco_config* config, const char* key,
                            const char* value);

/* Applies a key=value config file; later meco_config_set calls win. */
meco_status meco_config_load_file(meco_config* config, const char* path);

typedef struct meco_scan_stats {
    uint64_t documents;
    uint64_t posts;
    uint64_t comments;
    uint64_t skipped_records;
    uint64_t tokens;
    uint64_t input_bytes;
    double elapsed_seconds;
} meco_scan_stats;

/* Scans the corpus and writes the MEC1 count cache plus scan_summary.json
 * into the configured output directory. stats may be NULL. */
meco_status meco_scan(const meco_config* config, meco_scan_stats* stats);

/* Computes every metrics table from the count cache in the output dir. */
meco_status meco_metrics(const meco_config* config);

/* Metrics plus a human-readable report.txt. */
meco_status meco_report(const meco_config* config);

/* Generates corpus.ndjson, ground-truth CSVs, phrases.txt and background.txt
 * from a JSON plant spec. */
meco_status meco_synth(const char* spec_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* MECO_H */
