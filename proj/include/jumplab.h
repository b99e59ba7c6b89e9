/* C interface to the jumplab pipeline. All functions return a status code
 * (JL_OK on success) or a pointer that is NULL on failure; jl_last_error()
 * describes the most recent failure on the calling thread. Returned strings
 * are owned by the library and valid until the next call on the same thread.
 */
#ifndef JUMPLAB_H
#define JUMPLAB_H

#ifdef __cplusplus
extern "C" {
#endif

enum jl_status {
    JL_OK = 0,
    JL_INPUT_ERROR = 1,   /* missing file, malformed record, bad parameter */
    JL_REFUSAL = 2,       /* analysis declined: insufficient tail, missing artifacts */
    JL_INTERNAL = 3
};

typedef struct jl_config jl_config;

const char* jl_version(void);

/* A fresh config holds the documented defaults (the synthetic oracle
 * scenario). NULL only on allocation failure. */
jl_config* jl_config_new(void);
void jl_config_free(jl_config* cfg);

/* Merge a sectioned key=value config file into cfg. */
int jl_config_load(jl_config* cfg, const char* path);

/* Apply one "section.key=value" override (wins over file values). */
int jl_config_set(jl_config* cfg, const char* assignment);

/* Current value of one dotted key, NULL if the key is unknown. */
const char* jl_config_get(const jl_config* cfg, const char* key);

/* Static help text: one "key (type)  description" line per parameter. */
const char* jl_config_help(void);

/* Run one command: synth | ingest | detect-jumps | event-study | collective |
 * taildep | report. Artifacts land under the configured output directory. */
int jl_run(const jl_config* cfg, const char* command);

/* Message of the last failing call on this thread ("" if none). */
const char* jl_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* JUMPLAB_H */
