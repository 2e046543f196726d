/* C API for the biovolt bioelectric tissue simulator.
 *
 * All functions return bv_status; on any failure bv_last_error() holds a
 * human-readable message for the calling thread. Handles are opaque and
 * must be released with the matching _destroy function.
 */
#ifndef BIOVOLT_H
#define BIOVOLT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  BV_OK = 0,
  BV_ERR_CONFIG = 1,  /* bad configuration or arguments to a command */
  BV_ERR_IO = 2,      /* file system / parsing failure */
  BV_ERR_NUMERIC = 3, /* numerical failure (instability, divergence) */
  BV_ERR_INVALID = 4, /* contract violation (bad action, stepped-after-done) */
  BV_ERR_UNKNOWN = 5
} bv_status;

const char* bv_version(void);
const char* bv_last_error(void);

/* ---- configuration ---- */

typedef struct bv_config bv_config;

bv_status bv_config_create(bv_config** out);
bv_status bv_config_load(const char* path, bv_config** out);
/* Apply one "dotted.key=value" override. */
bv_status bv_config_set(bv_config* cfg, const char* key_equals_value);
/* Fold in BIOVOLT_* environment variables. */
bv_status bv_config_apply_env(bv_config* cfg);
uint64_t bv_config_digest(const bv_config* cfg);
void bv_config_destroy(bv_config* cfg);

/* ---- episodic environment ---- */

typedef struct bv_env bv_env;

/* The config selects and parameterises the scenario ("scenario" key plus
 * overrides). The environment starts un-reset. */
bv_status bv_env_create(const bv_config* cfg, uint64_t seed, bv_env** out);
int bv_env_obs_dim(const bv_env* env);
int bv_env_action_dim(const bv_env* env);
/* obs must hold bv_env_obs_dim doubles. */
bv_status bv_env_reset(bv_env* env, uint64_t seed, double* obs, size_t obs_len);
/* action holds bv_env_action_dim clamp voltages within the scenario's
 * [v_min, v_max]; out-of-range actions fail with BV_ERR_INVALID. */
bv_status bv_env_step(bv_env* env, const double* action, size_t action_len, double* obs,
                      size_t obs_len, double* reward, int* done);
void bv_env_destroy(bv_env* env);

/* ---- command front-ends (same drivers the CLI uses) ---- */

bv_status bv_cmd_simulate(const bv_config* cfg, const char* out_dir);
bv_status bv_cmd_train(const bv_config* cfg, const char* out_dir);
/* checkpoint may be NULL/empty when the config carries eval.checkpoint. */
bv_status bv_cmd_eval(const bv_config* cfg, const char* checkpoint, const char* out_dir,
                      double* mean_return);
bv_status bv_cmd_causal(const bv_config* cfg, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* BIOVOLT_H */
