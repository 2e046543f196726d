#include "biovolt/biovolt.h"

#include <cstring>
#include <string>

#include "config.hpp"
#include "env.hpp"
#include "errors.hpp"
#include "logio.hpp"
#include "runners.hpp"

using namespace biovolt;

struct bv_config {
  Config cfg;
};

struct bv_env {
  Environment env;
};

namespace {

thread_local std::string g_last_error;

bv_status status_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Config: return BV_ERR_CONFIG;
    case ErrorCode::Io: return BV_ERR_IO;
    case ErrorCode::Numerical: return BV_ERR_NUMERIC;
    case ErrorCode::InvalidArgument: return BV_ERR_INVALID;
  }
  return BV_ERR_UNKNOWN;
}

template <typename Fn>
bv_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BV_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BV_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown failure";
    return BV_ERR_UNKNOWN;
  }
}

bv_status fail_invalid(const char* msg) {
  g_last_error = msg;
  return BV_ERR_INVALID;
}

} // namespace

extern "C" {

const char* bv_version(void) { return kArtifactVersion; }

const char* bv_last_error(void) { return g_last_error.c_str(); }

bv_status bv_config_create(bv_config** out) {
  if (out == nullptr) return fail_invalid("bv_config_create: out is NULL");
  return guarded([&] { *out = new bv_config{}; });
}

bv_status bv_config_load(const char* path, bv_config** out) {
  if (path == nullptr || out == nullptr) return fail_invalid("bv_config_load: NULL argument");
  return guarded([&] { *out = new bv_config{Config::from_file(path)}; });
}

bv_status bv_config_set(bv_config* cfg, const char* key_equals_value) {
  if (cfg == nullptr || key_equals_value == nullptr) {
    return fail_invalid("bv_config_set: NULL argument");
  }
  return guarded([&] { cfg->cfg.apply_override(key_equals_value); });
}

bv_status bv_config_apply_env(bv_config* cfg) {
  if (cfg == nullptr) return fail_invalid("bv_config_apply_env: cfg is NULL");
  return guarded([&] { cfg->cfg.apply_env_overrides(); });
}

uint64_t bv_config_digest(const bv_config* cfg) {
  return cfg == nullptr ? 0 : cfg->cfg.digest();
}

void bv_config_destroy(bv_config* cfg) { delete cfg; }

bv_status bv_env_create(const bv_config* cfg, uint64_t seed, bv_env** out) {
  if (cfg == nullptr || out == nullptr) return fail_invalid("bv_env_create: NULL argument");
  return guarded([&] { *out = new bv_env{Environment(scenario_from_config(cfg->cfg), seed)}; });
}

int bv_env_obs_dim(const bv_env* env) { return env == nullptr ? -1 : env->env.obs_dim(); }

int bv_env_action_dim(const bv_env* env) { return env == nullptr ? -1 : env->env.action_dim(); }

bv_status bv_env_reset(bv_env* env, uint64_t seed, double* obs, size_t obs_len) {
  if (env == nullptr || obs == nullptr) return fail_invalid("bv_env_reset: NULL argument");
  if (obs_len < static_cast<size_t>(env->env.obs_dim())) {
    return fail_invalid("bv_env_reset: obs buffer too small");
  }
  return guarded([&] {
    const std::vector<double> o = env->env.reset(seed);
    std::memcpy(obs, o.data(), o.size() * sizeof(double));
  });
}

bv_status bv_env_step(bv_env* env, const double* action, size_t action_len, double* obs,
                      size_t obs_len, double* reward, int* done) {
  if (env == nullptr || action == nullptr || obs == nullptr || reward == nullptr ||
      done == nullptr) {
    return fail_invalid("bv_env_step: NULL argument");
  }
  if (obs_len < static_cast<size_t>(env->env.obs_dim())) {
    return fail_invalid("bv_env_step: obs buffer too small");
  }
  return guarded([&] {
    const StepResult r = env->env.step(std::vector<double>(action, action + action_len));
    std::memcpy(obs, r.observation.data(), r.observation.size() * sizeof(double));
    *reward = r.reward;
    *done = r.done ? 1 : 0;
  });
}

void bv_env_destroy(bv_env* env) { delete env; }

bv_status bv_cmd_simulate(const bv_config* cfg, const char* out_dir) {
  if (cfg == nullptr || out_dir == nullptr) return fail_invalid("bv_cmd_simulate: NULL argument");
  return guarded([&] { run_simulate(cfg->cfg, out_dir); });
}

bv_status bv_cmd_train(const bv_config* cfg, const char* out_dir) {
  if (cfg == nullptr || out_dir == nullptr) return fail_invalid("bv_cmd_train: NULL argument");
  return guarded([&] { run_train(cfg->cfg, out_dir); });
}

bv_status bv_cmd_eval(const bv_config* cfg, const char* checkpoint, const char* out_dir,
                      double* mean_return) {
  if (cfg == nullptr || out_dir == nullptr) return fail_invalid("bv_cmd_eval: NULL argument");
  return guarded([&] {
    const double r = run_eval(cfg->cfg, checkpoint == nullptr ? "" : checkpoint, out_dir);
    if (mean_return != nullptr) *mean_return = r;
  });
}

bv_status bv_cmd_causal(const bv_config* cfg, const char* out_dir) {
  if (cfg == nullptr || out_dir == nullptr) return fail_invalid("bv_cmd_causal: NULL argument");
  return guarded([&] { run_causal(cfg->cfg, out_dir); });
}

} // extern "C"
