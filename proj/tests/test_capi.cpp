// Exercises the shared library strictly through the public C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <biovolt/biovolt.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace {

struct ConfigHandle {
  bv_config* cfg = nullptr;
  ConfigHandle() { REQUIRE(bv_config_create(&cfg) == BV_OK); }
  ~ConfigHandle() { bv_config_destroy(cfg); }
};

struct EnvHandle {
  bv_env* env = nullptr;
  ~EnvHandle() { bv_env_destroy(env); }
};

} // namespace

TEST_CASE("version string and error buffer are always valid pointers") {
  CHECK(bv_version() != nullptr);
  CHECK(std::string(bv_version()).find('.') != std::string::npos);
  CHECK(bv_last_error() != nullptr);
}

TEST_CASE("null arguments are rejected without touching outputs") {
  CHECK(bv_config_create(nullptr) == BV_ERR_INVALID);
  CHECK(bv_config_set(nullptr, "a=1") == BV_ERR_INVALID);
  CHECK(bv_config_load(nullptr, nullptr) == BV_ERR_INVALID);
  CHECK(bv_env_create(nullptr, 1, nullptr) == BV_ERR_INVALID);
  CHECK(bv_env_obs_dim(nullptr) == -1);
  CHECK(bv_env_action_dim(nullptr) == -1);
  CHECK(std::string(bv_last_error()).empty() == false);
  bv_config_destroy(nullptr);  // must be a safe no-op
  bv_env_destroy(nullptr);
}

TEST_CASE("config handles apply overrides and hash deterministically") {
  ConfigHandle a, b;
  CHECK(bv_config_set(a.cfg, "scenario=cell-homeostasis") == BV_OK);
  CHECK(bv_config_set(b.cfg, "scenario=cell-homeostasis") == BV_OK);
  CHECK(bv_config_digest(a.cfg) == bv_config_digest(b.cfg));
  CHECK(bv_config_set(a.cfg, "horizon=25") == BV_OK);
  CHECK(bv_config_digest(a.cfg) != bv_config_digest(b.cfg));
  CHECK(bv_config_set(a.cfg, "no-equals-sign") == BV_ERR_CONFIG);
  CHECK(bv_config_load("no_such_file.toml", &a.cfg) == BV_ERR_IO);
}

TEST_CASE("an environment runs a full episode through the C surface") {
  ConfigHandle cfg;
  REQUIRE(bv_config_set(cfg.cfg, "scenario=cell-homeostasis") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "horizon=5") == BV_OK);

  EnvHandle h;
  REQUIRE(bv_env_create(cfg.cfg, 7, &h.env) == BV_OK);
  const int odim = bv_env_obs_dim(h.env);
  const int adim = bv_env_action_dim(h.env);
  REQUIRE(odim > 0);
  REQUIRE(adim == 1);

  std::vector<double> obs(odim);
  REQUIRE(bv_env_reset(h.env, 7, obs.data(), obs.size()) == BV_OK);

  const double action[] = {-0.08};
  double reward = 0.0;
  int done = 0;
  int steps = 0;
  while (done == 0) {
    REQUIRE(bv_env_step(h.env, action, 1, obs.data(), obs.size(), &reward, &done) == BV_OK);
    ++steps;
    REQUIRE(steps <= 5);
  }
  CHECK(steps == 5);

  // Contract violations surface as BV_ERR_INVALID with a message.
  CHECK(bv_env_step(h.env, action, 1, obs.data(), obs.size(), &reward, &done) == BV_ERR_INVALID);
  CHECK(std::string(bv_last_error()).find("SteppedAfterDone") != std::string::npos);

  REQUIRE(bv_env_reset(h.env, 7, obs.data(), obs.size()) == BV_OK);
  const double bad[] = {99.0};
  CHECK(bv_env_step(h.env, bad, 1, obs.data(), obs.size(), &reward, &done) == BV_ERR_INVALID);
  CHECK(std::string(bv_last_error()).find("ActionOutOfRange") != std::string::npos);
  CHECK(bv_env_reset(h.env, 7, obs.data(), 1) == BV_ERR_INVALID);  // buffer too small
}

TEST_CASE("resetting with the same seed reproduces the episode exactly") {
  ConfigHandle cfg;
  REQUIRE(bv_config_set(cfg.cfg, "scenario=tissue-pattern") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "horizon=4") == BV_OK);
  EnvHandle h;
  REQUIRE(bv_env_create(cfg.cfg, 3, &h.env) == BV_OK);
  const int odim = bv_env_obs_dim(h.env);
  const int adim = bv_env_action_dim(h.env);
  const std::vector<double> action(adim, -0.06);

  auto rollout = [&] {
    std::vector<double> obs(odim);
    std::vector<double> trace;
    REQUIRE(bv_env_reset(h.env, 3, obs.data(), obs.size()) == BV_OK);
    double reward = 0.0;
    int done = 0;
    for (int i = 0; i < 4; ++i) {
      REQUIRE(bv_env_step(h.env, action.data(), action.size(), obs.data(), obs.size(), &reward,
                          &done) == BV_OK);
      trace.push_back(reward);
      trace.insert(trace.end(), obs.begin(), obs.end());
    }
    return trace;
  };
  CHECK(rollout() == rollout());
}

TEST_CASE("the simulate command writes its artifacts") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "bv_capi_sim";
  fs::remove_all(dir);

  ConfigHandle cfg;
  REQUIRE(bv_config_set(cfg.cfg, "scenario=cell-homeostasis") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "horizon=5") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "policy=constant") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "policy.value=-0.08") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "episodes=2") == BV_OK);
  REQUIRE(bv_config_set(cfg.cfg, "seed=5") == BV_OK);
  REQUIRE(bv_cmd_simulate(cfg.cfg, dir.string().c_str()) == BV_OK);

  CHECK(fs::exists(dir / "episode_5.jsonl"));
  CHECK(fs::exists(dir / "episode_5_steps.csv"));
  CHECK(fs::exists(dir / "episode_6.jsonl"));
  CHECK(fs::exists(dir / "returns.csv"));
  fs::remove_all(dir);

  // A bad scenario comes back as a config failure, not a crash.
  ConfigHandle bad;
  REQUIRE(bv_config_set(bad.cfg, "scenario=unknown") == BV_OK);
  CHECK(bv_cmd_simulate(bad.cfg, dir.string().c_str()) == BV_ERR_CONFIG);
}
