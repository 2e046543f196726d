#include <doctest.h>

#include <cstdlib>

#include "config.hpp"
#include "errors.hpp"
#include "logio.hpp"
#include "rng.hpp"

using namespace biovolt;

TEST_CASE("config parses sections, comments and quoted values") {
  const Config cfg = Config::from_string(
      "# top comment\n"
      "scenario = cell-homeostasis\n"
      "[train]\n"
      "steps = 5000  # inline comment\n"
      "actor_lr = 3e-4\n"
      "kind = \"td3\"\n"
      "[weights]\n"
      "bioelec = 1e17\n");
  CHECK(cfg.get_string("scenario", "") == "cell-homeostasis");
  CHECK(cfg.get_int("train.steps", 0) == 5000);
  CHECK(cfg.get_double("train.actor_lr", 0.0) == 3e-4);
  CHECK(cfg.get_string("train.kind", "") == "td3");
  CHECK(cfg.get_double("weights.bioelec", 0.0) == 1e17);
  CHECK_FALSE(cfg.has("train.missing"));
  CHECK(cfg.get_int("train.missing", 7) == 7);
}

TEST_CASE("config rejects malformed input with line numbers") {
  CHECK_THROWS_WITH_AS(Config::from_string("[broken\nx = 1\n"), doctest::Contains("line 1"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::from_string("x = 1\nnot a pair\n"), doctest::Contains("line 2"),
                       ConfigError);
  const Config cfg = Config::from_string("x = banana\n");
  CHECK_THROWS_AS(cfg.get_double("x", 0.0), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("x", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("x", false), ConfigError);
}

TEST_CASE("overrides and list parsing") {
  Config cfg;
  cfg.apply_override("train.hidden=[32, 16]");
  cfg.apply_override("env.dt = 0.05");
  const std::vector<double> hidden = cfg.get_doubles("train.hidden", {});
  REQUIRE(hidden.size() == 2);
  CHECK(hidden[0] == 32.0);
  CHECK(hidden[1] == 16.0);
  CHECK(cfg.get_double("env.dt", 0.0) == 0.05);
  CHECK_THROWS_AS(cfg.apply_override("no_equals_sign"), ConfigError);
}

TEST_CASE("BIOVOLT_ environment variables map to dotted lowercase paths") {
  setenv("BIOVOLT_TRAIN__STEPS", "123", 1);
  setenv("BIOVOLT_SCENARIO", "tissue-pattern", 1);
  Config cfg;
  cfg.apply_env_overrides();
  CHECK(cfg.get_int("train.steps", 0) == 123);
  CHECK(cfg.get_string("scenario", "") == "tissue-pattern");
  unsetenv("BIOVOLT_TRAIN__STEPS");
  unsetenv("BIOVOLT_SCENARIO");
}

TEST_CASE("canonical form is sorted and the digest is stable under entry order") {
  Config a;
  a.set("b.key", "2");
  a.set("a.key", "1");
  Config b;
  b.set("a.key", "1");
  b.set("b.key", "2");
  CHECK(a.canonical() == "a.key = 1\nb.key = 2\n");
  CHECK(a.digest() == b.digest());
  b.set("c.key", "3");
  CHECK(a.digest() != b.digest());
}

TEST_CASE("fnv1a64 matches its published reference values") {
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("rng streams are reproducible and distributions behave") {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  Rng r(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000.0 == doctest::Approx(0.5).epsilon(0.02));
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.uniform_index(7) < 7);
  }
  double nsum = 0.0, nsq = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double n = r.normal();
    nsum += n;
    nsq += n * n;
  }
  CHECK(nsum / 20000.0 == doctest::Approx(0.0).epsilon(0.05));
  CHECK(nsq / 20000.0 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("derived child seeds decorrelate sibling streams") {
  Rng root(1);
  Rng c1(root.derive(1));
  Rng c2(root.derive(2));
  CHECK(c1.next_u64() != c2.next_u64());
}

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, -1.0 / 3.0, 1e-300, 123456789.123456789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}
