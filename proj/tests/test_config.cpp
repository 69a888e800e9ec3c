#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "tempctx/config.hpp"
#include "tempctx/error.hpp"

using namespace tempctx;

TEST_CASE("defaults") {
  const RunConfig c;
  const auto s = c.sampler();
  CHECK(s.window == 2);
  CHECK(s.strides == std::vector<std::size_t>{1, 2, 4});
  CHECK(s.negatives_per_target == 4);
  const auto t = c.train();
  CHECK(t.lr0 == 0.01);
  CHECK(t.batch_size == 256);
  CHECK(t.iterations == 5000);
  CHECK(t.config_digest == c.digest());
  const auto y = c.synth();
  CHECK(y.num_events == 5);
  CHECK(y.states_per_event == 6);
  CHECK(y.alias_pairs.size() == 2);
  CHECK(y.alias_pairs[1].first == StateRef{2, 1});
}

TEST_CASE("config file parsing") {
  tempctx::testing::TempDir dir("cfg");
  std::ofstream(dir / "a.cfg") << "# comment\n seed = 7 \n\nvariant=no_future  # trailing\nstrides=1,3\n";
  const auto c = RunConfig::from_file(dir / "a.cfg");
  CHECK(c.seed() == 7);
  CHECK(c.sampler().variant == ContextVariant::no_future);
  CHECK(c.sampler().strides == std::vector<std::size_t>{1, 3});

  std::ofstream(dir / "b.cfg") << "learning_rate=0.1\n";
  CHECK_THROWS_WITH_AS(RunConfig::from_file(dir / "b.cfg"), doctest::Contains("learning_rate"), UsageError);
  std::ofstream(dir / "c.cfg") << "seed\n";
  CHECK_THROWS_AS(RunConfig::from_file(dir / "c.cfg"), UsageError);
  CHECK_THROWS_AS(RunConfig::from_file(dir / "missing.cfg"), UsageError);
}

TEST_CASE("typed values are checked") {
  RunConfig c;
  c.set("batch_size", "-3");
  CHECK_THROWS_AS(c.train(), UsageError);
  c = {};
  c.set("lr0", "fast");
  CHECK_THROWS_AS(c.train(), UsageError);
  c = {};
  c.set("hard_negatives", "maybe");
  CHECK_THROWS_AS(c.train(), UsageError);
  c = {};
  c.set("alias_pairs", "0:1-1");
  CHECK_THROWS_AS(c.synth(), UsageError);
  c = {};
  c.set("variant", "sideways");
  CHECK_THROWS_AS(c.sampler(), UsageError);
}

TEST_CASE("resolved text and digest") {
  RunConfig a, b;
  CHECK(a.digest() == b.digest());
  CHECK(a.resolved_text().find("seed=1\n") != std::string::npos);
  b.set("seed", "2");
  CHECK(a.digest() != b.digest());
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
