#include <cmath>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "tempctx/dataset.hpp"
#include "tempctx/error.hpp"

using namespace tempctx;
using tempctx::testing::TempDir;

namespace {

void write_manifest(const std::filesystem::path& dir, const nlohmann::json& m) {
  std::ofstream(dir / "manifest.json") << m.dump();
}

void write_floats(const std::filesystem::path& p, std::size_t count) {
  std::vector<float> v(count, 1.0f);
  std::ofstream out(p, std::ios::binary);
  write_f32_le(out, v);
}

}  // namespace

TEST_CASE("load_dataset echoes the manifest") {
  TempDir dir("ds_echo");
  write_floats(dir / "a.f32", 3 * 4);
  write_floats(dir / "b.f32", 5 * 4);
  write_manifest(dir.path(), {{"dim", 4},
                              {"sequences",
                               {{{"id", "a"}, {"path", "a.f32"}, {"num_frames", 3}},
                                {{"id", "b"}, {"path", "b.f32"}, {"num_frames", 5}, {"label", 2}}}}});
  const Dataset d = load_dataset(dir / "manifest.json");
  CHECK(d.dim == 4);
  REQUIRE(d.sequences.size() == 2);
  CHECK(d.sequences[0].num_frames == 3);
  CHECK(d.sequences[1].num_frames == 5);
  CHECK_FALSE(d.sequences[0].label.has_value());
  CHECK(d.sequences[1].label == 2);
}

TEST_CASE("load_dataset reports a truncated payload by sequence id") {
  TempDir dir("ds_trunc");
  // 3.5 frames' worth of bytes for a 4-frame sequence.
  std::ofstream(dir / "x.f32", std::ios::binary) << std::string(14 * 4, '\0');
  write_manifest(dir.path(), {{"dim", 4}, {"sequences", {{{"id", "clip-7"}, {"path", "x.f32"}, {"num_frames", 4}}}}});
  try {
    load_dataset(dir / "manifest.json");
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("clip-7") != std::string::npos);
    CHECK(msg.find("truncated") != std::string::npos);
  }
}

TEST_CASE("load_dataset error paths") {
  TempDir dir("ds_err");
  SUBCASE("missing manifest") { CHECK_THROWS_AS(load_dataset(dir / "nope.json"), DataError); }
  SUBCASE("missing payload") {
    write_manifest(dir.path(), {{"dim", 2}, {"sequences", {{{"id", "a"}, {"path", "gone.f32"}, {"num_frames", 1}}}}});
    CHECK_THROWS_AS(load_dataset(dir / "manifest.json"), DataError);
  }
  SUBCASE("per-sequence dim disagrees") {
    write_floats(dir / "a.f32", 6);
    write_manifest(dir.path(),
                   {{"dim", 2}, {"sequences", {{{"id", "a"}, {"path", "a.f32"}, {"num_frames", 2}, {"dim", 3}}}}});
    CHECK_THROWS_WITH_AS(load_dataset(dir / "manifest.json"), doctest::Contains("'a'"), DataError);
  }
  SUBCASE("non-finite value names the frame") {
    std::vector<float> v{1.0f, 2.0f, 3.0f, std::numeric_limits<float>::quiet_NaN()};
    std::ofstream out(dir / "a.f32", std::ios::binary);
    write_f32_le(out, v);
    out.close();
    write_manifest(dir.path(), {{"dim", 2}, {"sequences", {{{"id", "a"}, {"path", "a.f32"}, {"num_frames", 2}}}}});
    CHECK_THROWS_WITH_AS(load_dataset(dir / "manifest.json"), doctest::Contains("frame 1"), DataError);
  }
}

TEST_CASE("validate rejects infinity and duplicate ids") {
  Dataset d = tempctx::testing::random_dataset(3, {2, 2}, 1);
  CHECK_NOTHROW(validate(d));
  d.sequences[1].features[4] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(validate(d), DataError);
  d = tempctx::testing::random_dataset(3, {2, 2}, 1);
  d.sequences[1].id = d.sequences[0].id;
  CHECK_THROWS_AS(validate(d), DataError);
}

TEST_CASE("save_dataset layout") {
  TempDir dir("ds_save");
  Dataset d;
  d.dim = 1;
  d.sequences.push_back({"one", 1, {0.5f}, std::nullopt, std::nullopt});
  const auto manifest = save_dataset(d, dir.path());
  const auto m = nlohmann::json::parse(tempctx::testing::slurp(manifest));
  const auto& e = m.at("sequences").at(0);
  CHECK_FALSE(e.contains("label"));
  CHECK_FALSE(e.contains("states_path"));
  const auto payload = tempctx::testing::slurp(dir / e.at("path").get<std::string>());
  REQUIRE(payload.size() == 4);
  // 0.5f = 0x3f000000, little-endian.
  CHECK(static_cast<unsigned char>(payload[0]) == 0x00);
  CHECK(static_cast<unsigned char>(payload[3]) == 0x3f);
}

TEST_CASE("save/load round trip is bit exact, save/load/save is byte identical") {
  TempDir a("ds_rt_a"), b("ds_rt_b");
  Dataset d = tempctx::testing::random_dataset(5, {7, 3, 11}, 42, true);
  d.sequences[0].features[3] = -0.0f;
  d.sequences[1].features[0] = std::numeric_limits<float>::denorm_min();
  d.sequences[2].state_ids = std::vector<std::int32_t>{0, 0, 1, 1, 1, 2, 2, 3, 3, 3, -4};

  const Dataset back = load_dataset(save_dataset(d, a.path()));
  REQUIRE(back.sequences.size() == d.sequences.size());
  for (std::size_t s = 0; s < d.sequences.size(); ++s) {
    const auto& x = d.sequences[s].features;
    const auto& y = back.sequences[s].features;
    REQUIRE(x.size() == y.size());
    CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) == 0);
    CHECK(back.sequences[s].label == d.sequences[s].label);
    CHECK(back.sequences[s].state_ids == d.sequences[s].state_ids);
  }

  save_dataset(back, b.path());
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
    const auto name = entry.path().filename();
    CHECK(tempctx::testing::slurp(entry.path()) == tempctx::testing::slurp(b.path() / name));
  }
}

TEST_CASE("uniform_indices") {
  using V = std::vector<std::size_t>;
  // 11/3 = 3.67 -> 4, 22/3 = 7.33 -> 7
  CHECK(uniform_indices(12, 4) == V{0, 4, 7, 11});
  CHECK(uniform_indices(4, 4) == V{0, 1, 2, 3});
  CHECK(uniform_indices(1, 4) == V{0, 0, 0, 0});
  // Half-way values round away from zero: 3 * 1/2 = 1.5 -> 2.
  CHECK(uniform_indices(4, 3) == V{0, 2, 3});
  CHECK(uniform_indices(19, 4) == V{0, 6, 12, 18});
  CHECK(uniform_indices(2, 5) == V{0, 0, 1, 1, 1});

  SUBCASE("properties over a grid") {
    for (std::size_t n = 1; n <= 40; ++n)
      for (std::size_t k = 1; k <= 15; ++k) {
        const auto idx = uniform_indices(n, k);
        REQUIRE(idx.size() == k);
        CHECK(std::is_sorted(idx.begin(), idx.end()));
        CHECK(idx.back() <= n - 1);
        if (n >= 2 && k >= 2) {
          CHECK(idx.front() == 0);
          CHECK(idx.back() == n - 1);
        }
      }
  }
}
