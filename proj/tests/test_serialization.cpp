#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "jitter/errors.hpp"
#include "jitter/serialization.hpp"

using namespace jitter;

namespace {

bool bit_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("sample set JSON round trip is bit exact") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ModelConfig c(3 + seed % 5, 2 + seed % 7, 0.37 * (seed % 3), 0.05 + 1e-3 * seed);
    const SampleSet s = generate_samples(draw_prior_parameters(c.K(), seed), c, seed * 977);
    const std::string text = to_json(s).dump();
    const SampleSet back = sample_set_from_json(Json::parse(text));
    CHECK(back.config.K() == c.K());
    CHECK(back.config.M() == c.M());
    CHECK(back.config.sigma_z() == c.sigma_z());
    CHECK(back.config.sigma_w() == c.sigma_w());
    CHECK(back.seed == s.seed);
    CHECK(bit_equal(back.y, s.y));
    CHECK(bit_equal(*back.z_true, *s.z_true));
    CHECK(bit_equal(*back.x_true, *s.x_true));
    CHECK(to_json(back).dump() == text);
  }
}

TEST_CASE("awkward doubles survive") {
  Vector v(7);
  v << 0.1, -0.0, 5e-324, std::numeric_limits<double>::max(), 1.0 / 3.0, std::nextafter(1.0, 2.0), -2.5e-300;
  const Vector back = vector_from_json(Json::parse(to_json(v).dump()));
  CHECK(bit_equal(back, v));
}

TEST_CASE("optional truth fields") {
  SampleSet s = generate_samples(draw_prior_parameters(2, 1), ModelConfig(2, 3, 0.1, 0.1), 2);
  s.z_true.reset();
  s.x_true.reset();
  const Json j = to_json(s);
  CHECK_FALSE(j.contains("z_true"));
  const SampleSet back = sample_set_from_json(j);
  CHECK_FALSE(back.z_true.has_value());
  CHECK_FALSE(back.x_true.has_value());
}

TEST_CASE("malformed sample sets are invalid config") {
  const SampleSet s = generate_samples(draw_prior_parameters(2, 1), ModelConfig(2, 3, 0.1, 0.1), 2);
  Json j = to_json(s);
  Json short_y = j;
  short_y["y"].erase(0);
  CHECK_THROWS_AS(sample_set_from_json(short_y), InvalidConfig);
  Json no_config = j;
  no_config.erase("config");
  CHECK_THROWS_AS(sample_set_from_json(no_config), InvalidConfig);
  Json bad_x = j;
  bad_x["x_true"] = Json::array({1.0});
  CHECK_THROWS_AS(sample_set_from_json(bad_x), InvalidConfig);
  Json text_y = j;
  text_y["y"][0] = "oops";
  CHECK_THROWS_AS(sample_set_from_json(text_y), InvalidConfig);
  Json neg = j;
  neg["config"]["sigma_w"] = -1.0;
  CHECK_THROWS_AS(sample_set_from_json(neg), InvalidConfig);
}

TEST_CASE("sweep spec JSON round trip") {
  SweepSpec s;
  s.K = 6;
  s.M_list = {4, 8};
  s.sigma_z_list = {0.05, 0.1, 0.3};
  s.sigma_w_list = {0.05};
  s.trials = 17;
  s.estimators = {EstimatorId::Em, EstimatorId::GibbsSlice};
  s.master_seed = 123456789012345ULL;
  s.options.quad_order = 30;
  s.options.samples = 77;
  const SweepSpec back = sweep_spec_from_json(Json::parse(to_json(s).dump()));
  CHECK(back.K == 6);
  CHECK(back.M_list == s.M_list);
  CHECK(back.sigma_z_list == s.sigma_z_list);
  CHECK(back.trials == 17);
  CHECK(back.estimators == s.estimators);
  CHECK(back.master_seed == s.master_seed);
  CHECK(back.options.quad_order == 30);
  CHECK(back.options.samples == 77);

  Json bad = to_json(s);
  bad["estimators"] = Json::array({"nope"});
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
  bad = to_json(s);
  bad.erase("trials");
  CHECK_THROWS_AS(sweep_spec_from_json(bad), InvalidConfig);
}
