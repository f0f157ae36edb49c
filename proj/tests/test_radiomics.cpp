#include <doctest.h>

#include <cmath>

#include "fuas/core/error.hpp"
#include "fuas/radiomics/features.hpp"
#include "radiomics_cases.hpp"

using namespace fuas;
using namespace fuas::radiomics;

namespace {

Mask ball(const Grid& g, double r) {
  Eigen::ArrayXf p = Eigen::ArrayXf::Zero(static_cast<Eigen::Index>(g.size()));
  const Eigen::Vector3d c = (g.dims().cast<double>() - 1).matrix() / 2;
  for (std::size_t i = 0; i < g.size(); ++i)
    if ((g.coords(i).cast<double>().matrix() - c).norm() <= r) p[static_cast<Eigen::Index>(i)] = 1;
  return Mask(g, p);
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("extraction matches the brute-force oracle") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto c = test::random_radiomics_case(seed);
    const auto f = extract(c.volume, c.mask);
    const auto want = oracle::radiomics(c.box, 32);
    REQUIRE(f.size() == want.size());
    for (const auto& feat : f.features()) {
      INFO("seed " << seed << " feature " << feat.name);
      const double w = want.at(feat.name);
      CHECK(std::abs(feat.value - w) <= 1e-9 * std::max(1.0, std::abs(w)));
    }
  }
}

TEST_CASE("extraction is the concatenation of the four families") {
  const auto c = test::random_radiomics_case(77);
  auto manual = first_order(c.volume, c.mask);
  manual.append(shape(c.mask)).append(glcm(c.volume, c.mask)).append(glszm(c.volume, c.mask));
  const auto f = extract(c.volume, c.mask);
  CHECK(f.names() == manual.names());
  CHECK(f.values() == manual.values());
  CHECK(f.names() == feature_names());
  CHECK(feature_names().size() == 19);
  CHECK(extract(test::random_radiomics_case(78).volume, test::random_radiomics_case(78).mask).names() == f.names());
}

TEST_CASE("first-order hand cases") {
  const Grid g({4, 1, 1}, Eigen::Array3d::Ones());
  const Mask all(g, Eigen::ArrayXf::Ones(4));
  const auto k = first_order(Volume(g, Eigen::ArrayXf::Constant(4, 3.f)), all);
  CHECK(k.value("firstorder_mean") == 3);
  CHECK(k.value("firstorder_variance") == 0);
  CHECK(k.value("firstorder_entropy") == 0);
  CHECK(k.value("firstorder_energy") == 36);
  Eigen::ArrayXf two(4);
  two << 0, 1, 0, 1;
  const auto t = first_order(Volume(g, two), all, 2);
  CHECK(t.value("firstorder_entropy") == doctest::Approx(1.0));
  CHECK(t.value("firstorder_skewness") == 0.0);
  CHECK(code_of([&] { first_order(Volume(g, two), Mask::empty_like(g)); }) == ErrorCode::EmptyMask);
}

TEST_CASE("shape hand cases") {
  const Grid one({1, 1, 1}, Eigen::Array3d::Ones());
  const auto s = shape(Mask(one, Eigen::ArrayXf::Ones(1)));
  CHECK(s.value("shape_volume_mm3") == 1);
  CHECK(s.value("shape_surface_area_mm2") == 6);
  CHECK(s.value("shape_sphericity") == doctest::Approx(0.8060).epsilon(1e-4));
  const Grid bar({2, 1, 1}, Eigen::Array3d::Ones());
  const auto b = shape(Mask(bar, Eigen::ArrayXf::Ones(2)));
  CHECK(b.value("shape_volume_mm3") == 2);
  CHECK(b.value("shape_surface_area_mm2") == 10);
}

TEST_CASE("face-counted sphericity of voxel balls settles near two thirds") {
  // Staircase faces inflate area, so the face-count measure never approaches 1.
  const Grid g({25, 25, 25}, Eigen::Array3d::Ones());
  double sum = 0;
  for (int r = 3; r <= 10; ++r) {
    const double sph = shape(ball(g, r)).value("shape_sphericity");
    CHECK(sph >= 0.62);
    CHECK(sph <= 0.70);
    if (r >= 7) sum += sph;
  }
  CHECK(std::abs(sum / 4 - 2.0 / 3.0) < 0.02);
}

TEST_CASE("glcm hand cases") {
  const Grid g({4, 4, 1}, Eigen::Array3d::Ones());
  const Mask all(g, Eigen::ArrayXf::Ones(16));
  const auto flat = glcm(Volume(g, Eigen::ArrayXf::Constant(16, 2.f)), all);
  CHECK(flat.value("glcm_contrast") == 0);
  CHECK(flat.value("glcm_energy") == 1);
  CHECK(flat.value("glcm_homogeneity") == 1);
  CHECK(flat.value("glcm_correlation") == 0);

  Eigen::ArrayXf cb(16);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) cb[x + 4 * y] = static_cast<float>((x + y) % 2);
  TextureConfig cfg;
  cfg.n_bins = 2;
  cfg.offsets = {Eigen::Array3i(1, 0, 0)};
  const auto c = glcm(Volume(g, cb), all, cfg);
  CHECK(c.value("glcm_contrast") == doctest::Approx(1.0));
  CHECK(c.value("glcm_energy") == doctest::Approx(0.5));
  const auto p = glcm_matrix(quantize(Volume(g, cb), all, 2), g, 2, {1, 0, 0}, true);
  CHECK(p.sum() == doctest::Approx(1.0));

  const Grid one({1, 1, 1}, Eigen::Array3d::Ones());
  CHECK(code_of([&] { glcm(Volume(one, Eigen::ArrayXf::Ones(1)), Mask(one, Eigen::ArrayXf::Ones(1))); }) ==
        ErrorCode::NoValidPairs);
  TextureConfig bad;
  bad.n_bins = 1;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::InvalidValue);
  CHECK(TextureConfig::unit_offsets_3d().size() == 13);
}

TEST_CASE("glszm hand cases") {
  const Grid g({6, 1, 1}, Eigen::Array3d::Ones());
  const Mask all(g, Eigen::ArrayXf::Ones(6));
  const auto flat = glszm(Volume(g, Eigen::ArrayXf::Constant(6, 1.f)), all);
  CHECK(flat.value("glszm_zone_entropy") == 0);
  CHECK(flat.value("glszm_gray_level_nonuniformity") == 1);

  Eigen::ArrayXf v(6);
  v << 5, 0, 5, 5, 5, 5;
  Eigen::ArrayXf m(6);
  m << 1, 0, 1, 1, 1, 1;
  const auto z = glszm(Volume(g, v), Mask(g, m));
  CHECK(z.value("glszm_small_area_emphasis") == doctest::Approx(0.53125));
}

TEST_CASE("features are unchanged by background padding") {
  const auto c = test::random_radiomics_case(5);
  const auto& g = c.volume.grid();
  const Grid big(Eigen::Array3i(g.dims() + 2), g.spacing());
  Eigen::ArrayXf v = Eigen::ArrayXf::Zero(static_cast<Eigen::Index>(big.size()));
  Eigen::ArrayXf m = v;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Eigen::Array3i p = g.coords(i) + 1;
    v[static_cast<Eigen::Index>(big.index(p[0], p[1], p[2]))] = c.volume.voxels()[static_cast<Eigen::Index>(i)];
    m[static_cast<Eigen::Index>(big.index(p[0], p[1], p[2]))] = c.mask.values()[static_cast<Eigen::Index>(i)];
  }
  const auto a = extract(c.volume, c.mask).values();
  const auto b = extract(Volume(big, v), Mask(big, m)).values();
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff()));
}
