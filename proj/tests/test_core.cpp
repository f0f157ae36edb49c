#include <doctest.h>

#include <random>

#include "fuas/core/case.hpp"
#include "fuas/core/error.hpp"
#include "fuas/core/labeling.hpp"
#include "fuas/core/predicate.hpp"
#include "fuas/core/volume.hpp"
#include "fuas/core/volume_io.hpp"

using namespace fuas;

namespace {

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

Volume random_volume(Eigen::Array3i dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d(0.f, 1.f);
  Grid g(dims, Eigen::Array3d(0.7, 1.1, 2.5));
  Eigen::ArrayXf v(static_cast<Eigen::Index>(g.size()));
  for (auto& x : v) x = d(rng);
  return Volume(g, v);
}

}  // namespace

TEST_CASE("volume bytes round-trip exactly") {
  const Volume v = random_volume({3, 4, 5}, 11);
  const Bytes b = save_volume(v);
  CHECK(b.size() == kVolumeHeaderBytes + 4 * 60);
  CHECK(load_volume(b) == v);
  CHECK(b[0] == 'R');
  CHECK(b[1] == 'V');
  // x-fastest ordering: voxel (1,0,0) is the second payload float.
  float second;
  std::memcpy(&second, b.data() + kVolumeHeaderBytes + 4, 4);
  CHECK(second == v.at(1, 0, 0));
}

TEST_CASE("volume decoding rejects bad input") {
  const Volume v = random_volume({2, 2, 2}, 3);
  Bytes b = save_volume(v);
  Bytes bad = b;
  bad[0] = 'X';
  CHECK(code_of([&] { load_volume(bad); }) == ErrorCode::BadMagic);
  Bytes shortb(b.begin(), b.end() - 1);
  CHECK(code_of([&] { load_volume(shortb); }) == ErrorCode::TruncatedPayload);
  Bytes zero = b;
  zero[8] = zero[9] = zero[10] = zero[11] = 0;
  CHECK(code_of([&] { load_volume(zero); }) == ErrorCode::NonPositiveDim);
  CHECK(code_of([&] { load_mask(b); }) == ErrorCode::BadMagic);
}

TEST_CASE("mask round-trip and binary check") {
  Grid g({2, 3, 1}, Eigen::Array3d::Ones());
  Eigen::ArrayXf p(6);
  p << 0, 1, 1, 0, 1, 0;
  const Mask m(g, p);
  CHECK(load_mask(save_mask(m)) == m);
  CHECK(m.count() == 3);
  Eigen::ArrayXf soft(6);
  soft << 0.2f, 0.7f, 1.4f, -1.f, 0.5f, 0.f;
  const Mask s(g, soft);
  CHECK(s.values().maxCoeff() == 1.f);
  CHECK(s.values().minCoeff() == 0.f);
  CHECK(s.count() == 3);
  CHECK(load_mask(save_mask(s)) == s.binarized());
  Bytes two = save_mask(m);
  two.back() = 2;
  CHECK(code_of([&] { load_mask(two); }) == ErrorCode::InvalidValue);
}

TEST_CASE("grid spacing is stored as f32") {
  Grid g({1, 1, 1}, Eigen::Array3d(0.1, 0.2, 0.3));
  const Volume v(g, Eigen::ArrayXf::Zero(1));
  const Volume back = load_volume(save_volume(v));
  CHECK(back.grid().spacing()[0] == static_cast<double>(0.1f));
}

TEST_CASE("labeling distinguishes face and full connectivity") {
  Grid g({3, 3, 1}, Eigen::Array3d::Ones());
  Eigen::ArrayXf p = Eigen::ArrayXf::Zero(9);
  p[g.index(0, 0, 0)] = 1;
  p[g.index(1, 1, 0)] = 1;
  p[g.index(2, 2, 0)] = 1;
  const Mask m(g, p);
  CHECK(label_components(m, Connectivity::Face6).count() == 3);
  CHECK(label_components(m, Connectivity::Full26).count() == 1);
}

TEST_CASE("case documents round-trip") {
  CaseInput c;
  c.case_id = "c-1";
  c.volume_ref = "c-1/volume.rvol";
  c.ehr_text = "fibroid";
  c.clinician_query = "plan";
  c.clinical_vars.bmi = 27.5;
  c.oar_refs = {"c-1/oar_bowel.rmsk"};
  c.mask_ref = "c-1/mask.rmsk";
  CHECK(parse_case(serialize_case(c)) == c);
  CHECK(code_of([] { parse_case(R"({"volume_ref": "v"})"); }) == ErrorCode::MissingField);
  CHECK(code_of([] { parse_case("not json"); }) == ErrorCode::MalformedDocument);
  CHECK(code_of([] {
          parse_case(R"({"case_id":"a","volume_ref":"v","ehr_text":"","clinician_query":"","clinical_vars":{"bmi":-1,"abdominal_wall_thickness_mm":20,"preop_score":0,"age":40}})");
        }) == ErrorCode::MalformedDocument);
}

TEST_CASE("predicates parse and evaluate") {
  const auto p = parse_predicate("safety_margin >= 10");
  CHECK(p.field == "safety_margin");
  CHECK(p.cmp == Comparator::Ge);
  CHECK(p.holds(10.0));
  CHECK_FALSE(p.holds(9.5));
  CHECK(parse_predicate("safety_margin ≥ 10") == p);
  const auto s = parse_predicate("patient_position in {prone, supine}");
  CHECK(s.holds(std::string("prone")));
  CHECK_FALSE(s.holds(std::string("lateral")));
  FieldMap f{{"x", 1.0}};
  CHECK_FALSE(parse_predicate("y < 3").holds_in(f));
  CHECK(parse_predicate("x < 3").holds_in(f));
  CHECK(parse_predicate(p.to_string()) == p);
  CHECK(code_of([] { parse_predicate("no comparator"); }) == ErrorCode::MalformedDocument);
  CHECK(format_number(15) == "15");
  CHECK(format_number(0.1) == "0.1");
}
