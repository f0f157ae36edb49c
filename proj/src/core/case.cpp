#include "fuas/core/case.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "fuas/core/error.hpp"

namespace fuas {

using json = nlohmann::ordered_json;

namespace {

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) throw Error(ErrorCode::MissingField, key);
  return *it;
}

std::string require_string(const json& doc, const char* key) {
  const auto& v = require(doc, key);
  if (!v.is_string()) throw Error(ErrorCode::MalformedDocument, std::string(key) + " must be a string");
  return v.get<std::string>();
}

double require_number(const json& doc, const char* key) {
  const auto& v = require(doc, key);
  if (!v.is_number()) throw Error(ErrorCode::MalformedDocument, std::string(key) + " must be a number");
  return v.get<double>();
}

}  // namespace

void ClinicalVariables::validate() const {
  for (double v : {bmi, abdominal_wall_thickness_mm, preop_score, age})
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidValue, "clinical variable is not finite");
  if (!(bmi > 10.0 && bmi < 80.0)) throw Error(ErrorCode::InvalidValue, "bmi outside (10, 80)");
  if (abdominal_wall_thickness_mm < 0) throw Error(ErrorCode::InvalidValue, "abdominal wall thickness < 0");
  if (preop_score < 0) throw Error(ErrorCode::InvalidValue, "preop_score < 0");
  if (age < 0) throw Error(ErrorCode::InvalidValue, "age < 0");
}

CaseInput parse_case(std::string_view json_text) {
  json doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::MalformedDocument, "case is not a JSON object");

  CaseInput c;
  c.case_id = require_string(doc, "case_id");
  if (c.case_id.empty()) throw Error(ErrorCode::MalformedDocument, "case_id is empty");
  c.volume_ref = require_string(doc, "volume_ref");
  c.ehr_text = require_string(doc, "ehr_text");
  c.clinician_query = require_string(doc, "clinician_query");

  const auto& cv = require(doc, "clinical_vars");
  if (!cv.is_object()) throw Error(ErrorCode::MalformedDocument, "clinical_vars must be an object");
  c.clinical_vars.bmi = require_number(cv, "bmi");
  c.clinical_vars.abdominal_wall_thickness_mm = require_number(cv, "abdominal_wall_thickness_mm");
  c.clinical_vars.preop_score = require_number(cv, "preop_score");
  c.clinical_vars.age = require_number(cv, "age");
  try {
    c.clinical_vars.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedDocument, e.detail());
  }

  if (auto it = doc.find("oar_refs"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::MalformedDocument, "oar_refs must be an array");
    for (const auto& r : *it) {
      if (!r.is_string()) throw Error(ErrorCode::MalformedDocument, "oar_refs entries must be strings");
      c.oar_refs.push_back(r.get<std::string>());
    }
  }
  if (auto it = doc.find("mask_ref"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::MalformedDocument, "mask_ref must be a string");
    c.mask_ref = it->get<std::string>();
  }
  return c;
}

std::string serialize_case(const CaseInput& c) {
  json doc;
  doc["case_id"] = c.case_id;
  doc["volume_ref"] = c.volume_ref;
  doc["ehr_text"] = c.ehr_text;
  doc["clinician_query"] = c.clinician_query;
  doc["clinical_vars"] = {{"bmi", c.clinical_vars.bmi},
                          {"abdominal_wall_thickness_mm", c.clinical_vars.abdominal_wall_thickness_mm},
                          {"preop_score", c.clinical_vars.preop_score},
                          {"age", c.clinical_vars.age}};
  doc["oar_refs"] = c.oar_refs;
  if (c.mask_ref) doc["mask_ref"] = *c.mask_ref;
  return doc.dump(2);
}

}  // namespace fuas
