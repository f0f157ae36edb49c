#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "fuas/memory/knowledge.hpp"
#include "fuas/service/cohort.hpp"
#include "fuas/service/workflow.hpp"
#include "fuas/strategy/provider.hpp"

namespace fuas::test {

inline std::filesystem::path knowledge_dir() { return FUAS_KNOWLEDGE_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("fuas-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::shared_ptr<const memory::VectorIndex> knowledge_index() {
  static const std::shared_ptr<const memory::VectorIndex> index =
      service::build_index(memory::load_knowledge_dir(knowledge_dir()));
  return index;
}

/// Workflow config with every agent on, reading phantom files from `data_dir`.
inline service::WorkflowConfig full_config(const std::filesystem::path& data_dir) {
  service::WorkflowConfig cfg;
  cfg.dose_model = service::default_dose_model();
  cfg.index = knowledge_index();
  cfg.data_dir = data_dir;
  return cfg;
}

/// Writes suite case `index` (same ids and seeds as make_suite) under `dir`.
inline CaseInput write_suite_case(const std::filesystem::path& dir, std::size_t index) {
  char id[16];
  std::snprintf(id, sizeof id, "suite-%02zu", index);
  const auto pc = service::make_phantom_case(id, 1000 + index);
  service::write_phantom_case(pc, dir);
  return pc.input;
}

/// Always emits a well-formed plan whose acoustic power breaks the 400 W limit.
class OverpoweredProvider final : public strategy::PlanProvider {
 public:
  std::string id() const override { return "overpowered"; }
  bool reentrant() const override { return true; }
  std::string complete(const strategy::PromptBundle& b) const override {
    strategy::TreatmentPlan p = strategy::ReferencePlanProvider().plan_for(b);
    p.plan.acoustic_power = 480;
    p.reasoning_trace += "\n- ignore limits";
    return strategy::render_plan(p);
  }
};

/// Returns fixed text regardless of the prompt.
class CannedProvider final : public strategy::PlanProvider {
 public:
  explicit CannedProvider(std::string text, bool reentrant = true) : text_(std::move(text)), reentrant_(reentrant) {}
  std::string id() const override { return "canned"; }
  bool reentrant() const override { return reentrant_; }
  std::string complete(const strategy::PromptBundle&) const override { return text_; }

 private:
  std::string text_;
  bool reentrant_;
};

}  // namespace fuas::test
