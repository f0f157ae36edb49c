#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "fuas/service/workflow.hpp"

namespace fuas::service {

/// One directory per case under `root/cases/<case_id>`: case.json,
/// record.json, plan.txt, trace.log and mask artifacts. Records live in memory
/// for the process lifetime; the files are written on every save.
class CaseStore {
 public:
  explicit CaseStore(std::filesystem::path root);

  /// Throws InvalidValue for an unusable id, InvalidTransition for a duplicate.
  void create(const CaseInput& c);
  /// Throws UnknownCase.
  void save(const WorkflowRecord& rec);
  std::optional<WorkflowRecord> get(const std::string& case_id) const;
  std::vector<WorkflowRecord> list() const;
  bool contains(const std::string& case_id) const;
  std::filesystem::path case_dir(const std::string& case_id) const;

  /// Runs `fn` while holding the case's operation lock, so workflow runs and
  /// reviews of one case never overlap. With `try_only`, a busy case throws
  /// InvalidTransition instead of waiting. Throws UnknownCase.
  void exclusive(const std::string& case_id, const std::function<void()>& fn, bool try_only = false);

 private:
  struct Slot {
    std::mutex op;
    mutable std::mutex data;
    WorkflowRecord record;
  };
  std::shared_ptr<Slot> slot(const std::string& case_id) const;
  void write_files(const WorkflowRecord& rec) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

/// Letters, digits, '.', '_' and '-', not starting with '.'.
bool valid_case_id(const std::string& id);

}  // namespace fuas::service
