#include "fuas/service/store.hpp"

#include <cctype>
#include <string_view>

#include "fuas/core/error.hpp"
#include "fuas/core/volume_io.hpp"

namespace fuas::service {

namespace {

void write_text(const std::filesystem::path& path, std::string_view text) {
  const auto tmp = path.string() + ".tmp";
  write_file(tmp, Bytes(text.begin(), text.end()));
  std::filesystem::rename(tmp, path);
}

}  // namespace

bool valid_case_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  for (unsigned char ch : id)
    if (!std::isalnum(ch) && ch != '.' && ch != '_' && ch != '-') return false;
  return true;
}

CaseStore::CaseStore(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_ / "cases");
}

std::filesystem::path CaseStore::case_dir(const std::string& case_id) const { return root_ / "cases" / case_id; }

void CaseStore::create(const CaseInput& c) {
  if (!valid_case_id(c.case_id)) throw Error(ErrorCode::InvalidValue, "case_id '" + c.case_id + "' is not usable");
  auto s = std::make_shared<Slot>();
  s->record.input = c;
  {
    std::unique_lock lock(mutex_);
    if (slots_.contains(c.case_id)) throw Error(ErrorCode::InvalidTransition, "case " + c.case_id + " already exists");
    slots_.emplace(c.case_id, s);
  }
  std::filesystem::create_directories(case_dir(c.case_id));
  write_text(case_dir(c.case_id) / "case.json", serialize_case(c));
}

std::shared_ptr<CaseStore::Slot> CaseStore::slot(const std::string& case_id) const {
  std::shared_lock lock(mutex_);
  const auto it = slots_.find(case_id);
  if (it == slots_.end()) throw Error(ErrorCode::UnknownCase, case_id);
  return it->second;
}

void CaseStore::save(const WorkflowRecord& rec) {
  auto s = slot(rec.input.case_id);
  std::lock_guard lock(s->data);
  s->record = rec;
  write_files(rec);
}

void CaseStore::write_files(const WorkflowRecord& rec) const {
  const auto dir = case_dir(rec.input.case_id);
  write_text(dir / "record.json", record_to_json(rec).dump(2));
  std::string trace;
  for (const auto& line : rec.trace) trace += line + '\n';
  write_text(dir / "trace.log", trace);
  if (const auto* p = rec.terminal_plan()) write_text(dir / "plan.txt", strategy::render_plan(*p));
}

std::optional<WorkflowRecord> CaseStore::get(const std::string& case_id) const {
  std::shared_ptr<Slot> s;
  {
    std::shared_lock lock(mutex_);
    const auto it = slots_.find(case_id);
    if (it == slots_.end()) return std::nullopt;
    s = it->second;
  }
  std::lock_guard lock(s->data);
  return s->record;
}

std::vector<WorkflowRecord> CaseStore::list() const {
  std::vector<std::shared_ptr<Slot>> all;
  {
    std::shared_lock lock(mutex_);
    for (const auto& [id, s] : slots_) all.push_back(s);
  }
  std::vector<WorkflowRecord> out;
  for (const auto& s : all) {
    std::lock_guard lock(s->data);
    out.push_back(s->record);
  }
  return out;
}

bool CaseStore::contains(const std::string& case_id) const {
  std::shared_lock lock(mutex_);
  return slots_.contains(case_id);
}

void CaseStore::exclusive(const std::string& case_id, const std::function<void()>& fn, bool try_only) {
  auto s = slot(case_id);
  std::unique_lock lock(s->op, std::defer_lock);
  if (try_only) {
    if (!lock.try_lock()) throw Error(ErrorCode::InvalidTransition, "case " + case_id + " is being processed");
  } else {
    lock.lock();
  }
  fn();
}

}  // namespace fuas::service
