#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuas/core/error.hpp"
#include "fuas/service/store.hpp"
#include "fuas/service/workflow.hpp"

namespace httplib {
class Server;
}

namespace fuas::service {

struct ServiceConfig {
  std::filesystem::path store_dir;
  WorkflowConfig workflow;  // data_dir resolves case refs; artifact_dir is set per case
  std::size_t workers = 2;
};

/// HTTP status for an error code: 404 UnknownCase, 409 InvalidTransition,
/// 400 for malformed input, 500 otherwise.
int http_status(ErrorCode code);

/// Case queue, worker pool and HTTP routes over one CaseStore.
class Service {
 public:
  explicit Service(ServiceConfig cfg);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Stores the case and queues its workflow. Returns the case id.
  std::string submit(const CaseInput& c);
  /// Blocks until the queue is empty and no workflow is running.
  void wait_idle();
  WorkflowRecord review(const std::string& case_id, Decision d, const std::map<std::string, std::string>& patch);
  /// Segments the case volume with `prompt_spec`, writes the mask next to the
  /// case and reports its Dice against the workflow's current mask.
  nlohmann::ordered_json segment(const std::string& case_id, const std::string& prompt_spec);
  nlohmann::ordered_json telemetry() const;
  CaseStore& store() { return store_; }

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  /// Throws IoError when the port is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  void register_routes();
  void worker_loop();

  ServiceConfig cfg_;
  CaseStore store_;
  std::unique_ptr<httplib::Server> server_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::condition_variable idle_cv_;
  std::deque<std::string> queue_;
  std::size_t active_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
  std::mutex segment_mutex_;
};

}  // namespace fuas::service
