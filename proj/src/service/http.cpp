#include "fuas/service/http.hpp"

#include <httplib.h>

#include "fuas/core/volume_io.hpp"
#include "fuas/segtool/metrics.hpp"
#include "fuas/segtool/prompt.hpp"
#include "fuas/segtool/segment.hpp"
#include "fuas/service/cohort.hpp"

namespace fuas::service {

using nlohmann::ordered_json;

namespace {

void send_json(httplib::Response& res, const ordered_json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(2), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& detail) {
  send_json(res, {{"error", std::string(to_string(code))}, {"detail", detail}}, http_status(code));
}

// Wraps a handler so library errors become JSON error bodies.
template <class F>
auto guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.detail());
    } catch (const nlohmann::json::exception& e) {
      send_error(res, ErrorCode::MalformedDocument, e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::IoError, e.what());
    }
  };
}

ordered_json parse_body(const httplib::Request& req) {
  try {
    return ordered_json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("request body: ") + e.what());
  }
}

void send_file(httplib::Response& res, const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::UnknownCase, path.filename().string());
  const Bytes raw = read_file(path);
  res.set_content(std::string(raw.begin(), raw.end()), "application/octet-stream");
}

std::filesystem::path resolve(const WorkflowConfig& cfg, const std::string& ref) {
  const std::filesystem::path p(ref);
  return p.is_absolute() || cfg.data_dir.empty() ? p : cfg.data_dir / p;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCase: return 404;
    case ErrorCode::InvalidTransition: return 409;
    case ErrorCode::MissingField:
    case ErrorCode::MalformedDocument:
    case ErrorCode::InvalidValue:
    case ErrorCode::BadValue:
    case ErrorCode::MissingKey:
    case ErrorCode::UnknownPlanField:
    case ErrorCode::PromptOutOfBounds:
    case ErrorCode::NoPositiveSeed:
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedPayload:
    case ErrorCode::DimMismatch: return 400;
    default: return 500;
  }
}

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)), store_(cfg_.store_dir), server_(std::make_unique<httplib::Server>()) {
  register_routes();
  const std::size_t n = std::max<std::size_t>(1, cfg_.workers);
  for (std::size_t i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
  stop();
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

std::string Service::submit(const CaseInput& c) {
  store_.create(c);
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(c.case_id);
  }
  queue_cv_.notify_one();
  return c.case_id;
}

void Service::wait_idle() {
  std::unique_lock lock(queue_mutex_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && active_ == 0; });
}

void Service::worker_loop() {
  while (true) {
    std::string id;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_ && queue_.empty()) return;
      id = queue_.front();
      queue_.pop_front();
      ++active_;
    }
    store_.exclusive(id, [&] {
      const auto rec = store_.get(id);
      WorkflowConfig wc = cfg_.workflow;
      wc.artifact_dir = store_.case_dir(id);
      try {
        run_workflow(rec->input, wc, [this](const WorkflowRecord& r) { store_.save(r); });
      } catch (const std::exception& e) {
        WorkflowRecord failed = *rec;
        failed.status = RecordStatus::Escalated;
        failed.error = e.what();
        failed.trace.push_back(std::string("halted: ") + e.what());
        store_.save(failed);
      }
    });
    {
      std::lock_guard lock(queue_mutex_);
      --active_;
    }
    idle_cv_.notify_all();
  }
}

WorkflowRecord Service::review(const std::string& case_id, Decision d, const std::map<std::string, std::string>& patch) {
  WorkflowRecord out;
  store_.exclusive(
      case_id,
      [&] {
        WorkflowRecord rec = *store_.get(case_id);
        WorkflowConfig wc = cfg_.workflow;
        wc.artifact_dir = store_.case_dir(case_id);
        review_decision(rec, d, patch, wc, [this](const WorkflowRecord& r) { store_.save(r); });
        store_.save(rec);
        out = std::move(rec);
      },
      true);
  return out;
}

ordered_json Service::segment(const std::string& case_id, const std::string& prompt_spec) {
  const auto rec = store_.get(case_id);
  if (!rec) throw Error(ErrorCode::UnknownCase, case_id);
  const Volume v = read_volume(resolve(cfg_.workflow, rec->input.volume_ref));
  const auto prompt = seg::parse_prompt(prompt_spec);
  static const seg::RegionGrowingBackend fallback(phantom_segmentation_options());
  const seg::SegmentationBackend& backend = cfg_.workflow.segmenter ? *cfg_.workflow.segmenter : fallback;
  const Mask m = seg::segment(v, prompt, backend).binarized();

  std::string name;
  {
    std::lock_guard lock(segment_mutex_);
    const auto dir = store_.case_dir(case_id);
    for (int n = 0;; ++n) {
      name = "prompt_" + std::to_string(n) + ".rmsk";
      if (!std::filesystem::exists(dir / name)) break;
    }
    write_mask(dir / name, m);
  }
  ordered_json j;
  j["case_id"] = case_id;
  j["prompt"] = seg::format_prompt(prompt);
  j["mask_ref"] = case_id + "/" + name;
  j["voxels"] = m.count();
  j["dice_vs_current"] = nullptr;
  if (rec->mask_ref && std::filesystem::is_regular_file(*rec->mask_ref)) {
    const Mask current = read_mask(*rec->mask_ref);
    if (current.grid() == m.grid()) j["dice_vs_current"] = seg::dice(m, current);
  }
  return j;
}

ordered_json Service::telemetry() const {
  std::vector<StepTelemetry> all;
  ordered_json counts = ordered_json::object();
  std::size_t cases = 0;
  for (const auto& r : store_.list()) {
    all.insert(all.end(), r.telemetry.begin(), r.telemetry.end());
    const std::string s(to_string(r.status));
    counts[s] = counts.value(s, 0) + 1;
    ++cases;
  }
  return {{"cases", cases}, {"status_counts", counts}, {"agents", telemetry_to_json(aggregate(all))}};
}

void Service::register_routes() {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                         {"Access-Control-Allow-Headers", "Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, {{"status", "ok"}}); });

  s.Post("/cases", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const CaseInput c = parse_case(req.body);
           send_json(res, {{"case_id", submit(c)}}, 201);
         }));

  s.Get("/cases", guarded([this](const httplib::Request&, httplib::Response& res) {
          ordered_json out = ordered_json::array();
          for (const auto& r : store_.list()) out.push_back(record_summary_json(r));
          send_json(res, out);
        }));

  s.Get(R"(/cases/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto rec = store_.get(req.matches[1]);
          if (!rec) throw Error(ErrorCode::UnknownCase, req.matches[1]);
          send_json(res, record_to_json(*rec));
        }));

  s.Get(R"(/cases/([^/]+)/plan)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto rec = store_.get(req.matches[1]);
          if (!rec) throw Error(ErrorCode::UnknownCase, req.matches[1]);
          const auto* p = rec->terminal_plan();
          if (p == nullptr) throw Error(ErrorCode::UnknownCase, "no plan yet for " + std::string(req.matches[1]));
          res.set_content(strategy::render_plan(*p), "text/plain; charset=utf-8");
        }));

  s.Post(R"(/cases/([^/]+)/review)", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           if (!body.is_object() || !body.contains("decision") || !body["decision"].is_string())
             throw Error(ErrorCode::MissingField, "decision");
           std::map<std::string, std::string> patch;
           if (body.contains("patch") && !body["patch"].is_null()) {
             if (!body["patch"].is_object()) throw Error(ErrorCode::MalformedDocument, "patch must be an object");
             for (const auto& [k, v] : body["patch"].items())
               patch[k] = v.is_string() ? v.get<std::string>() : v.dump();
           }
           const auto rec = review(req.matches[1], parse_decision(body["decision"].get<std::string>()), patch);
           send_json(res, record_to_json(rec));
         }));

  s.Get(R"(/cases/([^/]+)/volume)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto rec = store_.get(req.matches[1]);
          if (!rec) throw Error(ErrorCode::UnknownCase, req.matches[1]);
          send_file(res, resolve(cfg_.workflow, rec->input.volume_ref));
        }));

  s.Get(R"(/cases/([^/]+)/mask)", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const auto rec = store_.get(req.matches[1]);
          if (!rec) throw Error(ErrorCode::UnknownCase, req.matches[1]);
          if (!rec->mask_ref) throw Error(ErrorCode::UnknownCase, "no mask yet for " + std::string(req.matches[1]));
          send_file(res, resolve(cfg_.workflow, *rec->mask_ref));
        }));

  s.Get(R"(/cases/([^/]+)/artifacts/([A-Za-z0-9_.-]+))",
        guarded([this](const httplib::Request& req, httplib::Response& res) {
          if (!store_.contains(req.matches[1])) throw Error(ErrorCode::UnknownCase, req.matches[1]);
          const std::string name = req.matches[2];
          if (name.front() == '.') throw Error(ErrorCode::InvalidValue, "bad artifact name");
          send_file(res, store_.case_dir(req.matches[1]) / name);
        }));

  s.Get("/escalations", guarded([this](const httplib::Request&, httplib::Response& res) {
          ordered_json out = ordered_json::array();
          for (const auto& r : store_.list())
            if (r.status == RecordStatus::Escalated) out.push_back(record_summary_json(r));
          send_json(res, out);
        }));

  s.Post("/segment", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const auto body = parse_body(req);
           if (!body.is_object() || !body.contains("case_id") || !body["case_id"].is_string())
             throw Error(ErrorCode::MissingField, "case_id");
           if (!body.contains("prompt") || !body["prompt"].is_string()) throw Error(ErrorCode::MissingField, "prompt");
           send_json(res, segment(body["case_id"].get<std::string>(), body["prompt"].get<std::string>()));
         }));

  s.Get("/telemetry", guarded([this](const httplib::Request&, httplib::Response& res) { send_json(res, telemetry()); }));
}

int Service::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Service::listen() { server_->listen_after_bind(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace fuas::service
