// fuasctl: command-line front end for planning, segmentation, knowledge
// ingestion, text evaluation, phantom generation and the HTTP service.

#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fuas/core/error.hpp"
#include "fuas/core/stats.hpp"
#include "fuas/core/volume_io.hpp"
#include "fuas/dosemodel/dose.hpp"
#include "fuas/memory/knowledge.hpp"
#include "fuas/segtool/metrics.hpp"
#include "fuas/segtool/phantom.hpp"
#include "fuas/segtool/prompt.hpp"
#include "fuas/segtool/segment.hpp"
#include "fuas/service/cohort.hpp"
#include "fuas/service/http.hpp"
#include "fuas/service/workflow.hpp"
#include "fuas/strategy/text_metrics.hpp"

namespace fs = std::filesystem;
using namespace fuas;

namespace {

std::string read_text(const fs::path& p) {
  const Bytes raw = read_file(p);
  return {raw.begin(), raw.end()};
}

void write_text(const fs::path& p, const std::string& s) { write_file(p, Bytes(s.begin(), s.end())); }

struct Common {
  std::string knowledge = FUAS_KNOWLEDGE_DIR;
  std::string model;
  std::string data_dir;
  std::string constraints;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--knowledge", c.knowledge, "Knowledge directory")->capture_default_str();
  app->add_option("--model", c.model, "Dose model JSON (trained on the synthetic cohort when omitted)");
  app->add_option("--data-dir", c.data_dir, "Base directory for relative volume and mask refs");
  app->add_option("--constraints", c.constraints, "Physical constraint JSON");
}

service::WorkflowConfig make_config(const Common& c, bool executor, bool optimizer, bool memory) {
  service::WorkflowConfig cfg;
  cfg.planner.enable_executor = executor;
  cfg.planner.enable_optimizer = optimizer;
  cfg.planner.enable_memory = memory;
  if (executor)
    cfg.dose_model = c.model.empty() ? service::default_dose_model()
                                     : std::make_shared<const dose::DoseModel>(dose::parse_model(read_text(c.model)));
  if (memory) cfg.index = service::build_index(memory::load_knowledge_dir(c.knowledge));
  if (!c.constraints.empty()) cfg.constraints = optimizer::load_constraints(c.constraints);
  cfg.data_dir = c.data_dir;
  return cfg;
}

service::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Focused ultrasound ablation planning toolkit"};
  app.require_subcommand(1);

  // plan
  auto* plan = app.add_subcommand("plan", "Run the planning workflow on one case document");
  Common plan_common;
  std::string case_file, record_out;
  bool no_executor = false, no_optimizer = false, no_memory = false;
  plan->add_option("--case", case_file, "Case JSON")->required()->check(CLI::ExistingFile);
  plan->add_flag("--no-executor", no_executor, "Skip segmentation and dose prediction");
  plan->add_flag("--no-optimizer", no_optimizer, "Emit the first plan unverified");
  plan->add_flag("--no-memory", no_memory, "Disable knowledge retrieval");
  plan->add_option("--record", record_out, "Write the full workflow record as JSON");
  add_common(plan, plan_common);

  // segment
  auto* segc = app.add_subcommand("segment", "Segment a volume with a prompt");
  std::string volume_file, prompt_spec = "auto", mask_out, truth_file;
  double tau = -1, threshold = -1;
  segc->add_option("--volume", volume_file, "Volume file (RVOL)")->required()->check(CLI::ExistingFile);
  segc->add_option("--prompt", prompt_spec, "auto | click:x,y,z,+;x,y,z,- | bbox:x0,y0,z0,x1,y1,z1")
      ->capture_default_str();
  segc->add_option("--out", mask_out, "Write the mask (RMSK)");
  segc->add_option("--truth", truth_file, "Reference mask for Dice/IoU");
  segc->add_option("--tau", tau, "Region-growing tolerance (default from the intensity range)");
  segc->add_option("--threshold", threshold, "Autonomy detection threshold");

  // ingest-knowledge
  auto* ingest = app.add_subcommand("ingest-knowledge", "Chunk, embed and index a knowledge directory");
  std::string knowledge_dir, index_out;
  ingest->add_option("dir", knowledge_dir, "Directory of .md/.txt documents")->required()->check(CLI::ExistingDirectory);
  ingest->add_option("--out", index_out, "Write the index JSON");

  // eval
  auto* eval = app.add_subcommand("eval", "ROUGE and BLEU of a hypothesis against a reference");
  std::string ref_file, hyp_file;
  eval->add_option("--ref", ref_file, "Reference text")->required()->check(CLI::ExistingFile);
  eval->add_option("--hyp", hyp_file, "Hypothesis text")->required()->check(CLI::ExistingFile);

  // phantom
  auto* phantom = app.add_subcommand("phantom", "Generate a phantom volume from a JSON spec");
  std::string spec_file, out_dir;
  phantom->add_option("--spec", spec_file, "Phantom spec JSON")->required()->check(CLI::ExistingFile);
  phantom->add_option("--out", out_dir, "Output directory")->required();

  // suite
  auto* suite = app.add_subcommand("suite", "Write seeded phantom planning cases with case documents");
  std::string suite_dir;
  std::size_t suite_n = 20;
  std::uint64_t suite_seed = 1000;
  suite->add_option("--out", suite_dir, "Output directory")->required();
  suite->add_option("--n", suite_n, "Number of cases")->capture_default_str();
  suite->add_option("--seed", suite_seed, "Base seed")->capture_default_str();

  // train-dose
  auto* train = app.add_subcommand("train-dose", "Train the dose model on the synthetic cohort");
  std::string model_out;
  std::size_t cohort_n = 80;
  std::uint64_t cohort_seed = 7;
  train->add_option("--out", model_out, "Model JSON")->required();
  train->add_option("--n", cohort_n, "Cohort size")->capture_default_str();
  train->add_option("--seed", cohort_seed, "Cohort seed")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  Common serve_common;
  int port = 8080;
  std::string store_dir, host = "127.0.0.1";
  std::size_t workers = 2;
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--store", store_dir, "Case store directory")->required();
  serve->add_option("--workers", workers, "Concurrent workflow executions")->capture_default_str();
  add_common(serve, serve_common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan) {
      const CaseInput c = parse_case(read_text(case_file));
      Common common = plan_common;
      if (common.data_dir.empty()) common.data_dir = fs::path(case_file).parent_path().string();
      const auto cfg = make_config(common, !no_executor, !no_optimizer, !no_memory);
      const auto rec = service::run_workflow(c, cfg);
      if (!record_out.empty()) write_text(record_out, service::record_to_json(rec).dump(2));
      if (const auto* p = rec.terminal_plan()) std::cout << strategy::render_plan(*p);
      std::cout << "STATUS: " << service::to_string(rec.status) << " plans=" << rec.attempts.size() << '\n';
      if (!rec.error.empty()) std::cout << "ERROR: " << rec.error << '\n';
      for (const auto& line : service::record_summary_json(rec)["feedback"]) std::cout << line.get<std::string>() << '\n';
      return rec.status == service::RecordStatus::Finalized ? 0 : 2;
    }
    if (*segc) {
      const Volume v = read_volume(volume_file);
      seg::RegionGrowingOptions opts;
      if (tau > 0) opts.tau = tau;
      if (threshold > 0) opts.threshold = threshold;
      const Mask m = seg::segment(v, seg::parse_prompt(prompt_spec), seg::RegionGrowingBackend(opts)).binarized();
      std::cout << "voxels=" << m.count() << " volume_mm3=" << fixed(m.count() * v.grid().voxel_volume()) << '\n';
      if (!truth_file.empty()) {
        const Mask truth = read_mask(truth_file);
        std::cout << "dice=" << fixed(seg::dice(m, truth), 4) << " iou=" << fixed(seg::iou(m, truth), 4) << '\n';
      }
      if (!mask_out.empty()) write_mask(mask_out, m);
      return 0;
    }
    if (*ingest) {
      const auto docs = memory::load_knowledge_dir(knowledge_dir);
      const auto index = service::build_index(docs);
      std::size_t rules = 0;
      for (const auto& d : docs) rules += d.rules.size();
      std::cout << "documents=" << docs.size() << " chunks=" << index->size() << " rules=" << rules << '\n';
      if (!index_out.empty()) index->save(index_out);
      return 0;
    }
    if (*eval) {
      const std::string ref = read_text(ref_file), hyp = read_text(hyp_file);
      const auto r = strategy::rouge(ref, hyp);
      const auto b = strategy::bleu(ref, hyp);
      std::cout << "ROUGE-1 " << fixed(r.r1, 4) << "\nROUGE-2 " << fixed(r.r2, 4) << "\nROUGE-L " << fixed(r.rl, 4)
                << '\n';
      for (int k = 0; k < 4; ++k) std::cout << "BLEU-" << k + 1 << ' ' << fixed(b.b[k], 4) << '\n';
      std::cout << "BP " << fixed(b.brevity_penalty, 4) << '\n';
      return 0;
    }
    if (*phantom) {
      const auto spec = seg::parse_phantom_spec(read_text(spec_file));
      const auto ph = seg::make_phantom(spec);
      fs::create_directories(out_dir);
      write_volume(fs::path(out_dir) / "volume.rvol", ph.volume);
      write_mask(fs::path(out_dir) / "truth.rmsk", ph.truth);
      for (const auto& [name, m] : ph.oars) write_mask(fs::path(out_dir) / ("oar_" + name + ".rmsk"), m);
      std::cout << "wrote " << out_dir << " lesion_voxels=" << ph.truth.count() << " oars=" << ph.oars.size() << '\n';
      return 0;
    }
    if (*suite) {
      fs::create_directories(suite_dir);
      for (const auto& pc : service::make_suite(suite_n, suite_seed)) {
        service::write_phantom_case(pc, suite_dir);
        write_text(fs::path(suite_dir) / (pc.input.case_id + ".json"), serialize_case(pc.input));
        std::cout << pc.input.case_id << ".json\n";
      }
      return 0;
    }
    if (*train) {
      const auto cohort = service::make_dose_cohort(cohort_n, cohort_seed);
      const auto report = dose::train_dose_model(cohort.table, cohort.replicates);
      write_text(model_out, dose::serialize_model(report.model));
      std::cout << "retained_after_icc=" << report.retained_features.size()
                << " selected=" << report.model.selected_features.size() << " lambda=" << report.lasso.lambda
                << " train_rmse=" << fixed(report.train_rmse.back()) << '\n';
      return 0;
    }
    if (*serve) {
      service::ServiceConfig sc;
      sc.store_dir = store_dir;
      sc.workers = workers;
      sc.workflow = make_config(serve_common, true, true, true);
      service::Service svc(sc);
      const int bound = svc.bind(host, port);
      g_service = &svc;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on http://" << host << ':' << bound << std::endl;
      svc.listen();
      g_service = nullptr;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
