// Copyright 2026 The refvos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "refvos/error.hpp"
#include "refvos/metrics.hpp"
#include "refvos/motion_reasoner.hpp"
#include "refvos/perception.hpp"
#include "refvos/pipeline.hpp"
#include "refvos/simulator.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw refvos::IoError("cannot write " + p.string());
  out << text;
}

std::vector<std::string> read_queries(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw refvos::IoError("cannot open " + p.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty() && line.front() != '#') out.push_back(line);
  }
  return out;
}

// Accepts either the file itself or the directory that holds it.
fs::path file_or_child(const fs::path& p, const char* name) {
  return fs::is_directory(p) ? p / name : p;
}

std::string track_dump(const refvos::PerceptionContext& ctx) {
  std::string out;
  for (const auto& t : ctx.tracking.tracks) out += refvos::format_trajectory_record(t) + "\n";
  return out;
}

std::vector<refvos::AblationScene> load_scene_dir(const fs::path& dir) {
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::exists(e.path() / "ground_truth.json")) subdirs.push_back(e.path());
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<refvos::AblationScene> scenes;
  for (const auto& d : subdirs) {
    refvos::LoadedGroundTruth gt = refvos::load_ground_truth(d / "ground_truth.json");
    scenes.push_back({d.filename().string(), refvos::load_bundle(d), gt.query,
                      std::move(gt.target), gt.tags});
  }
  return scenes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"refvos: referring video object segmentation over perception bundles"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Segment the object(s) a query refers to");
  std::string bundle_dir, query, queries_file, config_file, out_dir;
  bool offline = false, overlay = false, dump_tracks = false;
  run->add_option("--bundle", bundle_dir, "Perception bundle directory")->required();
  auto* qopt = run->add_option("--query", query, "Referring expression");
  auto* qsopt = run->add_option("--queries", queries_file, "File with one expression per line");
  qopt->excludes(qsopt);
  run->add_option("--config", config_file, "Pipeline configuration (JSON)");
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--offline", offline, "Use the deterministic reasoner instead of the endpoint");
  run->add_flag("--overlay", overlay, "Render mask overlays per frame");
  run->add_flag("--dump-tracks", dump_tracks, "Write tracks.txt and camera.txt");

  // eval
  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  std::string pred_dir, gt_dir, eval_out;
  int radius = -1;
  eval->add_option("--pred", pred_dir, "results.json, or the run directory holding it")->required();
  eval->add_option("--gt", gt_dir, "ground_truth.json, or the scene directory holding it")->required();
  eval->add_option("--out", eval_out, "Also write the report to this file");
  eval->add_option("--radius", radius, "Boundary tolerance in px (default ceil(0.8% diag))");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Run the reasoning and context ablation table");
  std::string scenes_dir, report_file, ablate_config;
  int suite_count = 0;
  std::uint64_t suite_seed = 1;
  ablate->add_option("--scenes", scenes_dir, "Directory of simulated scene directories");
  ablate->add_option("--suite", suite_count, "Generate this many standard scenes in memory");
  ablate->add_option("--suite-seed", suite_seed, "Seed for --suite");
  ablate->add_option("--config", ablate_config, "Pipeline configuration (JSON)");
  ablate->add_option("--out", report_file, "Report file")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic scene and its bundle");
  std::string spec_file, sim_out;
  std::uint64_t seed = 0;
  int sim_suite = 0;
  simulate->add_option("--spec", spec_file, "Scene specification (JSON)");
  simulate->add_option("--suite", sim_suite, "Write this many standard scenes instead");
  simulate->add_option("--seed", seed, "Generation seed");
  simulate->add_option("--out", sim_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      refvos::PipelineConfig config;
      if (!config_file.empty()) config = refvos::load_config(config_file);
      if (offline) config.reasoner.offline = true;
      std::vector<std::string> queries;
      if (!queries_file.empty()) queries = read_queries(queries_file);
      else if (!query.empty()) queries = {query};
      if (queries.empty()) throw refvos::InputError("give --query or --queries");

      const refvos::PerceptionBundle bundle = refvos::load_bundle(bundle_dir);
      const refvos::PerceptionContext ctx = refvos::build_perception_context(bundle, config);
      std::unique_ptr<refvos::ChatEndpoint> endpoint;
      if (!config.reasoner.offline)
        endpoint = std::make_unique<refvos::HttpChatEndpoint>(config.reasoner);
      refvos::PipelineServices services;
      services.endpoint = endpoint.get();
      services.context = &ctx;
      if (dump_tracks) {
        write_file(fs::path(out_dir) / "tracks.txt", track_dump(ctx));
        if (ctx.camera) write_file(fs::path(out_dir) / "camera.txt", ctx.camera->dump());
      }
      for (std::size_t i = 0; i < queries.size(); ++i) {
        fs::path dir = out_dir;
        if (queries.size() > 1) {
          char name[32];
          std::snprintf(name, sizeof name, "q%03zu", i);
          dir /= name;
        }
        const refvos::RunResult r = refvos::run_pipeline(bundle, queries[i], config, services);
        refvos::write_run_outputs(r, dir);
        if (overlay) refvos::render_overlays(r, bundle, dir / "overlay");
        std::cout << dir.string() << ": selected";
        for (int id : r.selected_ids) std::cout << " " << id;
        std::cout << " (|C|=" << r.candidate_count << ", |C'|=" << r.filtered_count
                  << ", via " << r.selection << ")\n";
      }
    } else if (*eval) {
      const refvos::MaskSequence pred =
          refvos::read_result_masks(file_or_child(pred_dir, "results.json"));
      const refvos::LoadedGroundTruth gt =
          refvos::load_ground_truth(file_or_child(gt_dir, "ground_truth.json"));
      const std::string report = refvos::format_report(refvos::evaluate(pred, gt.target, radius));
      std::cout << report;
      if (!eval_out.empty()) write_file(eval_out, report);
    } else if (*ablate) {
      refvos::PipelineConfig config;
      if (!ablate_config.empty()) config = refvos::load_config(ablate_config);
      std::vector<refvos::AblationScene> scenes;
      if (!scenes_dir.empty()) {
        scenes = load_scene_dir(scenes_dir);
      } else if (suite_count > 0) {
        const auto specs = refvos::standard_suite(suite_count, suite_seed);
        for (std::size_t i = 0; i < specs.size(); ++i) {
          refvos::GeneratedScene g = refvos::generate_scene(specs[i], suite_seed * 1000 + i);
          scenes.push_back({specs[i].name, std::move(g.bundle), g.query,
                            std::move(g.truth.target), specs[i].tags});
        }
      } else {
        throw refvos::InputError("give --scenes or --suite");
      }
      const refvos::AblationReport report = refvos::run_ablation_suite(scenes, config);
      std::cout << report.format();
      write_file(report_file, report.format());
    } else if (*simulate) {
      if (sim_suite > 0) {
        const auto specs = refvos::standard_suite(sim_suite, seed);
        for (std::size_t i = 0; i < specs.size(); ++i) {
          const refvos::GeneratedScene g = refvos::generate_scene(specs[i], seed * 1000 + i);
          refvos::save_scene(g, fs::path(sim_out) / specs[i].name);
          std::cout << specs[i].name << ": " << g.query << "\n";
        }
      } else {
        if (spec_file.empty()) throw refvos::InputError("give --spec or --suite");
        const refvos::GeneratedScene g =
            refvos::generate_scene(refvos::load_scene_spec(spec_file), seed);
        refvos::save_scene(g, sim_out);
        std::cout << g.query << "\n";
      }
    }
  } catch (const refvos::ValidationError& e) {
    // what() already leads with the field path.
    std::cerr << "refvos: invalid " << e.what() << "\n";
    return 1;
  } catch (const refvos::Error& e) {
    std::cerr << "refvos: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "refvos: unexpected failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
