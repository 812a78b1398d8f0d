// Copyright 2026 The Crossview Authors
// SPDX-License-Identifier: Apache-2.0

#include "crossview/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "crossview/correspondence.hpp"
#include "crossview/denoiser.hpp"
#include "crossview/rng.hpp"
#include "crossview/diffusion.hpp"
#include "crossview/homography.hpp"
#include "crossview/metrics.hpp"
#include "crossview/scene.hpp"
#include "crossview/view_projection.hpp"

namespace crossview {

namespace {

namespace fs = std::filesystem;

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string rig = "default";
  std::string scene = "default";
  std::string out = "out";
  double yaw = 0.0;
  bool no_reassign = false;
  double cutoff = 0.6;
  int k_window = 3;
  int steps = 50;
  bool json = false;
  std::string ckpt;
  std::string images;
  std::string prefix = "gen_view_";
  int train_steps = 600;
};

CameraRig resolve_rig(const CommonOpts& o) {
  CameraRig rig = o.rig == "default" ? make_default_rig() : load_rig(o.rig);
  if (o.yaw != 0.0) rig = rotate_rig(rig, o.yaw);
  return rig;
}

SceneSpec resolve_scene(const CommonOpts& o) {
  return o.scene == "default" ? default_scene_spec(o.seed) : load_scene_spec(o.scene);
}

Image colorize(const PerspectiveSemantics& sem) {
  Image img(sem.height, sem.width, 3);
  for (int y = 0; y < sem.height; ++y)
    for (int x = 0; x < sem.width; ++x) img.set_rgb(y, x, class_color(sem.at(y, x)));
  return img;
}

std::vector<Condition> scene_conditions(const std::vector<PerspectiveSemantics>& sems) {
  std::vector<Condition> conds;
  conds.reserve(sems.size());
  for (const auto& sem : sems)
    conds.push_back(make_condition(sem, kClassCount, {0.5, 0.5, 0.5, 1.0}));
  return conds;
}

TinyDenoiser resolve_denoiser(const CommonOpts& o, const CameraRig& rig) {
  const int h = rig.image_height / kLatentFactor;
  const int w = rig.image_width / kLatentFactor;
  auto maps = build_all_maps(rig, h, w, kLatentFactor);
  if (!o.ckpt.empty()) return TinyDenoiser::load(o.ckpt, std::move(maps));
  TinyDenoiser::Config config;
  config.window = o.k_window;
  return TinyDenoiser(config, std::move(maps), rng::mix(o.seed, 0x1497));
}

int cmd_project(const CommonOpts& o) {
  const CameraRig rig = resolve_rig(o);
  const SynthScene scene = synth_bev_scene(resolve_scene(o));
  const auto sems = project_all_views(scene.bev, rig);
  fs::create_directories(o.out);
  save_labels_pgm(scene.bev.labels, scene.bev.height, scene.bev.width,
                  (fs::path(o.out) / "bev.pgm").string());
  {
    Image bev_color(scene.bev.height, scene.bev.width, 3);
    for (int r = 0; r < scene.bev.height; ++r)
      for (int c = 0; c < scene.bev.width; ++c)
        bev_color.set_rgb(r, c, class_color(scene.bev.at(r, c)));
    save_image(bev_color, (fs::path(o.out) / "bev_color.ppm").string());
  }
  for (const auto& sem : sems) {
    const std::string stem = "view_" + std::to_string(sem.view) + "_sem";
    save_labels_pgm(sem.labels, sem.height, sem.width,
                    (fs::path(o.out) / (stem + ".pgm")).string());
    save_image(colorize(sem), (fs::path(o.out) / (stem + "_color.ppm")).string());
  }
  save_semantics_meta((fs::path(o.out) / "palette.meta").string(),
                      scene.bev.meters_per_cell, kClassCount, class_palette(),
                      class_names());
  std::cout << "wrote " << sems.size() << " semantic views to " << o.out << "\n";
  return 0;
}

int cmd_correspond(const CommonOpts& o) {
  const CameraRig rig = resolve_rig(o);
  const int h = rig.image_height / kLatentFactor;
  const int w = rig.image_width / kLatentFactor;
  const auto maps = build_all_maps(rig, h, w, kLatentFactor);
  fs::create_directories(o.out);
  std::ofstream stats((fs::path(o.out) / "correspond_stats.txt").string());
  if (!stats) throw std::runtime_error("cannot open stats file");
  for (int m = 1; m <= rig.view_count(); ++m) {
    const CorrespondenceMap& map = maps[static_cast<std::size_t>(m - 1)].to_right;
    const std::string tag =
        "pair_" + std::to_string(m) + "_" + std::to_string(map.target_view);
    save_overlap_mask(map, (fs::path(o.out) / (tag + "_mask.pgm")).string());
    save_coordinate_table(map, (fs::path(o.out) / (tag + "_coords.bin")).string());
    std::ofstream hfile((fs::path(o.out) / (tag + "_H.txt")).string());
    hfile << homography_to_line(
                 ground_homography(rig.camera(m), rig.camera(map.target_view)))
          << "\n";
    char line[160];
    std::snprintf(line, sizeof line, "pair %d %d overlap_fraction %.6f valid_cells %d\n",
                  m, map.target_view, map.overlap_fraction(), map.valid_count());
    stats << line;
    std::cout << line;
  }
  return 0;
}

struct GenerateArtifacts {
  GenerateResult result;
  std::vector<std::string> paths;
};

GenerateArtifacts run_generate(const CommonOpts& o, const CameraRig& rig,
                               const TinyDenoiser& denoiser) {
  const SynthScene scene = synth_bev_scene(resolve_scene(o));
  const auto sems = project_all_views(scene.bev, rig);
  const auto conds = scene_conditions(sems);
  const DiffusionSchedule schedule = DiffusionSchedule::linear(o.steps);

  GenerateOptions gen;
  gen.reassign = !o.no_reassign;
  gen.cutoff_fraction = o.cutoff;
  gen.seed = o.seed;

  GenerateArtifacts art;
  art.result = generate(conds, rig, denoiser.as_denoiser(schedule), schedule, gen);
  fs::create_directories(o.out);
  for (std::size_t m = 0; m < art.result.images.size(); ++m) {
    const std::string path =
        (fs::path(o.out) / ("gen_view_" + std::to_string(m + 1) + ".ppm")).string();
    save_image(art.result.images[m], path);
    art.paths.push_back(path);
  }
  std::ofstream manifest((fs::path(o.out) / "manifest.txt").string());
  if (!manifest) throw std::runtime_error("cannot open manifest");
  manifest << "seed " << o.seed << "\n";
  manifest << "steps " << o.steps << "\n";
  manifest << "cutoff " << o.cutoff << "\n";
  manifest << "reassign " << (gen.reassign ? "on" : "off") << "\n";
  manifest << "reassign_invocations " << art.result.reassign_invocations << "\n";
  manifest << "schedule_hash " << schedule.hash() << "\n";
  manifest << "k_window " << o.k_window << "\n";
  manifest << "yaw " << o.yaw << "\n";
  // paths relative to the manifest's own directory, so identical runs into
  // different directories produce identical bytes
  for (std::size_t m = 0; m < art.paths.size(); ++m)
    manifest << "image view_" << (m + 1) << " " << fs::path(art.paths[m]).filename().string()
             << "\n";
  return art;
}

int cmd_generate(const CommonOpts& o) {
  const CameraRig rig = resolve_rig(o);
  const TinyDenoiser denoiser = resolve_denoiser(o, rig);
  const auto art = run_generate(o, rig, denoiser);
  std::cout << "generated " << art.paths.size() << " views, "
            << art.result.reassign_invocations << " re-assignment passes\n";
  return 0;
}

MetricsReport evaluate_images(const CommonOpts& o, const CameraRig& rig,
                              const std::vector<Image>& images) {
  const SynthScene scene = synth_bev_scene(resolve_scene(o));
  const auto sems = project_all_views(scene.bev, rig);
  const GtViews gt = render_gt_views(scene, rig);

  MetricsReport report;

  double fid_sum = 0.0;
  for (std::size_t m = 0; m < images.size(); ++m) {
    const double p = image_psnr(images[m], gt.images[m]);
    report.add("fidelity_psnr_view_" + std::to_string(m + 1), p);
    fid_sum += p;
  }
  report.add("fidelity_psnr_mean", fid_sum / static_cast<double>(images.size()));

  const OverlapPsnrReport overlap = overlap_psnr(images, rig);
  for (const auto& pair : overlap.pairs) {
    const std::string key = "overlap_psnr_pair_" + std::to_string(pair.view) + "_" +
                            std::to_string(pair.neighbor);
    if (pair.valid)
      report.add(key, pair.psnr);
    else
      report.add_text(key, "skipped_empty_overlap");
  }
  report.add("overlap_psnr_mean", overlap.mean);

  // Nearest-palette classification stands in for a trained segmenter.
  std::vector<std::pair<std::array<double, 3>, std::uint8_t>> palette;
  for (int k = 0; k < kClassCount; ++k)
    palette.emplace_back(class_color(k), static_cast<std::uint8_t>(k));
  for (const auto& inst : scene.instances)
    palette.emplace_back(inst.vehicle.color, static_cast<std::uint8_t>(kVehicle));

  std::vector<PerspectiveSemantics> pred;
  std::vector<std::uint8_t> pred_all, gt_all;
  for (std::size_t m = 0; m < images.size(); ++m) {
    pred.push_back(classify_by_palette(images[m], static_cast<int>(m + 1), palette));
    pred_all.insert(pred_all.end(), pred.back().labels.begin(), pred.back().labels.end());
    gt_all.insert(gt_all.end(), sems[m].labels.begin(), sems[m].labels.end());
  }
  const IouReport persp = semantic_iou(pred_all, gt_all, kClassCount);
  for (int k = 0; k < kClassCount; ++k)
    if (persp.present[static_cast<std::size_t>(k)])
      report.add("persp_iou_class_" + class_names()[static_cast<std::size_t>(k)],
                 persp.per_class[static_cast<std::size_t>(k)]);
  report.add("persp_iou_mean", persp.mean);

  const BevIouResult bev = bev_iou(pred, rig, scene.bev);
  report.add("bev_coverage", bev.covered_fraction);
  if (bev.defined) {
    for (int k = 0; k < kClassCount; ++k)
      if (bev.iou.present[static_cast<std::size_t>(k)])
        report.add("bev_iou_class_" + class_names()[static_cast<std::size_t>(k)],
                   bev.iou.per_class[static_cast<std::size_t>(k)]);
    report.add("bev_iou_mean", bev.iou.mean);
  } else {
    report.add_text("bev_iou", "undefined_no_coverage");
  }

  if (!gt.masks.empty()) {
    const InstanceColorReport colors = instance_color_report(images, gt.masks);
    for (const auto& inst : colors.instances) {
      const std::string key = "delta_e_instance_" + std::to_string(inst.id);
      if (inst.valid)
        report.add(key, inst.delta_e);
      else
        report.add_text(key, "skipped_empty_mask");
    }
    report.add("delta_e_mean", colors.mean);
    report.add("delta_e_std", colors.stddev);
  }
  return report;
}

int cmd_evaluate(const CommonOpts& o) {
  const CameraRig rig = resolve_rig(o);
  const std::string dir = o.images.empty() ? o.out : o.images;
  std::vector<Image> images;
  for (int m = 1; m <= rig.view_count(); ++m) {
    const std::string path =
        (fs::path(dir) / (o.prefix + std::to_string(m) + ".ppm")).string();
    images.push_back(load_image(path));
  }
  const MetricsReport report = evaluate_images(o, rig, images);
  fs::create_directories(o.out);
  const std::string path =
      (fs::path(o.out) / (o.json ? "report.json" : "report.txt")).string();
  std::ofstream out(path);
  out << (o.json ? report.to_json() : report.to_text());
  std::cout << report.to_text();
  std::cout << "report written to " << path << "\n";
  return 0;
}

int cmd_demo(const CommonOpts& o) {
  const CameraRig rig = resolve_rig(o);
  const SynthScene scene = synth_bev_scene(resolve_scene(o));
  fs::create_directories(o.out);

  CommonOpts po = o;
  cmd_project(po);

  CommonOpts co = o;
  cmd_correspond(co);

  // Train the toy denoiser on the flat-shaded renders of this scene.
  const GtViews gt = render_gt_views(scene, rig);
  for (std::size_t m = 0; m < gt.images.size(); ++m)
    save_image(gt.images[m],
               (fs::path(o.out) / ("gt_view_" + std::to_string(m + 1) + ".ppm")).string());
  const auto sems = project_all_views(scene.bev, rig);
  const auto conds = scene_conditions(sems);
  LatentStack sample = LatentStack::zeros(rig.view_count(),
                                          rig.image_height / kLatentFactor,
                                          rig.image_width / kLatentFactor,
                                          kLatentChannels);
  for (std::size_t m = 0; m < gt.images.size(); ++m)
    sample.views[m] = encode_image(gt.images[m]);

  const DiffusionSchedule schedule = DiffusionSchedule::linear(o.steps);
  TinyDenoiser denoiser = resolve_denoiser(o, rig);
  const auto losses = denoiser.train({sample}, {conds}, schedule, o.seed, o.train_steps);
  std::cout << "training loss " << losses.front() << " -> " << losses.back() << " ("
            << o.train_steps << " steps)\n";
  const std::string ckpt_path = (fs::path(o.out) / "denoiser_ckpt.txt").string();
  denoiser.save(ckpt_path);

  const auto art = run_generate(o, rig, denoiser);
  const MetricsReport report = evaluate_images(o, rig, art.result.images);
  std::ofstream rep((fs::path(o.out) / (o.json ? "report.json" : "report.txt")).string());
  rep << (o.json ? report.to_json() : report.to_text());
  std::cout << report.to_text();
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--seed", o.seed, "deterministic run seed");
  cmd->add_option("--rig", o.rig, "rig file path or 'default'");
  cmd->add_option("--scene", o.scene, "scene spec path or 'default'");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--yaw", o.yaw, "extra rig yaw in degrees");
  cmd->add_flag("--no-reassign", o.no_reassign,
                "disable noise sync and latent re-assignment");
  cmd->add_option("--cutoff", o.cutoff, "re-assignment cutoff fraction of steps")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--k-window", o.k_window, "attention window size (odd)");
  cmd->add_option("--steps", o.steps, "diffusion step count")->check(CLI::PositiveNumber);
  cmd->add_flag("--json", o.json, "emit the metrics report as JSON");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Multi-view consistency engine: BEV semantics to consistent views"};
  app.require_subcommand(1);
  CommonOpts o;

  CLI::App* project = app.add_subcommand("project", "project BEV semantics to views");
  add_common(project, o);
  CLI::App* correspond =
      app.add_subcommand("correspond", "overlap masks, homographies, coverage stats");
  add_common(correspond, o);
  CLI::App* gen = app.add_subcommand("generate", "sample multi-view images");
  add_common(gen, o);
  gen->add_option("--ckpt", o.ckpt, "denoiser checkpoint to load");
  CLI::App* evaluate = app.add_subcommand("evaluate", "metrics report for an image set");
  add_common(evaluate, o);
  evaluate->add_option("--images", o.images, "directory holding the image set");
  evaluate->add_option("--prefix", o.prefix, "image filename prefix");
  CLI::App* demo = app.add_subcommand("demo", "scene -> project -> train -> generate -> evaluate");
  add_common(demo, o);
  demo->add_option("--train-steps", o.train_steps, "denoiser training steps");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (project->parsed()) return cmd_project(o);
    if (correspond->parsed()) return cmd_correspond(o);
    if (gen->parsed()) return cmd_generate(o);
    if (evaluate->parsed()) return cmd_evaluate(o);
    if (demo->parsed()) return cmd_demo(o);
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error (domain): " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error (config): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace crossview
