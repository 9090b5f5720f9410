// adgan command line tool.
#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adgan/config.hpp"
#include "adgan/diagnostics.hpp"
#include "adgan/error.hpp"
#include "adgan/image_io.hpp"
#include "adgan/inference.hpp"
#include "adgan/masksynth.hpp"
#include "adgan/metrics.hpp"
#include "adgan/phantom.hpp"
#include "adgan/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace adgan;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string device;
  bool quiet = false;
};

torch::Device pick_device(const std::string& requested) {
  std::string name = requested;
  if (name.empty()) {
    const char* env = std::getenv("ADGAN_DEVICE");
    name = env != nullptr && *env != '\0' ? env : "cpu";
  }
  try {
    return torch::Device(name);
  } catch (const c10::Error&) {
    throw ConfigError("unknown device '" + name + "'");
  }
}

config::RunConfig read_config(const std::string& path) {
  return path.empty() ? config::RunConfig{} : config::load_run_config(path);
}

void write_json(const json& j, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Records what produced a directory's contents.
void write_run_manifest(const fs::path& dir, const std::string& command, json params) {
  params["command"] = command;
  write_json(params, dir / "run.json");
}

/// A single file, or every image in a directory.
std::vector<fs::path> inputs_of(const fs::path& input) {
  if (fs::is_directory(input)) {
    auto files = io::list_images(input);
    if (files.empty()) throw IoError("no images in " + input.string());
    return files;
  }
  if (!fs::exists(input)) throw IoError("input not found: " + input.string());
  return {input};
}

model::Domain parse_domain(const std::string& s) {
  if (s == "image") return model::Domain::kImage;
  if (s == "mask") return model::Domain::kMask;
  throw ConfigError("domain must be 'image' or 'mask', got '" + s + "'");
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size()));
}

json summary(const std::vector<double>& v) { return {{"mean", mean_of(v)}, {"std", std_of(v)}}; }

/// Pairs prediction and reference files by sorted position.
std::vector<std::pair<fs::path, fs::path>> paired_files(const fs::path& pred_dir, const fs::path& ref_dir) {
  const auto pred = io::list_images(pred_dir);
  const auto ref = io::list_images(ref_dir);
  if (pred.empty()) throw IoError("no images in " + pred_dir.string());
  if (pred.size() != ref.size()) {
    throw IoError(pred_dir.string() + " has " + std::to_string(pred.size()) + " images but " + ref_dir.string() +
                  " has " + std::to_string(ref.size()));
  }
  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (std::size_t k = 0; k < pred.size(); ++k) pairs.emplace_back(pred[k], ref[k]);
  return pairs;
}

BinaryMask foreground(const LabelMap& labels) {
  BinaryMask m(labels.height, labels.width);
  for (std::size_t i = 0; i < labels.size(); ++i) m.data[i] = labels.data[i] != 0;
  return m;
}

// ---- subcommands ----------------------------------------------------------

struct DefaultConfigArgs {
  std::string out;
  bool desk = false;
};

int run_default_config(const DefaultConfigArgs& a) {
  const auto cfg = a.desk ? config::RunConfig::desk() : config::RunConfig{};
  if (a.out.empty()) {
    std::cout << config::to_json(cfg).dump(2) << '\n';
  } else {
    config::save_run_config(cfg, a.out);
  }
  return 0;
}

struct SynthArgs {
  std::string config;
  int count = 1;
  std::string out;
  bool instance = false;
};

int run_synth_masks(const SynthArgs& a, const Globals& g) {
  const auto cfg = read_config(a.config);
  const fs::path out(a.out);
  fs::create_directories(out);
  for (int k = 0; k < a.count; ++k) {
    const auto spec = masksynth::generate_mask(derive_seed(g.seed, 4, static_cast<std::uint64_t>(k)), cfg.masksynth);
    std::ostringstream stem;
    stem << "mask_" << std::setw(4) << std::setfill('0') << k;
    const auto image = a.instance ? masksynth::rasterize_instance_mask(spec, cfg.masksynth.edge_width)
                                  : masksynth::rasterize_mask(spec);
    io::save_image(image, out / (stem.str() + ".png"), 8);
    write_json(json(spec), out / (stem.str() + ".json"));
  }
  write_run_manifest(out, "synth-masks",
                     {{"count", a.count}, {"seed", g.seed}, {"instance", a.instance},
                      {"masksynth", config::to_json(cfg.masksynth)}});
  return 0;
}

struct PhantomArgs {
  std::string config;
  int count = 1;
  std::string out;
  bool instance = false;
};

int run_gen_phantom(const PhantomArgs& a, const Globals& g) {
  const auto cfg = read_config(a.config);
  phantom::make_dataset(a.count, cfg.masksynth, cfg.phantom, g.seed, a.out,
                        a.instance ? phantom::MaskKind::kInstance : phantom::MaskKind::kBinary);
  write_run_manifest(a.out, "gen-phantom",
                     {{"count", a.count}, {"seed", g.seed}, {"masksynth", config::to_json(cfg.masksynth)},
                      {"phantom", config::to_json(cfg.phantom)}});
  return 0;
}

struct TrainArgs {
  std::string images;
  std::string masks;
  std::string config;
  std::string out;
  std::string resume;
  std::optional<int> total_iters;
  int repeats = 1;
  int log_every = 50;
};

int run_train(const TrainArgs& a, const Globals& g) {
  auto cfg = read_config(a.config);
  if (g.seed_given) cfg.train.seed = g.seed;
  if (a.total_iters) {
    cfg.train.total_iters = *a.total_iters;
    cfg.train.const_lr_iters = std::min(cfg.train.const_lr_iters, cfg.train.total_iters);
  }
  cfg.validate();
  if (a.repeats < 1) throw ConfigError("--repeats must be >= 1");
  if (a.repeats > 1 && !a.resume.empty()) throw ConfigError("--resume cannot be combined with --repeats");
  const auto device = pick_device(g.device);

  for (int r = 0; r < a.repeats; ++r) {
    auto run_cfg = cfg;
    run_cfg.train.seed = cfg.train.seed + static_cast<std::uint64_t>(r);
    fs::path out(a.out);
    if (a.repeats > 1) {
      std::ostringstream name;
      name << "run_" << std::setw(2) << std::setfill('0') << r;
      out /= name.str();
    }
    fs::create_directories(out);
    config::save_run_config(run_cfg, out / "config.json");

    trainer::FitOptions options;
    options.images_dir = a.images;
    options.masks_dir = a.masks;
    options.out_dir = out;
    if (!a.resume.empty()) options.resume_from = fs::path(a.resume);
    if (!g.quiet) {
      options.on_step = [&](const trainer::StepReport& s) {
        if (a.log_every > 0 && (s.iteration + 1) % a.log_every == 0) {
          std::cerr << "iter " << s.iteration + 1 << "/" << run_cfg.train.total_iters << "  total " << s.total
                    << "  rec " << s.rec << "  adv_d " << s.adv_d << "  adv_g " << s.adv_g << '\n';
        }
      };
    }
    const auto result = trainer::fit(options, run_cfg.generator, run_cfg.train, device);
    write_run_manifest(out, "train",
                       {{"images", a.images},
                        {"masks", a.masks},
                        {"seed", run_cfg.train.seed},
                        {"final_checkpoint", result.final_checkpoint.string()},
                        {"log", result.log_path.string()}});
    std::cout << result.final_checkpoint.string() << '\n';
  }
  return 0;
}

struct InferArgs {
  std::string ckpt;
  std::string input;
  std::string out;
  int tile = 256;
  int overlap = 16;
};

inference::TileOptions tiles_of(const InferArgs& a) { return {a.tile, a.overlap}; }

struct TranslateArgs : InferArgs {
  std::string from = "image";
  std::string to = "mask";
};

int run_translate(const TranslateArgs& a, const Globals& g) {
  auto session = inference::InferenceSession::from_checkpoint(a.ckpt, pick_device(g.device));
  const auto src = parse_domain(a.from);
  const auto dst = parse_domain(a.to);
  fs::create_directories(a.out);
  for (const auto& file : inputs_of(a.input)) {
    const auto y = session.translate(io::load_image(file), src, dst, tiles_of(a));
    io::save_image(y, fs::path(a.out) / (file.stem().string() + ".png"), dst == model::Domain::kMask ? 8 : 16);
  }
  write_run_manifest(a.out, "translate", {{"ckpt", a.ckpt}, {"input", a.input}, {"from", a.from}, {"to", a.to}});
  return 0;
}

struct SegmentArgs : InferArgs {
  int erosion = 2;
  float threshold = 0.0f;
  std::string labels_out;
};

int run_segment(const SegmentArgs& a, const Globals& g) {
  auto session = inference::InferenceSession::from_checkpoint(a.ckpt, pick_device(g.device));
  fs::create_directories(a.out);
  if (!a.labels_out.empty()) fs::create_directories(a.labels_out);
  for (const auto& file : inputs_of(a.input)) {
    const auto r = session.segment(io::load_image(file), a.erosion, a.threshold, tiles_of(a));
    const auto name = file.stem().string() + ".png";
    io::save_binary_mask(r.mask, fs::path(a.out) / name);
    if (!a.labels_out.empty()) io::save_label_map(r.labels, fs::path(a.labels_out) / name);
  }
  write_run_manifest(a.out, "segment",
                     {{"ckpt", a.ckpt}, {"input", a.input}, {"erosion", a.erosion}, {"threshold", a.threshold}});
  return 0;
}

struct InstanceArgs : InferArgs {
  float t_lo = -0.33f;
  float t_hi = 0.33f;
};

int run_segment_instances(const InstanceArgs& a, const Globals& g) {
  auto session = inference::InferenceSession::from_checkpoint(a.ckpt, pick_device(g.device));
  fs::create_directories(a.out);
  for (const auto& file : inputs_of(a.input)) {
    const auto r = session.instance_segment(io::load_image(file), {a.t_lo, a.t_hi}, tiles_of(a));
    io::save_label_map(r.labels, fs::path(a.out) / (file.stem().string() + ".png"));
  }
  write_run_manifest(a.out, "segment-instances",
                     {{"ckpt", a.ckpt}, {"input", a.input}, {"t_lo", a.t_lo}, {"t_hi", a.t_hi}});
  return 0;
}

int run_synthesize(const InferArgs& a, const Globals& g) {
  auto session = inference::InferenceSession::from_checkpoint(a.ckpt, pick_device(g.device));
  fs::create_directories(a.out);
  for (const auto& file : inputs_of(a.input)) {
    io::save_image(session.synthesize(io::load_image(file), tiles_of(a)),
                   fs::path(a.out) / (file.stem().string() + ".png"), 16);
  }
  write_run_manifest(a.out, "synthesize", {{"ckpt", a.ckpt}, {"input", a.input}});
  return 0;
}

struct InterpolateArgs : InferArgs {
  int steps = 10;
  std::string from = "image";
  std::string to = "mask";
};

int run_interpolate(const InterpolateArgs& a, const Globals& g) {
  auto session = inference::InferenceSession::from_checkpoint(a.ckpt, pick_device(g.device));
  for (const auto& file : inputs_of(a.input)) {
    const auto frames = session.interpolate_domains(io::load_image(file), a.steps, parse_domain(a.from),
                                                    parse_domain(a.to), tiles_of(a));
    const fs::path dir = fs::path(a.out) / file.stem();
    fs::create_directories(dir);
    for (std::size_t k = 0; k < frames.size(); ++k) {
      std::ostringstream name;
      name << "frame_" << std::setw(2) << std::setfill('0') << k << ".png";
      io::save_image(frames[k], dir / name.str(), 16);
    }
  }
  write_run_manifest(a.out, "interpolate", {{"ckpt", a.ckpt}, {"input", a.input}, {"steps", a.steps}});
  return 0;
}

struct EvaluateArgs {
  std::string pred;
  std::string gt;
  std::string out;
  std::optional<double> det;
  double iou = 0.5;
};

int run_evaluate(const EvaluateArgs& a) {
  json per_image = json::array();
  std::vector<double> precision, recall, dice, f1, seg;
  std::ostringstream csv;
  csv << "image,precision,recall,dice,f1,seg\n";
  for (const auto& [pred_file, gt_file] : paired_files(a.pred, a.gt)) {
    const auto pred = io::load_objects(pred_file);
    const auto gt = io::load_objects(gt_file);
    const auto px = metrics::pixel_metrics(foreground(pred), foreground(gt));
    const auto obj = metrics::object_f1(pred, gt, a.iou);
    precision.push_back(px.precision);
    recall.push_back(px.recall);
    dice.push_back(px.dice);
    f1.push_back(obj.f1);
    seg.push_back(obj.seg_score);
    json row{{"image", pred_file.filename().string()},
             {"reference", gt_file.filename().string()},
             {"pixel", {{"tp", px.n_tp}, {"fp", px.n_fp}, {"fn", px.n_fn},
                        {"precision", px.precision}, {"recall", px.recall}, {"dice", px.dice}}},
             {"object", {{"n_gt", obj.n_gt}, {"n_pred", obj.n_pred}, {"matches", obj.matches},
                         {"f1", obj.f1}, {"seg", obj.seg_score}}}};
    csv << pred_file.filename().string() << ',' << px.precision << ',' << px.recall << ',' << px.dice << ','
        << obj.f1 << ',' << obj.seg_score << '\n';
    per_image.push_back(std::move(row));
  }
  json aggregate{{"precision", summary(precision)}, {"recall", summary(recall)}, {"dice", summary(dice)},
                 {"f1", summary(f1)},               {"seg", summary(seg)}};
  // DET comes from the external tracking-challenge evaluator; it is not
  // computed here.
  if (a.det) {
    aggregate["det"] = *a.det;
    aggregate["op_csb"] = metrics::op_csb(mean_of(seg), *a.det);
  }
  const fs::path out(a.out);
  write_json({{"iou_threshold", a.iou}, {"images", per_image}, {"aggregate", aggregate}}, out);
  std::ofstream table(fs::path(out).replace_extension(".csv"));
  table << csv.str();
  std::cout << "dice " << mean_of(dice) << " +- " << std_of(dice) << "  f1 " << mean_of(f1) << '\n';
  return 0;
}

struct DiagnoseArgs {
  std::string pred;
  std::string ref;
  std::string out;
  double iou = diagnostics::kDiagnosticIou;
};

int run_diagnose(const DiagnoseArgs& a) {
  json per_image = json::array();
  std::vector<double> abs_delta, offsets;
  for (const auto& [pred_file, ref_file] : paired_files(a.pred, a.ref)) {
    const auto report = diagnostics::lossy_report(io::load_objects(pred_file), io::load_objects(ref_file), a.iou);
    abs_delta.push_back(std::abs(report.count_delta));
    if (!report.matched_centroid_offsets.empty()) offsets.push_back(report.mean_offset);
    auto row = diagnostics::to_json(report);
    row["image"] = pred_file.filename().string();
    per_image.push_back(std::move(row));
  }
  write_json({{"iou_threshold", a.iou},
              {"images", per_image},
              {"aggregate", {{"abs_count_delta", summary(abs_delta)}, {"mean_offset", summary(offsets)}}}},
             a.out);
  std::cout << "mean |count_delta| " << mean_of(abs_delta) << '\n';
  return 0;
}

struct FeatureArgs {
  std::string ckpt;
  std::string images;
  std::string domain = "image";
  std::string out;
};

int run_export_features(const FeatureArgs& a, const Globals& g) {
  auto session = inference::InferenceSession::from_checkpoint(a.ckpt, pick_device(g.device));
  const auto rows = diagnostics::export_content_features(session, a.images, parse_domain(a.domain), a.out);
  std::cout << rows.size() << " rows written to " << a.out << '\n';
  return 0;
}

int run_describe(const std::string& ckpt) {
  const auto info = trainer::describe_checkpoint(ckpt);
  json params = json::array();
  for (const auto& [name, shape] : info.parameter_shapes) params.push_back({{"name", name}, {"shape", shape}});
  std::cout << json{{"iteration", info.iteration},
                    {"generator_config", info.generator_config},
                    {"train_config", info.train_config},
                    {"parameters", params}}
                   .dump(2)
            << '\n';
  return 0;
}

void add_infer_options(CLI::App* cmd, InferArgs& a, const char* input_help) {
  cmd->add_option("--ckpt", a.ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--input", a.input, input_help)->required();
  cmd->add_option("--out", a.out, "Output directory")->required();
  cmd->add_option("--tile", a.tile, "Tile size for large images (0 disables tiling)")->capture_default_str();
  cmd->add_option("--overlap", a.overlap, "Tile overlap in pixels")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised nuclei segmentation by unpaired image/mask translation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--device", g.device, "Torch device (default: $ADGAN_DEVICE or cpu)");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  DefaultConfigArgs dc;
  auto* c_dc = app.add_subcommand("default-config", "Print or write the default configuration");
  c_dc->add_option("--out", dc.out, "Write to this file instead of stdout");
  c_dc->add_flag("--desk", dc.desk, "Emit the reduced CPU preset");

  SynthArgs sm;
  auto* c_sm = app.add_subcommand("synth-masks", "Generate synthetic ellipse masks");
  c_sm->add_option("--config", sm.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  c_sm->add_option("--count", sm.count, "Number of masks")->required()->check(CLI::PositiveNumber);
  c_sm->add_option("--out", sm.out, "Output directory")->required();
  c_sm->add_flag("--instance", sm.instance, "Write ternary masks with gray edges");

  PhantomArgs gp;
  auto* c_gp = app.add_subcommand("gen-phantom", "Render a phantom dataset");
  c_gp->add_option("--config", gp.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  c_gp->add_option("--count", gp.count, "Number of images")->required()->check(CLI::PositiveNumber);
  c_gp->add_option("--out", gp.out, "Output directory")->required();
  c_gp->add_flag("--instance", gp.instance, "Unpaired masks are ternary instance masks");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train a model on unpaired images and masks");
  c_tr->add_option("--images", tr.images, "Image-domain directory")->required()->check(CLI::ExistingDirectory);
  c_tr->add_option("--masks", tr.masks, "Mask-domain directory")->required()->check(CLI::ExistingDirectory);
  c_tr->add_option("--config", tr.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  c_tr->add_option("--out", tr.out, "Output directory")->required();
  c_tr->add_option("--resume", tr.resume, "Resume from a checkpoint")->check(CLI::ExistingFile);
  c_tr->add_option("--total-iters", tr.total_iters, "Override train.total_iters");
  c_tr->add_option("--repeats", tr.repeats, "Independent runs with seeds seed, seed+1, ...")->capture_default_str();
  c_tr->add_option("--log-every", tr.log_every, "Progress interval in iterations (0 = off)")->capture_default_str();

  TranslateArgs tl;
  auto* c_tl = app.add_subcommand("translate", "Translate images between domains");
  add_infer_options(c_tl, tl, "Input image or directory");
  c_tl->add_option("--from", tl.from, "Source domain (image|mask)")->capture_default_str();
  c_tl->add_option("--to", tl.to, "Target domain (image|mask)")->capture_default_str();

  SegmentArgs sg;
  auto* c_sg = app.add_subcommand("segment", "Semantic segmentation to binary masks");
  add_infer_options(c_sg, sg, "Input image or directory");
  c_sg->add_option("--erosion", sg.erosion, "Erosion radius for watershed markers")->capture_default_str();
  c_sg->add_option("--threshold", sg.threshold, "Binarization threshold")->capture_default_str();
  c_sg->add_option("--labels-out", sg.labels_out, "Also write 16-bit watershed label maps here");

  InstanceArgs si;
  auto* c_si = app.add_subcommand("segment-instances", "Instance segmentation to 16-bit label maps");
  add_infer_options(c_si, si, "Input image or directory");
  c_si->add_option("--t-lo", si.t_lo, "Background/edge threshold")->capture_default_str();
  c_si->add_option("--t-hi", si.t_hi, "Edge/interior threshold")->capture_default_str();

  InferArgs sy;
  auto* c_sy = app.add_subcommand("synthesize", "Render images from masks");
  add_infer_options(c_sy, sy, "Input mask or directory");

  InterpolateArgs ip;
  auto* c_ip = app.add_subcommand("interpolate", "Decode with interpolated domain labels");
  add_infer_options(c_ip, ip, "Input image or directory");
  c_ip->add_option("--steps", ip.steps, "Number of frames (>= 2)")->capture_default_str();
  c_ip->add_option("--from", ip.from, "Source domain (image|mask)")->capture_default_str();
  c_ip->add_option("--to", ip.to, "Target domain (image|mask)")->capture_default_str();

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score predictions against ground truth");
  c_ev->add_option("--pred", ev.pred, "Prediction directory")->required()->check(CLI::ExistingDirectory);
  c_ev->add_option("--gt", ev.gt, "Ground-truth directory")->required()->check(CLI::ExistingDirectory);
  c_ev->add_option("--out", ev.out, "Report JSON path (a CSV is written next to it)")->required();
  c_ev->add_option("--det", ev.det, "Dataset DET score; enables OP_csb = (SEG + DET) / 2")
      ->check(CLI::Range(0.0, 1.0));
  c_ev->add_option("--iou", ev.iou, "IoU threshold for object matching")->capture_default_str();

  DiagnoseArgs dg;
  auto* c_dg = app.add_subcommand("diagnose", "Measure object deletion, addition and offsets");
  c_dg->add_option("--pred", dg.pred, "Prediction directory")->required()->check(CLI::ExistingDirectory);
  c_dg->add_option("--ref", dg.ref, "Reference directory")->required()->check(CLI::ExistingDirectory);
  c_dg->add_option("--out", dg.out, "Report JSON path")->required();
  c_dg->add_option("--iou", dg.iou, "IoU threshold for matching")->capture_default_str();

  FeatureArgs ef;
  auto* c_ef = app.add_subcommand("export-features", "Write pooled content features as CSV");
  c_ef->add_option("--ckpt", ef.ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  c_ef->add_option("--images", ef.images, "Image directory")->required()->check(CLI::ExistingDirectory);
  c_ef->add_option("--domain", ef.domain, "Domain of the images (image|mask)")->capture_default_str();
  c_ef->add_option("--out", ef.out, "CSV path")->required();

  std::string describe_ckpt;
  auto* c_dc2 = app.add_subcommand("describe-checkpoint", "Print checkpoint metadata and parameter shapes");
  c_dc2->add_option("--ckpt", describe_ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*c_dc) return run_default_config(dc);
    if (*c_sm) return run_synth_masks(sm, g);
    if (*c_gp) return run_gen_phantom(gp, g);
    if (*c_tr) return run_train(tr, g);
    if (*c_tl) return run_translate(tl, g);
    if (*c_sg) return run_segment(sg, g);
    if (*c_si) return run_segment_instances(si, g);
    if (*c_sy) return run_synthesize(sy, g);
    if (*c_ip) return run_interpolate(ip, g);
    if (*c_ev) return run_evaluate(ev);
    if (*c_dg) return run_diagnose(dg);
    if (*c_ef) return run_export_features(ef, g);
    if (*c_dc2) return run_describe(describe_ckpt);
  } catch (const adgan::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
