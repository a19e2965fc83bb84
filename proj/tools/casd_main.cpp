#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "casd/candidates.hpp"
#include "casd/error.hpp"
#include "casd/eval.hpp"
#include "casd/identity.hpp"
#include "casd/io.hpp"
#include "casd/kernels.hpp"
#include "casd/offscreen.hpp"
#include "casd/preprocess.hpp"
#include "casd/solver.hpp"
#include "casd/synth.hpp"
#include "casd/types.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

const char* error_kind(const casd::Error& e) {
  if (dynamic_cast<const casd::ParseError*>(&e)) return "parse_error";
  if (dynamic_cast<const casd::ValidationError*>(&e)) return "validation_error";
  if (dynamic_cast<const casd::InvalidParameter*>(&e)) return "invalid_parameter";
  if (dynamic_cast<const casd::DimensionMismatch*>(&e)) return "dimension_mismatch";
  if (dynamic_cast<const casd::ZeroNorm*>(&e)) return "zero_norm";
  if (dynamic_cast<const casd::LengthMismatch*>(&e)) return "length_mismatch";
  if (dynamic_cast<const casd::OrderMismatch*>(&e)) return "order_mismatch";
  if (dynamic_cast<const casd::TooFewElements*>(&e)) return "too_few_elements";
  if (dynamic_cast<const casd::PinConflict*>(&e)) return "pin_conflict";
  if (dynamic_cast<const casd::TooLarge*>(&e)) return "too_large";
  if (dynamic_cast<const casd::MissingGroundTruth*>(&e)) return "missing_ground_truth";
  if (dynamic_cast<const casd::NoPositives*>(&e)) return "no_positives";
  if (dynamic_cast<const casd::SingleClass*>(&e)) return "single_class";
  if (dynamic_cast<const casd::EmptySample*>(&e)) return "empty_sample";
  if (dynamic_cast<const casd::CacheInconsistency*>(&e)) return "cache_inconsistency";
  return "error";
}

void write_json(const fs::path& path, const ordered_json& doc) {
  std::ofstream out(path);
  if (!out) throw casd::Error("cannot write file: " + path.string());
  out << doc.dump(2) << '\n';
}

std::map<casd::TrackId, std::int64_t> frame_weights(const std::vector<casd::FaceTrack>& tracks) {
  std::map<casd::TrackId, std::int64_t> weights;
  for (const auto& t : tracks)
    if (t.frame_count) weights.emplace(t.id, *t.frame_count);
  return weights;
}

struct AssignArgs {
  std::string segments_path;
  std::string tracks_path;
  std::string ground_truth_path;
  std::string pins_path;
  std::string out_dir = ".";
  casd::SolverConfig solver;
  double tau = 0.1;
  double min_overlap = 0.0;
  bool no_stage2 = false;
  bool dump_matrices = false;
  bool strict = false;
  std::string diagonal = "include";
};

int run_assign(const AssignArgs& args) {
  casd::SolverConfig config = args.solver;
  config.diagonal_policy = (args.diagonal == "exclude") ? casd::DiagonalPolicy::kExclude
                                                        : casd::DiagonalPolicy::kInclude;

  const auto segments = casd::io::load_segments(args.segments_path);
  const auto tracks = casd::io::load_tracks(args.tracks_path);
  const auto candidates = casd::build_candidate_map(segments, tracks, args.min_overlap);
  casd::PinSet pins;
  if (!args.pins_path.empty()) pins = casd::io::load_pins(args.pins_path);

  casd::Stage1Result stage1 = casd::solve_stage1(segments, tracks, candidates, pins, config);

  std::size_t removed = 0;
  std::vector<casd::AssignmentRecord> records = stage1.records;
  if (!args.no_stage2) {
    auto classified = casd::offscreen::classify_offscreen(std::move(records), args.tau);
    records = std::move(classified.records);
    removed = classified.removed;
  }

  fs::create_directories(args.out_dir);
  casd::io::save_assignments((fs::path(args.out_dir) / "assignments.jsonl").string(), records);

  ordered_json meta;
  meta["command"] = "assign";
  meta["kernel"] = std::string(casd::kernels::backend_name());
  meta["config"] = {{"partition_size", config.partition_size},
                    {"max_epochs", config.max_epochs},
                    {"convergence_eps", config.convergence_eps},
                    {"tie_eps", config.tie_eps},
                    {"seed", config.seed},
                    {"diagonal_policy", args.diagonal},
                    {"restarts", config.restarts},
                    {"workers", config.workers},
                    {"tau", args.tau},
                    {"min_overlap", args.min_overlap},
                    {"stage2", !args.no_stage2}};
  meta["purged_segments"] = candidates.purged;
  meta["partitions"] = ordered_json::array();
  bool all_converged = true;
  for (const auto& run : stage1.partitions) {
    ordered_json p;
    p["segments"] = run.segment_ids.size();
    p["objective"] = run.objective;
    p["epoch_history"] = run.epoch_history;
    p["converged"] = run.converged;
    p["best_restart"] = run.best_restart;
    p["restart_objectives"] = run.restart_objectives;
    meta["partitions"].push_back(std::move(p));
    all_converged = all_converged && run.converged;
  }
  if (!args.no_stage2) {
    meta["stage2_removed"] = removed;
  }

  if (!args.ground_truth_path.empty() && !args.no_stage2) {
    const auto gt = casd::io::load_ground_truth(args.ground_truth_path);
    try {
      const auto roc = casd::offscreen::roc_table(stage1.records, gt);
      std::ofstream out(fs::path(args.out_dir) / "roc_points.csv");
      out << "tau,tpr,fpr\n";
      out.precision(17);
      for (const auto& point : roc) out << point.tau << ',' << point.tpr << ',' << point.fpr << '\n';
    } catch (const casd::SingleClass&) {
      meta["roc_points"] = "skipped: ground truth has a single class";
    }
  }

  if (args.dump_matrices) {
    std::map<std::string, const casd::SpeechSegment*> seg_by_id;
    for (const auto& s : segments) seg_by_id.emplace(s.id, &s);
    std::map<std::string, const casd::FaceTrack*> track_by_id;
    for (const auto& t : tracks) track_by_id.emplace(t.id, &t);
    std::map<std::string, const casd::AssignmentRecord*> record_by_id;
    for (const auto& r : stage1.records) record_by_id.emplace(r.segment_id, &r);
    for (std::size_t p = 0; p < stage1.partitions.size(); ++p) {
      const auto& ids = stage1.partitions[p].segment_ids;
      std::vector<casd::EmbeddingVector> seg_embeddings, face_embeddings;
      for (const auto& id : ids) {
        seg_embeddings.push_back(seg_by_id.at(id)->embedding);
        face_embeddings.push_back(track_by_id.at(*record_by_id.at(id)->track_id)->embedding);
      }
      const std::vector<std::string> order(ids.begin(), ids.end());
      casd::write_matrix_csv(
          (fs::path(args.out_dir) / ("sd_p" + std::to_string(p) + ".csv")).string(),
          casd::build_distance_matrix(seg_embeddings, order));
      casd::write_matrix_csv(
          (fs::path(args.out_dir) / ("fd_p" + std::to_string(p) + ".csv")).string(),
          casd::build_distance_matrix(face_embeddings, order));
    }
  }

  write_json(fs::path(args.out_dir) / "run_meta.json", meta);

  if (args.strict && !all_converged) {
    std::cerr << "{\"error\":{\"type\":\"non_convergence\",\"message\":\"a partition hit "
                 "max_epochs with residual gain\"}}\n";
    return 2;
  }
  return 0;
}

struct EvalArgs {
  std::string assignments_path;
  std::string segments_path;
  std::string tracks_path;
  std::string ground_truth_path;
  std::string out_dir = ".";
  double min_overlap = 0.0;
};

int run_eval(const EvalArgs& args) {
  const auto records = casd::io::load_assignments(args.assignments_path);
  const auto segments = casd::io::load_segments(args.segments_path);
  const auto tracks = casd::io::load_tracks(args.tracks_path);
  const auto gt = casd::io::load_ground_truth(args.ground_truth_path);
  const auto candidates = casd::build_candidate_map(segments, tracks, args.min_overlap);
  const auto weights = frame_weights(tracks);

  std::set<casd::TrackId> known_tracks;
  for (const auto& t : tracks) known_tracks.insert(t.id);
  for (const auto& [seg, truth] : gt.entries) {
    if (truth && !known_tracks.count(*truth))
      throw casd::ValidationError("ground truth references unknown track \"" + *truth +
                                  "\" for segment \"" + seg + "\"");
  }

  const auto report = casd::eval::evaluate(records, gt, candidates, weights);

  fs::create_directories(args.out_dir);
  ordered_json doc;
  doc["precision"] = report.confusion.precision;
  doc["recall"] = report.confusion.recall;
  doc["f1"] = report.confusion.f1;
  doc["map"] = report.map;
  if (report.auroc)
    doc["auroc"] = *report.auroc;
  else
    doc["auroc"] = nullptr;
  if (report.separation) {
    doc["mann_whitney"] = {{"u", report.separation->u},
                           {"p_value", report.separation->p_value},
                           {"exact", report.separation->exact}};
  } else {
    doc["mann_whitney"] = nullptr;
  }
  doc["counts"] = {{"tp", report.confusion.counts.tp},
                   {"fp", report.confusion.counts.fp},
                   {"fn", report.confusion.counts.fn},
                   {"tn", report.confusion.counts.tn}};
  doc["warnings"] = report.confusion.warnings;
  write_json(fs::path(args.out_dir) / "report.json", doc);
  for (const auto& warning : report.confusion.warnings)
    std::cerr << "warning: " << warning << '\n';

  // PR curve over the ranked units.
  {
    auto units = casd::eval::build_ranked_units(records, gt, candidates, weights);
    std::sort(units.begin(), units.end(),
              [](const casd::eval::RankedPrediction& a, const casd::eval::RankedPrediction& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.unit_id < b.unit_id;
              });
    double total_pos = 0.0;
    for (const auto& u : units)
      if (u.label) total_pos += u.weight;
    std::ofstream out(fs::path(args.out_dir) / "pr_curve.csv");
    out << "rank,score,precision,recall\n";
    out.precision(17);
    double cum = 0.0, cum_pos = 0.0;
    std::size_t rank = 0;
    for (const auto& u : units) {
      ++rank;
      cum += u.weight;
      if (u.label) cum_pos += u.weight;
      out << rank << ',' << u.score << ',' << (cum_pos / cum) << ','
          << (total_pos > 0.0 ? cum_pos / total_pos : 0.0) << '\n';
    }
  }

  if (report.auroc) {
    const auto roc = casd::offscreen::roc_table(records, gt);
    std::ofstream out(fs::path(args.out_dir) / "roc_curve.csv");
    out << "tau,tpr,fpr\n";
    out.precision(17);
    for (const auto& point : roc) out << point.tau << ',' << point.tpr << ',' << point.fpr << '\n';
  }
  return 0;
}

struct SynthArgs {
  std::string out_dir = ".";
  std::string preset = "default";
  casd::synth::ScenarioConfig config;
  casd::synth::ColumbiaConfig columbia;
};

int run_synth(const SynthArgs& args) {
  casd::synth::SyntheticScenario scenario;
  ordered_json config_doc;
  if (args.preset == "columbia") {
    scenario = casd::synth::generate_columbia_scenario(args.columbia);
    config_doc = {{"num_characters", args.columbia.num_characters},
                  {"num_segments", args.columbia.num_segments},
                  {"embedding_dim", args.columbia.embedding_dim},
                  {"audio_noise", args.columbia.audio_noise},
                  {"visual_noise", args.columbia.visual_noise},
                  {"seed", args.columbia.seed}};
  } else if (args.preset == "default") {
    scenario = casd::synth::generate_scenario(args.config);
    config_doc = {{"num_characters", args.config.num_characters},
                  {"num_segments", args.config.num_segments},
                  {"candidates_per_segment", args.config.candidates_per_segment},
                  {"audio_dim", args.config.audio_dim},
                  {"visual_dim", args.config.visual_dim},
                  {"audio_noise", args.config.audio_noise},
                  {"visual_noise", args.config.visual_noise},
                  {"offscreen_fraction", args.config.offscreen_fraction},
                  {"background_face_fraction", args.config.background_face_fraction},
                  {"min_separation", args.config.min_separation},
                  {"seed", args.config.seed}};
  } else {
    throw casd::InvalidParameter("unknown preset \"" + args.preset + "\"");
  }

  fs::create_directories(args.out_dir);
  casd::io::save_segments((fs::path(args.out_dir) / "segments.jsonl").string(),
                          scenario.segments);
  casd::io::save_tracks((fs::path(args.out_dir) / "tracks.jsonl").string(), scenario.tracks);
  casd::io::save_ground_truth((fs::path(args.out_dir) / "groundtruth.jsonl").string(),
                              scenario.ground_truth);

  ordered_json doc;
  doc["preset"] = args.preset;
  doc["config"] = config_doc;
  doc["segment_character"] = scenario.segment_character;
  doc["track_character"] = scenario.track_character;
  write_json(fs::path(args.out_dir) / "scenario.json", doc);
  return 0;
}

struct SegmentArgs {
  std::string vad_path;
  std::string shots_path;
  std::string out_path = "segments.jsonl";
  double max_duration = 1.0;
  double min_duration = 0.0;
};

int run_segment(const SegmentArgs& args) {
  const auto regions = casd::preprocess::load_vad(args.vad_path);
  casd::preprocess::ShotBoundaryList shots;
  if (!args.shots_path.empty()) shots = casd::preprocess::load_shots(args.shots_path);
  auto intervals = casd::preprocess::split_by_boundaries(regions, shots);
  intervals = casd::preprocess::split_max_duration(intervals, args.max_duration);
  intervals = casd::preprocess::filter_min_duration(intervals, args.min_duration);
  casd::preprocess::save_intervals_as_segments(args.out_path, intervals);
  std::cout << intervals.size() << " segments\n";
  return 0;
}

struct OracleArgs {
  std::string segments_path;
  std::string tracks_path;
  std::string assignments_path;
  std::string out_path = "oracle.json";
  double min_overlap = 0.0;
  std::uint64_t max_states = 1000000;
  std::string diagonal = "include";
};

int run_oracle(const OracleArgs& args) {
  const auto segments = casd::io::load_segments(args.segments_path);
  const auto tracks = casd::io::load_tracks(args.tracks_path);
  const auto candidates = casd::build_candidate_map(segments, tracks, args.min_overlap);
  const auto policy = (args.diagonal == "exclude") ? casd::DiagonalPolicy::kExclude
                                                   : casd::DiagonalPolicy::kInclude;

  std::vector<casd::SegmentId> ordered;
  for (const auto& s : segments)
    if (candidates.entries.count(s.id)) ordered.push_back(s.id);
  const auto problem =
      casd::build_partition_problem(segments, tracks, candidates, {}, ordered);
  const auto oracle = casd::synth::brute_force_oracle(problem, policy, args.max_states);

  ordered_json doc;
  doc["objective"] = oracle.objective;
  ordered_json assignment;
  for (std::size_t i = 0; i < problem.segment_ids.size(); ++i)
    assignment[problem.segment_ids[i]] =
        problem.track_ids[static_cast<std::size_t>(oracle.assignment[i])];
  doc["assignment"] = assignment;

  if (!args.assignments_path.empty()) {
    const auto records = casd::io::load_assignments(args.assignments_path);
    std::size_t matches = 0, compared = 0;
    for (const auto& record : records) {
      auto it = assignment.find(record.segment_id);
      if (it == assignment.end() || !record.track_id) continue;
      ++compared;
      if (*record.track_id == it->get<std::string>()) ++matches;
    }
    doc["compared"] = compared;
    doc["matching_assignments"] = matches;
  }
  write_json(args.out_path, doc);
  std::cout << "oracle objective " << oracle.objective << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-modal active speaker assignment from identity embeddings"};
  app.require_subcommand(1);

  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "Kernel backend: auto|scalar|avx2")
      ->envname("CASD_KERNEL");

  AssignArgs assign;
  auto* assign_cmd = app.add_subcommand("assign", "Stage 1 + stage 2 speech-face assignment");
  assign_cmd->add_option("--segments", assign.segments_path, "segments.jsonl")->required();
  assign_cmd->add_option("--tracks", assign.tracks_path, "tracks.jsonl")->required();
  assign_cmd->add_option("--ground-truth", assign.ground_truth_path, "groundtruth.jsonl");
  assign_cmd->add_option("--pins", assign.pins_path, "pinned assignments (jsonl)");
  assign_cmd->add_option("--out", assign.out_dir, "output directory")->envname("CASD_OUT");
  assign_cmd->add_option("--partition-size", assign.solver.partition_size, "L, max segments per partition")
      ->envname("CASD_PARTITION_SIZE");
  assign_cmd->add_option("--max-epochs", assign.solver.max_epochs, "epoch cap")
      ->envname("CASD_MAX_EPOCHS");
  assign_cmd->add_option("--convergence-eps", assign.solver.convergence_eps,
                         "epoch gain below which the ascent stops");
  assign_cmd->add_option("--tie-eps", assign.solver.tie_eps, "improvement treated as a tie");
  assign_cmd->add_option("--seed", assign.solver.seed, "random seed")->envname("CASD_SEED");
  assign_cmd->add_option("--restarts", assign.solver.restarts, "random restarts per partition")
      ->envname("CASD_RESTARTS");
  assign_cmd->add_option("--workers", assign.solver.workers, "parallel partition workers")
      ->envname("CASD_WORKERS");
  assign_cmd->add_option("--tau", assign.tau, "off-screen correlation threshold")
      ->envname("CASD_TAU");
  assign_cmd->add_option("--min-overlap", assign.min_overlap, "candidate overlap threshold, seconds");
  assign_cmd->add_option("--diagonal", assign.diagonal, "row correlation diagonal: include|exclude");
  assign_cmd->add_flag("--no-stage2", assign.no_stage2, "skip off-screen correction");
  assign_cmd->add_flag("--dump-matrices", assign.dump_matrices, "write SD/FD CSV per partition");
  assign_cmd->add_flag("--strict", assign.strict, "exit 2 when a partition fails to converge");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score assignments against ground truth");
  eval_cmd->add_option("--assignments", eval_args.assignments_path, "assignments.jsonl")->required();
  eval_cmd->add_option("--segments", eval_args.segments_path, "segments.jsonl")->required();
  eval_cmd->add_option("--tracks", eval_args.tracks_path, "tracks.jsonl")->required();
  eval_cmd->add_option("--ground-truth", eval_args.ground_truth_path, "groundtruth.jsonl")
      ->required();
  eval_cmd->add_option("--min-overlap", eval_args.min_overlap, "must match the assign run");
  eval_cmd->add_option("--out", eval_args.out_dir, "output directory")->envname("CASD_OUT");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth_cmd->add_option("--out", synth_args.out_dir, "output directory")->envname("CASD_OUT");
  synth_cmd->add_option("--preset", synth_args.preset, "default|columbia");
  synth_cmd->add_option("--characters", synth_args.config.num_characters, "speaking characters");
  synth_cmd->add_option("--num-segments", synth_args.config.num_segments, "speech segments");
  synth_cmd->add_option("--candidates", synth_args.config.candidates_per_segment,
                        "face tracks per segment");
  synth_cmd->add_option("--audio-dim", synth_args.config.audio_dim, "audio embedding dim");
  synth_cmd->add_option("--visual-dim", synth_args.config.visual_dim, "visual embedding dim");
  synth_cmd->add_option("--audio-noise", synth_args.config.audio_noise, "audio perturbation");
  synth_cmd->add_option("--visual-noise", synth_args.config.visual_noise, "visual perturbation");
  synth_cmd->add_option("--p-off", synth_args.config.offscreen_fraction,
                        "off-screen speaker probability");
  synth_cmd->add_option("--background-fraction", synth_args.config.background_face_fraction,
                        "distractors from never-speaking characters");
  synth_cmd->add_option("--min-separation", synth_args.config.min_separation,
                        "min pairwise direction distance");
  synth_cmd->add_option("--seed", synth_args.config.seed, "random seed")->envname("CASD_SEED");

  SegmentArgs segment_args;
  auto* segment_cmd =
      app.add_subcommand("segment", "Split VAD intervals into proxy speech segments");
  segment_cmd->add_option("--vad", segment_args.vad_path, "vad.jsonl")->required();
  segment_cmd->add_option("--shots", segment_args.shots_path, "shots.json");
  segment_cmd->add_option("--max-duration", segment_args.max_duration, "cap, seconds");
  segment_cmd->add_option("--min-duration", segment_args.min_duration, "drop shorter output");
  segment_cmd->add_option("--out", segment_args.out_path, "output segments.jsonl");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive assignment optimum");
  oracle_cmd->add_option("--segments", oracle_args.segments_path, "segments.jsonl")->required();
  oracle_cmd->add_option("--tracks", oracle_args.tracks_path, "tracks.jsonl")->required();
  oracle_cmd->add_option("--assignments", oracle_args.assignments_path,
                         "compare these assignments against the optimum");
  oracle_cmd->add_option("--min-overlap", oracle_args.min_overlap, "candidate overlap threshold");
  oracle_cmd->add_option("--max-states", oracle_args.max_states, "enumeration cap");
  oracle_cmd->add_option("--diagonal", oracle_args.diagonal, "include|exclude");
  oracle_cmd->add_option("--out", oracle_args.out_path, "output oracle.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!casd::kernels::set_backend(kernel))
      throw casd::InvalidParameter("kernel backend \"" + kernel + "\" not available");
    // Columbia preset shares the generic seed/size flags where they overlap.
    synth_args.columbia.num_characters = synth_args.config.num_characters;
    synth_args.columbia.num_segments = synth_args.config.num_segments;
    synth_args.columbia.embedding_dim = synth_args.config.audio_dim;
    synth_args.columbia.audio_noise = synth_args.config.audio_noise;
    synth_args.columbia.visual_noise = synth_args.config.visual_noise;
    synth_args.columbia.seed = synth_args.config.seed;

    if (assign_cmd->parsed()) return run_assign(assign);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (synth_cmd->parsed()) return run_synth(synth_args);
    if (segment_cmd->parsed()) return run_segment(segment_args);
    if (oracle_cmd->parsed()) return run_oracle(oracle_args);
  } catch (const casd::Error& e) {
    ordered_json err;
    err["error"] = {{"type", error_kind(e)}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = {{"type", "error"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}
