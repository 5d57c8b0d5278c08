// Command-line front end. Every subcommand is a thin wrapper over the
// library call of the same name; `run_cli` is what tools/tabstruct.cpp calls
// and what the CLI tests drive in-process.
#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tabstruct/align_loss.hpp"
#include "tabstruct/core.hpp"
#include "tabstruct/eval_logical.hpp"
#include "tabstruct/eval_phys.hpp"
#include "tabstruct/gt_prep.hpp"
#include "tabstruct/io.hpp"
#include "tabstruct/structure.hpp"
#include "tabstruct/synth.hpp"

namespace tabstruct {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 1, kExitIo = 2 };

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

namespace detail {

inline bool has_xml_extension(const std::string& path) {
  return std::filesystem::path(path).extension() == ".xml";
}

inline void write_table_file(const std::string& path, const TableAnnotation& t,
                             const std::optional<AdjacencyMatrices>& adj = std::nullopt) {
  if (has_xml_extension(path))
    write_xml(t, path);
  else
    write_json({t, adj}, path);
}

// Loads a table for scoring; tables carrying adjacency but no spans get
// their spans recovered first.
inline TableAnnotation load_spanned(const std::string& path) {
  auto file = read_table_file(path);
  if (!file.table.all_spanned() && file.adjacency) return adjacency_to_spans(file.table, *file.adjacency);
  return file.table;
}

inline std::string prf_row(double threshold, const PRF& r) {
  return fixed6(threshold) + "\t" + fixed6(r.precision) + "\t" + fixed6(r.recall) + "\t" + fixed6(r.f1) +
         "\t" + std::to_string(r.tp) + "\t" + std::to_string(r.fp) + "\t" + std::to_string(r.fn) + "\n";
}

// Pairs of (pred, gt) paths: the two files themselves, or for two directories
// every file name present in both.
inline std::vector<std::pair<std::string, std::string>> evaluation_pairs(const std::string& pred,
                                                                         const std::string& gt) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(pred) && !fs::is_directory(gt)) return {{pred, gt}};
  if (!fs::is_directory(pred) || !fs::is_directory(gt))
    throw Error(ErrorCode::kIoFailure, "--pred and --gt must both be files or both be directories");
  std::map<std::string, std::string> gt_files;
  for (const auto& e : fs::directory_iterator(gt))
    if (e.is_regular_file()) gt_files[e.path().filename().string()] = e.path().string();
  std::vector<std::pair<std::string, std::string>> out;
  std::map<std::string, std::string> pred_files;
  for (const auto& e : fs::directory_iterator(pred))
    if (e.is_regular_file()) pred_files[e.path().filename().string()] = e.path().string();
  for (const auto& [name, path] : pred_files)
    if (auto it = gt_files.find(name); it != gt_files.end()) out.emplace_back(path, it->second);
  if (out.empty()) throw Error(ErrorCode::kIoFailure, "no file names in common between '" + pred + "' and '" + gt + "'");
  return out;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Table structure recognition toolkit: post-processing, alignment loss and evaluation"};
  app.require_subcommand(1);

  // postprocess
  std::string pp_in, pp_out, pp_rule = "clique";
  auto* postprocess = app.add_subcommand("postprocess", "Recover spans from adjacency and write XML");
  postprocess->add_option("--cells", pp_in, "Cell JSON with row/col adjacency")->required();
  postprocess->add_option("-o,--output", pp_out, "Output XML path")->required();
  postprocess->add_option("--rule", pp_rule, "Index propagation rule")
      ->check(CLI::IsMember({"clique", "all-neighbours"}));

  // evaluate
  std::string ev_pred, ev_gt, ev_mode = "relations", ev_rel = "neighbours";
  double ev_iou = 0.6;
  std::vector<double> ev_sweep;
  auto* evaluate = app.add_subcommand("evaluate", "Precision/recall/F1 as TSV");
  evaluate->add_option("--pred", ev_pred, "Predicted table (file or directory)")->required();
  evaluate->add_option("--gt", ev_gt, "Ground-truth table (file or directory)")->required();
  evaluate->add_option("--iou", ev_iou, "IoU threshold")->check(CLI::Range(0.0, 1.0));
  evaluate->add_option("--mode", ev_mode, "relations or cells")->check(CLI::IsMember({"relations", "cells"}));
  evaluate->add_option("--sweep", ev_sweep, "Comma-separated IoU thresholds")->delimiter(',');
  evaluate->add_option("--relations", ev_rel, "neighbours or all-pairs")
      ->check(CLI::IsMember({"neighbours", "all-pairs"}));

  // align-loss
  std::string al_in;
  bool al_grad = false;
  auto* align = app.add_subcommand("align-loss", "Alignment loss breakdown");
  align->add_option("--cells", al_in, "Spanned table (JSON or XML)")->required();
  align->add_flag("--grad", al_grad, "Also print per-cell gradients");

  // unify
  std::string un_in, un_out;
  auto* unify = app.add_subcommand("unify", "Expand content-level boxes to aligned cell-level boxes");
  unify->add_option("--gt", un_in, "Spanned ground truth (XML or JSON)")->required();
  unify->add_option("-o,--output", un_out, "Output path (.xml or .json)")->required();

  // synth
  std::uint64_t sy_seed = 0;
  SynthParams sy;
  std::string sy_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic table");
  synth->add_option("--seed", sy_seed, "Seed")->required();
  synth->add_option("--rows", sy.rows, "Grid rows")->required();
  synth->add_option("--cols", sy.cols, "Grid columns")->required();
  synth->add_option("--merge-prob", sy.merge_prob, "Merge probability");
  synth->add_option("--empty-prob", sy.empty_prob, "Empty-cell probability");
  synth->add_option("--jitter", sy.jitter, "Edge noise in pixels");
  synth->add_option("-o,--output", sy_out, "Output path (.json with adjacency, or .xml)")->required();

  // markup
  std::string mk_in;
  auto* markup = app.add_subcommand("markup", "Print the structure markup tokens");
  markup->add_option("--cells", mk_in, "Spanned table")->required();

  // bleu
  std::string bl_pred, bl_gt;
  int bl_n = 4;
  auto* bleu_cmd = app.add_subcommand("bleu", "BLEU between structure markups");
  bleu_cmd->add_option("--pred", bl_pred, "Candidate table")->required();
  bleu_cmd->add_option("--gt", bl_gt, "Reference table")->required();
  bleu_cmd->add_option("--max-n", bl_n, "Maximum n-gram order")->check(CLI::PositiveNumber);

  // teds
  std::string td_pred, td_gt;
  bool td_content = false;
  auto* teds_cmd = app.add_subcommand("teds", "Tree-edit-distance similarity of structure trees");
  teds_cmd->add_option("--pred", td_pred, "Predicted table")->required();
  teds_cmd->add_option("--gt", td_gt, "Ground-truth table")->required();
  teds_cmd->add_flag("--content", td_content, "Include cell content in node labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitInvalid;
  }

  try {
    if (*postprocess) {
      const auto file = read_json(pp_in);
      if (!file.adjacency) throw Error(ErrorCode::kInvariantViolation, pp_in + ": row/col adjacency is required");
      auto cells = file.table.cells;
      for (auto& c : cells) c.spans.reset();
      const auto rule = pp_rule == "clique" ? PropagationRule::kClique : PropagationRule::kAllNeighbours;
      write_xml(adjacency_to_spans(cells, *file.adjacency, rule), pp_out);
    } else if (*evaluate) {
      const auto pairs = detail::evaluation_pairs(ev_pred, ev_gt);
      std::vector<double> thresholds = ev_sweep.empty() ? std::vector<double>{ev_iou} : ev_sweep;
      for (double th : thresholds)
        if (!(th > 0.0 && th <= 1.0)) throw Error(ErrorCode::kInvalidParams, "IoU thresholds must lie in (0, 1]");
      const auto mode = ev_rel == "all-pairs" ? RelationMode::kAllPairs : RelationMode::kNeighbours;
      std::vector<std::vector<PRF>> per_threshold(thresholds.size());
      for (const auto& [p, g] : pairs) {
        const auto pred = ev_mode == "relations" ? detail::load_spanned(p) : read_table_file(p).table;
        const auto gt = ev_mode == "relations" ? detail::load_spanned(g) : read_table_file(g).table;
        for (std::size_t k = 0; k < thresholds.size(); ++k)
          per_threshold[k].push_back(ev_mode == "relations" ? relation_f1(pred, gt, thresholds[k], mode)
                                                            : cell_detection_prf(pred, gt, thresholds[k]));
      }
      out << "threshold\tprecision\trecall\tf1\ttp\tfp\tfn\n";
      for (std::size_t k = 0; k < thresholds.size(); ++k)
        out << detail::prf_row(thresholds[k], aggregate(per_threshold[k]));
    } else if (*align) {
      const auto table = read_table_file(al_in).table;
      const auto b = alignment_loss(table);
      out << "l1\tl2\tl3\tl4\ttotal\n"
          << fixed6(b.l1) << "\t" << fixed6(b.l2) << "\t" << fixed6(b.l3) << "\t" << fixed6(b.l4) << "\t"
          << fixed6(b.total) << "\n";
      if (al_grad) {
        out << "id\td_x1\td_y1\td_x2\td_y2\n";
        for (const auto& g : alignment_loss_grad(table))
          out << g.id << "\t" << fixed6(g.dx1) << "\t" << fixed6(g.dy1) << "\t" << fixed6(g.dx2) << "\t"
              << fixed6(g.dy2) << "\n";
      }
    } else if (*unify) {
      detail::write_table_file(un_out, unify_boxes(read_table_file(un_in).table));
    } else if (*synth) {
      const auto table = generate(sy_seed, sy);
      detail::write_table_file(sy_out, table, spans_to_adjacency(table));
    } else if (*markup) {
      out << join_markup(to_markup(read_table_file(mk_in).table)) << "\n";
    } else if (*bleu_cmd) {
      out << fixed6(bleu(to_markup(detail::load_spanned(bl_pred)), to_markup(detail::load_spanned(bl_gt)), bl_n))
          << "\n";
    } else if (*teds_cmd) {
      out << fixed6(teds(table_to_tree(detail::load_spanned(td_pred), td_content),
                         table_to_tree(detail::load_spanned(td_gt), td_content)))
          << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kIoFailure ? kExitIo : kExitInvalid;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace tabstruct
