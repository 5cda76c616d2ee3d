#include "phraseprobe/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "phraseprobe/aligner.hpp"
#include "phraseprobe/corpus.hpp"
#include "phraseprobe/decoder.hpp"
#include "phraseprobe/dynamics.hpp"
#include "phraseprobe/extract.hpp"
#include "phraseprobe/metrics.hpp"
#include "phraseprobe/parallel.hpp"
#include "phraseprobe/report.hpp"
#include "phraseprobe/table.hpp"

namespace phraseprobe {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void RunConfig::validate() const {
  if (max_phrase_length < 1) throw ValidationError("--max-len must be at least 1");
  if (min_count < 1) throw ValidationError("--min-count must be at least 1");
  if (iterations < 1) throw ValidationError("--iterations must be at least 1");
  if (beam_width < 1) throw ValidationError("--beam must be at least 1");
  parse_heuristic(heuristic);
}

namespace {

constexpr std::size_t kBatchSize = 1024;
constexpr std::string_view kLengthAssumption =
    "length buckets by max(source, target) tokens: short <= 3, middle 4-5, long 6-7, over > 7";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void emit_json(const ordered_json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text(path, text);
  }
}

std::vector<Tokens> read_sentences(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Tokens> sentences;
  std::string line;
  while (std::getline(in, line)) sentences.push_back(split_tokens(line));
  return sentences;
}

std::vector<SentenceRecord> read_bitext(const RunConfig& cfg, bool with_alignment) {
  CorpusPaths paths{cfg.source, cfg.target, std::nullopt, std::nullopt};
  if (with_alignment && !cfg.alignment.empty()) paths.alignment = cfg.alignment;
  if (!cfg.mask.empty()) paths.mask = cfg.mask;
  return load_corpus(paths);
}

ordered_json profile_json(const ComplexityProfile& p) {
  ordered_json j;
  auto axis = [&](Axis a, auto const& counts) {
    ordered_json classes;
    const auto names = class_names(a);
    for (std::size_t c = 0; c < names.size(); ++c) classes[names[c]] = counts[c];
    j[std::string(to_string(a))] = classes;
  };
  axis(Axis::length, p.length);
  axis(Axis::reordering, p.reordering);
  axis(Axis::fertility, p.fertility);
  return j;
}

std::uint64_t axis_count(const ComplexityProfile& p, Axis axis, std::size_t c) {
  switch (axis) {
    case Axis::length: return p.length[c];
    case Axis::reordering: return p.reordering[c];
    case Axis::fertility: return p.fertility[c];
  }
  return 0;
}

constexpr Axis kAxes[] = {Axis::length, Axis::reordering, Axis::fertility};

// --- subcommands -------------------------------------------------------------------------

int cmd_align(const RunConfig& cfg, const std::string& lex_prefix, std::ostream& /*out*/,
              std::ostream& err) {
  const auto corpus = read_bitext(cfg, false);
  AlignerOptions options{cfg.iterations, parse_heuristic(cfg.heuristic), resolve_threads(cfg.threads)};
  const AlignmentRun run = align_corpus(corpus, options);
  std::vector<std::string> lines;
  lines.reserve(run.alignments.size());
  for (const Alignment& a : run.alignments) lines.push_back(format_pharaoh(a));
  write_lines(cfg.output, lines);
  if (!lex_prefix.empty()) {
    run.forward.lexicon.save_tsv(lex_prefix + ".t_given_s.tsv");
    run.backward.lexicon.save_tsv(lex_prefix + ".s_given_t.tsv");
  }
  for (std::size_t k = 0; k < run.forward.log_likelihood.size(); ++k) {
    err << "iteration " << k << " log-likelihood t|s " << format_exact(run.forward.log_likelihood[k])
        << " s|t " << format_exact(run.backward.log_likelihood[k]) << '\n';
  }
  return kExitOk;
}

int cmd_extract(const RunConfig& cfg, const std::string& dump_path, std::ostream& /*out*/,
                std::ostream& err) {
  CorpusPaths paths{cfg.source, cfg.target, cfg.alignment, std::nullopt};
  if (!cfg.mask.empty()) paths.mask = cfg.mask;
  CorpusReader reader(paths);
  const unsigned threads = resolve_threads(cfg.threads);
  std::optional<std::ofstream> dump;
  if (!dump_path.empty()) {
    dump.emplace(dump_path, std::ios::binary);
    if (!*dump) throw IoError("cannot write " + dump_path);
  }
  TableBuilder builder;
  std::size_t sentences = 0;
  std::size_t first_line = 1;
  for (bool more = true; more;) {
    std::vector<SentenceRecord> batch;
    while (batch.size() < kBatchSize) {
      auto record = reader.next();
      if (!record) {
        more = false;
        break;
      }
      batch.push_back(std::move(*record));
    }
    std::vector<std::vector<PhraseOccurrence>> found(batch.size());
    parallel_for(batch.size(), threads, [&](std::size_t n) {
      try {
        found[n] = extract_phrases(batch[n], cfg.max_phrase_length);
      } catch (const ValidationError& e) {
        throw ValidationError(cfg.target + ": " + at_line(first_line + n, e.what()));
      }
    });
    for (const auto& occurrences : found) {
      builder.add(occurrences);
      if (dump)
        for (const PhraseOccurrence& occ : occurrences) *dump << format_occurrence(occ) << '\n';
    }
    sentences += batch.size();
    first_line += batch.size();
    if (!batch.empty()) err << "extract: " << sentences << " sentences\n";
  }
  PhraseTable table = std::move(builder).build();
  save_table(table, cfg.output);
  err << "extract: " << table.size() << " distinct phrase pairs\n";
  return kExitOk;
}

int cmd_score(const RunConfig& cfg, const std::string& table_path, const std::string& lex_ts,
              const std::string& lex_st, const std::string& filter_stage,
              const std::string& moses_path, std::ostream& /*out*/, std::ostream& err) {
  PhraseTable table = load_table(table_path);
  const LexiconTable t_given_s = LexiconTable::load_tsv(lex_ts);
  const LexiconTable s_given_t = LexiconTable::load_tsv(lex_st);
  const unsigned threads = resolve_threads(cfg.threads);
  const std::size_t before = table.size();
  if (filter_stage == "before") {
    table = filter_min_count(table, cfg.min_count);
    recompute_marginals(table);
    score(table, t_given_s, s_given_t, threads);
  } else {
    score(table, t_given_s, s_given_t, threads);
    table = filter_min_count(table, cfg.min_count);
  }
  save_table(table, cfg.output);
  if (!moses_path.empty()) export_moses(table, moses_path);
  err << "score: " << before << " -> " << table.size() << " entries after min-count "
      << cfg.min_count << '\n';
  return kExitOk;
}

int cmd_stats(const std::string& table_path, const std::string& json_path, std::ostream& out) {
  const PhraseTable table = load_table(table_path);
  std::map<std::string_view, int> sources;
  std::map<std::string_view, int> targets;
  std::uint64_t occurrences = 0;
  std::size_t singletons = 0;
  for (const auto& [key, e] : table) {
    sources[key.source];
    targets[key.target];
    occurrences += e.joint_count;
    singletons += e.joint_count == 1;
  }
  ordered_json doc;
  doc["table"] = table_path;
  doc["table_size"] = table_size(table);
  doc["occurrences"] = occurrences;
  doc["distinct_source_phrases"] = sources.size();
  doc["distinct_target_phrases"] = targets.size();
  doc["singleton_pairs"] = singletons;
  doc["profile"] = profile_json(profile(table));
  doc["assumptions"] = ordered_json::array({kLengthAssumption});
  emit_json(doc, json_path, out);
  return kExitOk;
}

int cmd_classify(const std::string& table_path, const std::string& label, const RunConfig& cfg,
                 const std::string& entries_path, std::ostream& out) {
  const PhraseTable table = load_table(table_path);
  const ComplexityProfile p = profile(table);
  std::ostringstream csv;
  csv << "epoch,axis,class,count,normalized\n";
  for (Axis axis : kAxes) {
    const auto names = class_names(axis);
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::uint64_t count = axis_count(p, axis, c);
      csv << csv_field(label) << ',' << to_string(axis) << ',' << names[c] << ',' << count << ','
          << (count ? "1" : "0") << '\n';
    }
  }
  if (cfg.output.empty()) {
    out << csv.str();
  } else {
    write_text(cfg.output, csv.str());
  }
  if (!entries_path.empty()) {
    std::ostringstream tsv;
    for (const auto& [key, e] : table) {
      tsv << key.source << '\t' << key.target << '\t' << to_string(length_class(key)) << '\t'
          << to_string(reorder_class(e)) << '\t' << to_string(fertility_class(e)) << '\n';
    }
    write_text(entries_path, tsv.str());
  }
  return kExitOk;
}

int cmd_recovery(const RunConfig& cfg, const std::string& table_path, bool macro,
                 const std::string& json_path, std::ostream& out) {
  const PhraseTable table = load_table(table_path);
  const auto corpus = read_bitext(cfg, false);
  const double value = recovery_percent(table, corpus, macro ? Averaging::macro : Averaging::micro,
                                        resolve_threads(cfg.threads));
  ordered_json doc;
  doc["table"] = table_path;
  doc["sentences"] = corpus.size();
  doc["averaging"] = macro ? "macro" : "micro";
  doc["recovery_percent"] = value;
  emit_json(doc, json_path, out);
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& json_path,
                std::ostream& out) {
  std::vector<PhraseTable> tables;
  for (const std::string& p : paths) tables.push_back(load_table(p));
  std::vector<const PhraseTable*> refs;
  for (const PhraseTable& t : tables) refs.push_back(&t);
  const OverlapStats overlap = overlap_stats(refs);

  ordered_json doc;
  doc["tables"] = paths;
  ordered_json sizes = ordered_json::array();
  for (const PhraseTable& t : tables) sizes.push_back(t.size());
  doc["sizes"] = sizes;
  const SharedTables shared = intersect(tables[0], tables[1]);
  const PhraseTable only_a = subtract(tables[0], tables[1]);
  const PhraseTable only_b = subtract(tables[1], tables[0]);
  doc["shared"] = shared.under_a.size();
  doc["non_shared_a"] = only_a.size();
  doc["non_shared_b"] = only_b.size();
  doc["jaccard"] = overlap.pairwise_jaccard;
  doc["k_way_overlap"] = overlap.k_way_overlap;
  auto source_stats = [](const SharedSourceStats& s) {
    ordered_json j;
    j["share_source_fraction"] = s.share_source_fraction;
    j["lower_prob_fraction"] = s.lower_prob_fraction;
    j["lower_prob_defined"] = s.lower_prob_defined;
    j["non_shared_entries"] = s.non_shared_entries;
    j["sharing_entries"] = s.sharing_entries;
    j["lower_entries"] = s.lower_entries;
    return j;
  };
  doc["shared_source_a"] = source_stats(shared_source_stats(shared.under_a, only_a));
  doc["shared_source_b"] = source_stats(shared_source_stats(shared.under_b, only_b));
  emit_json(doc, json_path, out);
  return kExitOk;
}

int cmd_dynamics(const RunConfig& cfg, const std::vector<std::string>& table_paths,
                 std::vector<std::string> labels, std::size_t horizon, bool svg,
                 std::ostream& /*out*/, std::ostream& err) {
  if (!labels.empty() && labels.size() != table_paths.size()) {
    throw ValidationError("--labels needs one label per table");
  }
  if (labels.empty()) {
    for (const std::string& p : table_paths) labels.push_back(fs::path(p).stem().string());
  }
  std::vector<std::size_t> order(table_paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return checkpoint_label_less(labels[a], labels[b]);
  });

  const unsigned threads = resolve_threads(cfg.threads);
  std::vector<Checkpoint> checkpoints(order.size());
  parallel_for(order.size(), threads, [&](std::size_t n) {
    checkpoints[n].label = labels[order[n]];
    checkpoints[n].table = filter_min_count(load_table(table_paths[order[n]]), cfg.min_count);
  });
  const CheckpointSeries series(std::move(checkpoints));
  const fs::path dir = cfg.output_dir.empty() ? fs::path(".") : fs::path(cfg.output_dir);
  fs::create_directories(dir);

  const auto diffs = diff_series(series);
  std::ostringstream csv;
  csv << "epoch,newly_learned,forgotten,cumulative,unforgettable_fraction\n";
  for (const EpochDiff& d : diffs) {
    csv << csv_field(d.label) << ',' << d.newly_learned << ',' << d.forgotten << ','
        << d.cumulative_learned << ',' << format_exact(d.never_forgotten_fraction) << '\n';
  }
  write_text(dir / "dynamics.csv", csv.str());

  const UnforgettableResult unforgotten = unforgettable(series, horizon);
  ordered_json doc;
  doc["checkpoints"] = series.size();
  doc["horizon"] = horizon;
  doc["eligible"] = unforgotten.eligible;
  doc["unforgettable"] = unforgotten.pairs.size();
  doc["fraction"] = unforgotten.fraction;
  write_text(dir / "unforgettable.json", doc.dump(2) + "\n");

  std::vector<ComplexityProfile> profiles;
  for (const Checkpoint& c : series) profiles.push_back(profile(c.table));
  std::ostringstream profile_csv;
  profile_csv << "epoch,axis,class,count,normalized\n";
  for (Axis axis : kAxes) {
    const auto curves = learning_curves(profiles, axis);
    std::ostringstream wide;
    wide << "epoch";
    for (const LearningCurve& c : curves) {
      wide << ',' << csv_field(c.class_name);
      if (!c.populated) err << "warning: " << to_string(axis) << " class '" << c.class_name << "' never populated\n";
    }
    wide << '\n';
    for (std::size_t e = 0; e < series.size(); ++e) {
      wide << csv_field(series[e].label);
      for (const LearningCurve& c : curves) {
        wide << ',' << format_exact(c.normalized[e]);
        profile_csv << csv_field(series[e].label) << ',' << to_string(axis) << ',' << c.class_name
                    << ',' << c.counts[e] << ',' << format_exact(c.normalized[e]) << '\n';
      }
      wide << '\n';
    }
    const fs::path curve_path = dir / ("curves_" + std::string(to_string(axis)) + ".csv");
    write_text(curve_path, wide.str());
    if (svg) {
      write_svg(dir / ("curves_" + std::string(to_string(axis)) + ".svg"), read_series_csv(curve_path),
                {"Learning dynamics: " + std::string(to_string(axis)), "normalized pairs"});
    }
  }
  write_text(dir / "profile.csv", profile_csv.str());

  if (!cfg.source.empty() && !cfg.target.empty()) {
    const auto corpus = read_bitext(cfg, false);
    std::vector<Tokens> references;
    for (const SentenceRecord& r : corpus) references.push_back(r.target);
    std::ostringstream metrics;
    metrics << "epoch,table_size,recovery_percent,proxy_bleu\n";
    DecoderOptions decoder_options{cfg.beam_width, cfg.word_penalty};
    for (const Checkpoint& c : series) {
      PhraseTable scored = c.table;
      estimate_probabilities(scored);
      const MonotoneDecoder decoder(scored);
      std::vector<Tokens> hypotheses(corpus.size());
      parallel_for(corpus.size(), threads,
                   [&](std::size_t n) { hypotheses[n] = decoder.decode(corpus[n].source, decoder_options); });
      metrics << csv_field(c.label) << ',' << c.table.size() << ','
              << format_exact(recovery_percent(c.table, corpus, Averaging::micro, threads)) << ','
              << format_exact(bleu(hypotheses, references).score) << '\n';
    }
    write_text(dir / "metrics.csv", metrics.str());
    if (svg) write_svg(dir / "metrics.svg", read_series_csv(dir / "metrics.csv"), {"Phrase table metrics", ""});
  }
  if (svg) write_svg(dir / "dynamics.svg", read_series_csv(dir / "dynamics.csv"), {"Learning and forgetting", ""});
  return kExitOk;
}

int cmd_decode(const RunConfig& cfg, const std::string& table_path, const std::string& input,
               std::ostream& out) {
  PhraseTable table = load_table(table_path);
  bool unscored = std::any_of(table.begin(), table.end(), [](const auto& kv) { return !(kv.second.forward_prob > 0.0); });
  if (unscored) estimate_probabilities(table);
  const MonotoneDecoder decoder(table);
  const auto sentences = read_sentences(input);
  std::vector<std::string> lines(sentences.size());
  DecoderOptions options{cfg.beam_width, cfg.word_penalty};
  parallel_for(sentences.size(), resolve_threads(cfg.threads),
               [&](std::size_t n) { lines[n] = join_tokens(decoder.decode(sentences[n], options)); });
  if (cfg.output.empty()) {
    for (const std::string& l : lines) out << l << '\n';
  } else {
    write_lines(cfg.output, lines);
  }
  return kExitOk;
}

int cmd_bleu(const std::string& hyp_path, const std::string& ref_path, const std::string& json_path,
             std::ostream& out) {
  const auto hyps = read_sentences(hyp_path);
  const auto refs = read_sentences(ref_path);
  const BleuResult r = bleu(hyps, refs);
  ordered_json doc;
  doc["metric"] = "proxy BLEU";
  for (std::size_t n = 0; n < r.precisions.size(); ++n) doc["p_" + std::to_string(n + 1)] = r.precisions[n];
  doc["BP"] = r.brevity_penalty;
  doc["hyp_len"] = r.hypothesis_length;
  doc["ref_len"] = r.reference_length;
  doc["score"] = r.score;
  emit_json(doc, json_path, out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, const std::string& mode, std::size_t epochs,
                 double probability, const std::vector<std::uint64_t>& thresholds,
                 const std::string& prefix, std::ostream& /*out*/, std::ostream& err) {
  MaskSchedule schedule;
  if (mode == "all-ones") {
    schedule = MaskSchedule::all_ones(epochs);
  } else if (mode == "random") {
    schedule = MaskSchedule::random(probability, cfg.seed, epochs);
  } else {
    schedule = MaskSchedule::frequency(thresholds);
  }
  schedule.validate();
  const auto corpus = read_bitext(cfg, false);
  const auto masks = synthesize_masks(corpus, schedule);
  for (std::size_t e = 0; e < masks.size(); ++e) {
    const std::string path = prefix + ".epoch" + std::to_string(e + 1);
    write_mask_file(path, masks[e]);
    err << "wrote " << path << '\n';
  }
  return kExitOk;
}

int cmd_report(const std::string& csv_path, const std::string& svg_path, const std::string& axis,
               const std::string& title) {
  const SeriesTable table = axis.empty() ? read_series_csv(csv_path) : pivot_profile_csv(csv_path, axis);
  write_svg(svg_path, table, {title.empty() ? fs::path(csv_path).stem().string() : title, ""});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"phraseprobe: phrase tables from model predictions, and their analysis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  RunConfig cfg;
  app.set_config("--config", "", "INI/TOML file; keys under [subcommand] mirror its flags (flags win)");
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (default $PHRASEPROBE_THREADS or 1)")
        ->envname("PHRASEPROBE_THREADS")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_bitext = [&](CLI::App* sub, bool required) {
    auto* s = sub->add_option("--source", cfg.source, "Source corpus, one sentence per line");
    auto* t = sub->add_option("--target", cfg.target, "Target corpus, one sentence per line");
    if (required) {
      s->required();
      t->required();
    }
  };

  // align
  std::string lex_prefix;
  auto* align = app.add_subcommand("align", "IBM Model 1 + Viterbi + symmetrization");
  add_bitext(align, true);
  align->add_option("--out", cfg.output, "Pharaoh alignment output")->required();
  align->add_option("--iterations", cfg.iterations, "EM iterations")->check(CLI::PositiveNumber);
  align->add_option("--heuristic", cfg.heuristic, "intersection | union | grow-diag-final")
      ->check(CLI::IsMember({"intersection", "union", "grow-diag-final"}));
  align->add_option("--lex-prefix", lex_prefix, "Write <prefix>.t_given_s.tsv and <prefix>.s_given_t.tsv");
  add_threads(align);

  // extract
  std::string dump_path;
  auto* extract = app.add_subcommand("extract", "Mask-constrained phrase extraction into a counted table");
  add_bitext(extract, true);
  extract->add_option("--align", cfg.alignment, "Pharaoh alignment file")->required();
  extract->add_option("--mask", cfg.mask, "0/1 prediction mask per target token");
  extract->add_option("--max-len", cfg.max_phrase_length, "Maximum phrase length per side")->check(CLI::PositiveNumber);
  extract->add_option("--out", cfg.output, "Binary table cache output")->required();
  extract->add_option("--dump", dump_path, "Per-occurrence TSV dump");
  add_threads(extract);

  // score
  std::string score_table, lex_ts, lex_st, moses_path, filter_stage = "after";
  auto* score_cmd = app.add_subcommand("score", "Relative-frequency and lexical scoring, min-count filter");
  score_cmd->add_option("--table", score_table, "Counted table")->required();
  score_cmd->add_option("--lex-t-given-s", lex_ts, "Lexicon TSV w(t|s)")->required();
  score_cmd->add_option("--lex-s-given-t", lex_st, "Lexicon TSV w(s|t)")->required();
  score_cmd->add_option("--min-count", cfg.min_count, "Drop pairs seen fewer times")->check(CLI::PositiveNumber);
  score_cmd->add_option("--filter-stage", filter_stage, "Filter before or after scoring")
      ->check(CLI::IsMember({"before", "after"}));
  score_cmd->add_option("--out", cfg.output, "Scored binary table")->required();
  score_cmd->add_option("--moses", moses_path, "Also export a Moses phrase table");
  add_threads(score_cmd);

  // stats
  std::string stats_table, json_path;
  auto* stats = app.add_subcommand("stats", "Size and complexity profile as JSON");
  stats->add_option("table", stats_table, "Table file")->required();
  stats->add_option("--json", json_path, "Write JSON here instead of stdout");

  // classify
  std::string classify_table, label = "0", entries_path;
  auto* classify = app.add_subcommand("classify", "Complexity profile CSV (and per-entry classes)");
  classify->add_option("table", classify_table, "Table file")->required();
  classify->add_option("--label", label, "Epoch label for the CSV rows");
  classify->add_option("--out", cfg.output, "Profile CSV (default stdout)");
  classify->add_option("--entries", entries_path, "Per-entry TSV: src, tgt, length, reordering, fertility");

  // recovery
  std::string recovery_table;
  bool macro = false;
  auto* recovery = app.add_subcommand("recovery", "Recovery percent of a table on a corpus");
  recovery->add_option("table", recovery_table, "Table file")->required();
  add_bitext(recovery, true);
  recovery->add_flag("--macro", macro, "Average per-sentence ratios instead of pooling tokens");
  recovery->add_option("--json", json_path, "Write JSON here instead of stdout");
  add_threads(recovery);

  // compare
  std::vector<std::string> compare_tables;
  auto* compare = app.add_subcommand("compare", "Shared / non-shared sizes, overlap and Jaccard");
  compare->add_option("tables", compare_tables, "Two or more table files")->required()->expected(2, -1);
  compare->add_option("--json", json_path, "Write JSON here instead of stdout");

  // dynamics
  std::vector<std::string> dyn_tables, dyn_labels;
  std::size_t horizon = 1;
  bool svg = false;
  auto* dynamics = app.add_subcommand("dynamics", "Learning curves and forgetting over checkpoint tables");
  dynamics->add_option("tables", dyn_tables, "One table per checkpoint")->required()->expected(1, -1);
  dynamics->add_option("--labels", dyn_labels, "Checkpoint labels (default: file stems)")->delimiter(',');
  dynamics->add_option("--horizon", horizon, "Observation horizon for unforgettable pairs")->check(CLI::PositiveNumber);
  std::uint64_t dyn_min_count = 1;
  dynamics->add_option("--min-count", dyn_min_count, "Filter applied to every checkpoint")->check(CLI::PositiveNumber);
  dynamics->add_option("--out-dir", cfg.output_dir, "Output directory")->required();
  add_bitext(dynamics, false);
  dynamics->add_option("--beam", cfg.beam_width, "Beam width for proxy BLEU")->check(CLI::PositiveNumber);
  dynamics->add_flag("--svg", svg, "Also render SVG charts");
  add_threads(dynamics);

  // decode
  std::string decode_table, decode_input;
  auto* decode = app.add_subcommand("decode", "Monotone beam decoding with a table");
  decode->add_option("--table", decode_table, "Table file")->required();
  decode->add_option("--input", decode_input, "Source sentences")->required();
  decode->add_option("--out", cfg.output, "Hypotheses (default stdout)");
  decode->add_option("--beam", cfg.beam_width, "Beam width")->check(CLI::PositiveNumber);
  decode->add_option("--word-penalty", cfg.word_penalty, "Score added per target token");
  add_threads(decode);

  // bleu
  std::string hyp_path, ref_path;
  auto* bleu_cmd = app.add_subcommand("bleu", "Corpus BLEU (4-gram, single reference, unsmoothed)");
  bleu_cmd->add_option("--hyp", hyp_path, "Hypotheses")->required();
  bleu_cmd->add_option("--ref", ref_path, "References")->required();
  bleu_cmd->add_option("--json", json_path, "Write JSON here instead of stdout");

  // simulate-masks
  std::string mode = "all-ones", prefix;
  std::size_t epochs = 1;
  double probability = 0.5;
  std::vector<std::uint64_t> thresholds;
  auto* simulate = app.add_subcommand("simulate-masks", "Synthesize per-epoch prediction masks");
  add_bitext(simulate, true);
  simulate->add_option("--mode", mode, "all-ones | random | frequency")
      ->check(CLI::IsMember({"all-ones", "random", "frequency"}));
  simulate->add_option("--epochs", epochs, "Epochs for all-ones / random")->check(CLI::PositiveNumber);
  simulate->add_option("--p", probability, "Keep probability for random mode")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--seed", cfg.seed, "Seed for random mode");
  simulate->add_option("--thresholds", thresholds, "Nonincreasing frequency thresholds, one per epoch")->delimiter(',');
  simulate->add_option("--out-prefix", prefix, "Writes <prefix>.epochN")->required();

  // report
  std::string report_csv, report_svg, report_axis, report_title;
  auto* report = app.add_subcommand("report", "Render a CSV series file as an SVG line chart");
  report->add_option("csv", report_csv, "Wide CSV (x column + series) or long profile CSV")->required();
  report->add_option("--out", report_svg, "SVG output")->required();
  report->add_option("--axis", report_axis, "Pivot a profile CSV on this axis")
      ->check(CLI::IsMember({"length", "reordering", "fertility"}));
  report->add_option("--title", report_title, "Chart title");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "phraseprobe: " << e.what() << "\n";
    err << "run 'phraseprobe --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (simulate->parsed() && mode == "frequency" && thresholds.empty()) {
      throw ValidationError("--mode frequency needs --thresholds");
    }
    cfg.validate();
    if (align->parsed()) return cmd_align(cfg, lex_prefix, out, err);
    if (extract->parsed()) return cmd_extract(cfg, dump_path, out, err);
    if (score_cmd->parsed())
      return cmd_score(cfg, score_table, lex_ts, lex_st, filter_stage, moses_path, out, err);
    if (stats->parsed()) return cmd_stats(stats_table, json_path, out);
    if (classify->parsed()) return cmd_classify(classify_table, label, cfg, entries_path, out);
    if (recovery->parsed()) return cmd_recovery(cfg, recovery_table, macro, json_path, out);
    if (compare->parsed()) return cmd_compare(compare_tables, json_path, out);
    if (dynamics->parsed()) {
      cfg.min_count = dyn_min_count;
      return cmd_dynamics(cfg, dyn_tables, dyn_labels, horizon, svg, out, err);
    }
    if (decode->parsed()) return cmd_decode(cfg, decode_table, decode_input, out);
    if (bleu_cmd->parsed()) return cmd_bleu(hyp_path, ref_path, json_path, out);
    if (simulate->parsed())
      return cmd_simulate(cfg, mode, epochs, probability, thresholds, prefix, out, err);
    if (report->parsed()) return cmd_report(report_csv, report_svg, report_axis, report_title);
  } catch (const std::exception& e) {
    err << "phraseprobe: error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
  return kExitUsage;
}

}  // namespace phraseprobe
