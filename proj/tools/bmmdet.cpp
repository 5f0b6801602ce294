// bmmdet: melodic plagiarism detection from the command line.
//
//   bmmdet compare A B [--pretty]
//   bmmdet rank QUERY CORPUS_DIR [--detector bmm] [--top K]
//   bmmdet synth --out DIR --count N --seed S
//   bmmdet gen --corpus DIR --seed S --counts t=2,p=2,d=2 [--out DIR]
//   bmmdet eval --manifest FILE [--detectors bmm,ukkonen] [--out FILE]
//
// Exit codes: 0 success, 2 input/IO error, 3 usage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "bmm/bmm.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitUsage = 3;

struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> l;
  std::optional<double> r;
  std::optional<double> k_down;
  std::optional<std::size_t> ngram;
  std::optional<double> q;
  std::optional<double> theta;
  std::optional<unsigned> threads;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--l", l, "clip length in elements");
    app.add_option("--r", r, "clip overlap rate in [0, 1)");
    app.add_option("--kdown", k_down, "downbeat substitution multiplier (>= 1)");
    app.add_option("--ngram", ngram, "n-gram order for baseline detectors");
    app.add_option("--q", q, "fraction of top matched edges averaged into the degree");
    app.add_option("--theta", theta, "weight at which a matched pair is flagged suspect");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
  }

  /// Defaults, then the config file, then flags.
  bmm::Config resolve() const {
    bmm::Config cfg;
    if (!config_path.empty()) cfg = bmm::load_config(config_path, cfg);
    if (l) cfg.clip_length = *l;
    if (r) cfg.overlap = *r;
    if (k_down) cfg.cost.k_down = *k_down;
    if (ngram) cfg.ngram_order = *ngram;
    if (q) cfg.top_q = *q;
    if (theta) cfg.suspect_threshold = *theta;
    if (threads) cfg.threads = *threads;
    cfg.validate();
    return cfg;
  }
};

int exit_code_for(const bmm::Error& e) {
  switch (e.code()) {
    case bmm::ErrorCode::invalid_params:
    case bmm::ErrorCode::invalid_order:
    case bmm::ErrorCode::unknown_detector:
      return kExitUsage;
    default:
      return kExitInput;
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    bmm::write_file(out_path, text);
  }
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const ConfigFlags& flags, bool pretty,
                const std::string& out_path) {
  const auto cfg = flags.resolve();
  const auto a = bmm::load_piece(a_path);
  const auto b = bmm::load_piece(b_path);
  const auto report = bmm::compare_pieces(a, b, cfg);
  if (!pretty) {
    emit(bmm::report_to_json(report, cfg).dump(2) + "\n", out_path);
    return kExitOk;
  }
  std::string text;
  char line[200];
  std::snprintf(line, sizeof(line), "%s vs %s: plagiarism degree %.4f\n", report.left_id.c_str(),
                report.right_id.c_str(), report.degree);
  text += line;
  std::snprintf(line, sizeof(line), "%-16s %-16s %8s\n", "left notes", "right notes", "weight");
  text += line;
  std::size_t suspects = 0;
  for (const auto& p : report.pairs) {
    if (p.weight < cfg.suspect_threshold) continue;
    ++suspects;
    const auto ls = std::to_string(p.left_span.first) + "-" + std::to_string(p.left_span.last);
    const auto rs = std::to_string(p.right_span.first) + "-" + std::to_string(p.right_span.last);
    std::snprintf(line, sizeof(line), "%-16s %-16s %8.4f\n", ls.c_str(), rs.c_str(), p.weight);
    text += line;
  }
  std::snprintf(line, sizeof(line), "%zu of %zu matched pairs at or above %.2f\n", suspects, report.pairs.size(),
                cfg.suspect_threshold);
  text += line;
  emit(text, out_path);
  return kExitOk;
}

/// Corpus n-gram statistics, reused from the sidecar file when it was built
/// from the same pieces at the same order.
bmm::CorpusStats corpus_stats(const std::filesystem::path& dir, const bmm::Corpus& corpus, const bmm::Config& cfg) {
  const auto sidecar = bmm::stats_sidecar_path(dir, cfg.ngram_order);
  std::vector<std::string> ids;
  for (const auto& p : corpus.pieces) ids.push_back(p.id);
  if (std::filesystem::exists(sidecar)) {
    try {
      auto cached = bmm::load_stats(sidecar);
      if (cached.order == cfg.ngram_order && cached.ids == ids) return cached;
    } catch (const bmm::Error&) {
      // rebuilt below
    }
  }
  std::vector<bmm::NGramProfile> profiles;
  for (const auto& p : corpus.pieces) {
    if (p.notes.size() < 2) {
      profiles.push_back({p.id, cfg.ngram_order, {}});
    } else {
      profiles.push_back(bmm::profile(bmm::encode_relative(p), cfg.ngram_order));
    }
  }
  auto stats = bmm::build_stats(profiles);
  try {
    bmm::save_stats(stats, sidecar);
  } catch (const bmm::Error& e) {
    std::cerr << "warning: " << e.what() << "\n";
  }
  return stats;
}

int cmd_rank(const std::string& query_path, const std::string& corpus_dir, const std::string& detector_name,
             std::size_t top, const ConfigFlags& flags, const std::string& out_path) {
  const auto cfg = flags.resolve();
  const auto detector = bmm::parse_detector(detector_name);
  const auto query = bmm::load_piece(query_path);
  const auto corpus = bmm::load_corpus(corpus_dir);
  for (const auto& [path, why] : corpus.skipped) std::cerr << "skipped " << path << ": " << why << "\n";
  if (corpus.pieces.empty()) throw bmm::Error(bmm::ErrorCode::missing_file, "no pieces in " + corpus_dir);

  std::optional<bmm::CorpusStats> stats;
  if (bmm::uses_ngrams(detector)) stats = corpus_stats(corpus_dir, corpus, cfg);
  const auto ranked = bmm::rank_query(query, corpus.pieces, detector, cfg, stats ? &*stats : nullptr);

  std::cerr << "# detector=" << bmm::to_string(detector) << " params=" << bmm::to_json(cfg).dump() << "\n";
  std::string text;
  char line[256];
  for (const auto& r : ranked) {
    if (top > 0 && r.rank > top) break;
    std::snprintf(line, sizeof(line), "%zu\t%s\t%.6f\n", r.rank, r.id.c_str(), r.score);
    text += line;
  }
  emit(text, out_path);
  return kExitOk;
}

int cmd_synth(const std::string& out_dir, std::size_t count, std::uint64_t seed) {
  const auto paths = bmm::synth_corpus(out_dir, count, seed);
  std::cout << "wrote " << paths.size() << " pieces to " << out_dir << "\n";
  return kExitOk;
}

int cmd_gen(const std::string& corpus_dir, const std::string& counts, std::uint64_t seed, const std::string& out_dir) {
  const auto parsed = bmm::parse_counts(counts);
  const auto manifest = bmm::gen_dataset(corpus_dir, out_dir, parsed, seed);
  std::cout << "wrote " << manifest.cases.size() << " cases and "
            << (std::filesystem::path(out_dir) / "manifest.json").string() << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& manifest_path, const std::string& detectors, const ConfigFlags& flags,
             const std::string& out_path, bool as_json) {
  const auto cfg = flags.resolve();
  const auto list = bmm::parse_detectors(detectors);
  const auto manifest = bmm::load_manifest(manifest_path);
  const auto table = bmm::evaluate(manifest, list, cfg);
  const auto j = bmm::table_to_json(table).dump(2) + "\n";
  if (!out_path.empty()) bmm::write_file(out_path, j);
  std::cout << (as_json ? j : bmm::table_to_text(table));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fine-grained melodic plagiarism detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bmm::kVersion);

  ConfigFlags flags;
  std::string out_path;

  auto* compare = app.add_subcommand("compare", "compare two pieces and report matched segments");
  std::string a_path, b_path;
  bool pretty = false;
  compare->add_option("a", a_path, "first piece (.mid or note-list .json)")->required();
  compare->add_option("b", b_path, "second piece")->required();
  compare->add_flag("--pretty", pretty, "human-readable table of suspect spans");
  compare->add_option("--out", out_path, "write output to a file");
  flags.attach(*compare);

  auto* rank = app.add_subcommand("rank", "rank a corpus by similarity to a query piece");
  std::string query_path, corpus_dir, detector = "bmm";
  std::size_t top = 0;
  rank->add_option("query", query_path, "query piece")->required();
  rank->add_option("corpus", corpus_dir, "directory of candidate pieces")->required();
  rank->add_option("--detector", detector, "bmm, sum_common, ukkonen, tfidf or tversky");
  rank->add_option("--top", top, "print only the first K candidates");
  rank->add_option("--out", out_path, "write output to a file");
  flags.attach(*rank);

  auto* synth = app.add_subcommand("synth", "write a synthetic melody corpus");
  std::string synth_out;
  std::size_t synth_count = 50;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--count", synth_count, "number of pieces");
  synth->add_option("--seed", synth_seed, "random seed")->required();

  auto* gen = app.add_subcommand("gen", "generate simulated plagiarism cases from a corpus");
  std::string gen_corpus, gen_counts = "t=1,p=1,d=1", gen_out = "dataset";
  std::uint64_t gen_seed = 0;
  gen->add_option("--corpus", gen_corpus, "directory of original pieces")->required();
  gen->add_option("--seed", gen_seed, "random seed")->required();
  gen->add_option("--counts", gen_counts, "cases per type, e.g. t=2,p=2,d=2");
  gen->add_option("--out", gen_out, "output directory for derived pieces and manifest.json");

  auto* eval = app.add_subcommand("eval", "rank every manifest case against its corpus");
  std::string manifest_path, detectors = "bmm";
  bool as_json = false;
  eval->add_option("--manifest", manifest_path, "dataset manifest")->required();
  eval->add_option("--detectors", detectors, "comma-separated detector list");
  eval->add_option("--out", out_path, "write the JSON table to a file");
  eval->add_flag("--json", as_json, "print JSON instead of the text table");
  flags.attach(*eval);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*compare) return cmd_compare(a_path, b_path, flags, pretty, out_path);
    if (*rank) return cmd_rank(query_path, corpus_dir, detector, top, flags, out_path);
    if (*synth) return cmd_synth(synth_out, synth_count, synth_seed);
    if (*gen) return cmd_gen(gen_corpus, gen_counts, gen_seed, gen_out);
    if (*eval) return cmd_eval(manifest_path, detectors, flags, out_path, as_json);
  } catch (const bmm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}
