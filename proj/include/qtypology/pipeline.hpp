#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "qtypology/analysis.hpp"
#include "qtypology/binio.hpp"
#include "qtypology/config.hpp"
#include "qtypology/corpus.hpp"
#include "qtypology/fragments.hpp"
#include "qtypology/latent.hpp"
#include "qtypology/motifs.hpp"
#include "qtypology/rng.hpp"
#include "qtypology/typology.hpp"

namespace qtypology {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr int kArtifactVersion = 1;

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> s{"ingest", "fragments", "motifs", "space", "fit", "assign", "analyze", "report"};
  return s;
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::kIo, "sha256 failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return out.str();
}

inline std::string sha256_file(const fs::path& p) { return sha256_hex(read_file(p.string())); }

struct RunOptions {
  int workers = 1;  // recorded; stages run single-threaded
  bool verbose = false;
  std::ostream* log = &std::cerr;
};

namespace detail {

class StageContext {
 public:
  StageContext(std::string stage, const PipelineConfig& cfg, const RunOptions& opt)
      : stage_(std::move(stage)), cfg_(cfg), opt_(opt), root_(cfg.workdir), dir_(root_ / stage_),
        t0_(std::chrono::steady_clock::now()) {}

  const PipelineConfig& cfg() const { return cfg_; }
  fs::path dir() const { return dir_; }

  // Path of a predecessor artifact; the predecessor's manifest must exist.
  fs::path input(const std::string& stage, const std::string& name) {
    const fs::path manifest = root_ / stage / "manifest.json";
    const fs::path p = root_ / stage / name;
    if (!fs::exists(manifest) || !fs::exists(p))
      throw Error(ErrorKind::kMissingArtifact, "stage '" + stage_ + "' needs " + (fs::path(stage) / name).string() +
                                                   "; run stage '" + stage + "' first");
    inputs_[(fs::path(stage) / name).generic_string()] = sha256_file(p);
    return p;
  }

  void external_input(const std::string& path) {
    if (!fs::exists(path)) throw Error(ErrorKind::kIo, "input file not found: " + path);
    inputs_[path] = sha256_file(path);
  }

  void begin() {
    fs::create_directories(dir_);
    fs::remove(dir_ / "manifest.json");
  }

  void write(const std::string& name, std::string_view data) {
    write_file((dir_ / name).string(), data);
    outputs_[name] = sha256_hex(data);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

  void log(const std::string& msg) const {
    if (opt_.verbose && opt_.log) *opt_.log << "[" << stage_ << "] " << msg << '\n';
  }

  // The manifest goes last so its presence marks a complete stage.
  void finish(json extra = json::object()) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    json m{{"stage", stage_},
           {"artifact_version", kArtifactVersion},
           {"parameters", config_json(cfg_)},
           {"inputs", inputs_},
           {"outputs", outputs_},
           {"seconds", secs},
           {"workers", opt_.workers},
           {"summary", std::move(extra)}};
    write_file((dir_ / "manifest.json").string(), m.dump(2) + "\n");
    log("done in " + std::to_string(secs) + " s");
  }

 private:
  std::string stage_;
  const PipelineConfig& cfg_;
  const RunOptions& opt_;
  fs::path root_, dir_;
  std::chrono::steady_clock::time_point t0_;
  std::map<std::string, std::string> inputs_, outputs_;
};

inline std::vector<json> read_jsonl(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::kMissingArtifact, "cannot open " + p.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kCorrupt, p.string() + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

inline std::string to_jsonl(const std::vector<json>& rows) {
  std::string s;
  for (const auto& r : rows) s += r.dump() + "\n";
  return s;
}

inline Corpus load_ingested(StageContext& ctx) {
  const auto meta = ctx.input("ingest", "corpus.jsonl");
  const auto parses = ctx.input("ingest", "parses.conllu");
  auto r = load_corpus(meta.string(), parses.string(), Timeline(ctx.cfg().timeline));
  if (!r.errors.empty())
    throw Error(ErrorKind::kCorrupt, "ingested corpus no longer loads cleanly: " + r.errors.front().message);
  return std::move(r.corpus);
}

inline MotifGraph load_graph(StageContext& ctx) {
  std::vector<Motif> motifs;
  for (const auto& j : read_jsonl(ctx.input("motifs", "motifs.jsonl"))) {
    Motif m;
    m.id = j.at("id").get<int>();
    m.fragments = j.at("fragments").get<std::vector<std::string>>();
    m.support = j.at("support").get<std::size_t>();
    m.representative = j.at("representative").get<int>();
    motifs.push_back(std::move(m));
  }
  return build_dag(std::move(motifs));
}

inline std::vector<QuestionMotifView> load_views(StageContext& ctx) {
  std::vector<QuestionMotifView> views;
  for (const auto& j : read_jsonl(ctx.input("motifs", "views.jsonl")))
    views.push_back({j.at("pair_id").get<std::string>(), j.at("contained").get<std::vector<int>>(),
                     j.at("sinks").get<std::vector<int>>()});
  return views;
}

inline LatentSpace load_space(StageContext& ctx, MotifEmbedding* emb) {
  LatentSpace s;
  s.U = decode_matrix(read_file(ctx.input("space", "U.bin").string()), "U.bin");
  s.S = decode_matrix(read_file(ctx.input("space", "S.bin").string()), "S.bin").col(0);
  s.V = decode_matrix(read_file(ctx.input("space", "V.bin").string()), "V.bin");
  const auto meta = json::parse(read_file(ctx.input("space", "space.json").string()));
  s.row_labels = meta.at("row_labels").get<std::vector<std::string>>();
  s.col_labels = meta.at("col_labels").get<std::vector<std::string>>();
  s.requested_rank = meta.at("requested_rank").get<int>();
  s.rank_deficient = meta.at("rank_deficient").get<bool>();
  if (emb) {
    emb->vectors = decode_matrix(read_file(ctx.input("space", "motif_vectors.bin").string()), "motif_vectors.bin");
    emb->motif_ids = meta.at("motif_ids").get<std::vector<int>>();
    for (bool b : meta.at("degenerate").get<std::vector<bool>>()) emb->degenerate.push_back(b ? 1 : 0);
  }
  return s;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace detail

inline void stage_ingest(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("ingest", cfg, opt);
  ctx.external_input(cfg.metadata_path);
  ctx.external_input(cfg.parses_path);
  ctx.begin();
  auto loaded = load_corpus(cfg.metadata_path, cfg.parses_path, Timeline(cfg.timeline));
  ctx.log("loaded " + std::to_string(loaded.corpus.size()) + " pairs, " + std::to_string(loaded.errors.size()) +
          " record errors");
  if (loaded.corpus.size() == 0) throw Error(ErrorKind::kInvalidInput, "no valid question-answer pairs in input");

  std::ostringstream meta, parses;
  write_metadata(meta, loaded.corpus);
  write_parses(parses, loaded.corpus);
  ctx.write("corpus.jsonl", meta.str());
  ctx.write("parses.conllu", parses.str());

  std::vector<json> errors;
  json by_kind = json::object();
  for (const auto& e : loaded.errors) {
    errors.push_back({{"kind", to_string(e.kind)}, {"source", e.source}, {"line", e.line}, {"pair_id", e.pair_id},
                      {"message", e.message}});
    by_kind[to_string(e.kind)] = by_kind.value(to_string(e.kind), 0) + 1;
  }
  ctx.write("load_errors.jsonl", detail::to_jsonl(errors));

  const auto filtered = filter_analysis_subset(loaded.corpus, cfg.filters);
  std::string ids;
  for (const auto& p : filtered.corpus.pairs()) ids += p.pair_id + "\n";
  ctx.write("analysis_subset.txt", ids);
  std::set<std::string> askers, answerers;
  for (const auto& p : loaded.corpus.pairs()) {
    askers.insert(p.asker.speaker_id);
    answerers.insert(p.answerer.speaker_id);
  }
  json summary{{"pairs", loaded.corpus.size()},
               {"askers", askers.size()},
               {"answerers", answerers.size()},
               {"record_errors", by_kind},
               {"filter",
                {{"input", filtered.input},
                 {"removed_multi_question", filtered.removed_multi_question},
                 {"removed_missing_metadata", filtered.removed_missing_metadata},
                 {"removed_shadow", filtered.removed_shadow},
                 {"retained", filtered.retained()}}}};
  ctx.write_json("ingest_report.json", summary);
  ctx.finish(summary);
}

inline void stage_fragments(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("fragments", cfg, opt);
  const Corpus corpus = detail::load_ingested(ctx);
  ctx.begin();
  std::vector<json> questions, answers;
  std::size_t n_sentences = 0;
  for (const auto& p : corpus.pairs()) {
    json sentences = json::array();
    for (const auto* s : question_sentences_of(p)) {
      sentences.push_back(extract_fragments(*s, cfg.fragments).canonical_strings());
      ++n_sentences;
    }
    questions.push_back({{"pair_id", p.pair_id}, {"sentences", std::move(sentences)}});
    std::vector<std::string> frags;
    for (const auto& s : p.answer_sentences)
      for (auto& f : extract_fragments(s, cfg.fragments).canonical_strings()) frags.push_back(std::move(f));
    answers.push_back({{"pair_id", p.pair_id}, {"fragments", std::move(frags)}});
  }
  ctx.write("questions.jsonl", detail::to_jsonl(questions));
  ctx.write("answers.jsonl", detail::to_jsonl(answers));
  ctx.log(std::to_string(n_sentences) + " question sentences");
  ctx.finish({{"pairs", corpus.size()}, {"question_sentences", n_sentences}});
}

inline void stage_motifs(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("motifs", cfg, opt);
  const auto rows = detail::read_jsonl(ctx.input("fragments", "questions.jsonl"));
  ctx.begin();
  // One transaction per question sentence.
  std::vector<std::vector<std::string>> transactions;
  std::vector<std::pair<std::string, std::vector<std::set<std::string>>>> utterances;
  for (const auto& r : rows) {
    std::vector<std::set<std::string>> qs;
    for (const auto& s : r.at("sentences")) {
      auto v = s.get<std::vector<std::string>>();
      transactions.push_back(v);
      qs.emplace_back(v.begin(), v.end());
    }
    utterances.emplace_back(r.at("pair_id").get<std::string>(), std::move(qs));
  }
  auto motifs = mine_motifs(transactions, cfg.params.n, cfg.params.max_size);
  ctx.log("mined " + std::to_string(motifs.size()) + " motifs from " + std::to_string(transactions.size()) +
          " question sentences");
  if (motifs.empty()) throw Error(ErrorKind::kInfeasible, "no motif reaches support n=" + std::to_string(cfg.params.n));
  const auto merge = merge_equivalent(motifs, cfg.params.p);
  const auto g = build_dag(std::move(motifs));

  std::vector<json> mrows;
  for (const auto& m : g.motifs())
    mrows.push_back({{"id", m.id}, {"fragments", m.fragments}, {"support", m.support}, {"representative", m.representative}});
  ctx.write("motifs.jsonl", detail::to_jsonl(mrows));
  std::string edges;
  for (const auto& e : g.edges()) edges += std::to_string(e.from) + "\t" + std::to_string(e.to) + "\t" + e.added + "\n";
  ctx.write("edges.tsv", edges);

  std::vector<json> vrows;
  std::size_t covered = 0;
  for (const auto& [id, qs] : utterances) {
    const auto v = utterance_view(id, qs, g);
    if (!v.sink_motifs.empty()) ++covered;
    vrows.push_back({{"pair_id", v.pair_id}, {"contained", v.contained_motifs}, {"sinks", v.sink_motifs}});
  }
  ctx.write("views.jsonl", detail::to_jsonl(vrows));
  json summary{{"mined", g.motifs().size()},
               {"classes", g.representatives().size()},
               {"edges", g.edges().size()},
               {"transactions", transactions.size()},
               {"utterances", utterances.size()},
               {"covered_utterances", covered},
               {"coverage", utterances.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(utterances.size())},
               {"merged", merge.merged}};
  ctx.write_json("motif_summary.json", summary);
  ctx.finish(summary);
}

inline void stage_space(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("space", cfg, opt);
  const auto arows = detail::read_jsonl(ctx.input("fragments", "answers.jsonl"));
  const auto g = detail::load_graph(ctx);
  const auto views = detail::load_views(ctx);
  ctx.begin();
  std::vector<AnswerDocument> docs;
  for (const auto& r : arows)
    docs.push_back({r.at("pair_id").get<std::string>(), r.at("fragments").get<std::vector<std::string>>()});
  const auto am = build_answer_matrix(docs, cfg.params.n_A, {cfg.smooth_idf});
  ctx.log("answer matrix " + std::to_string(am.A.rows()) + " x " + std::to_string(am.A.cols()));
  const int d = cfg.params.d;
  if (d > std::min(am.A.rows(), am.A.cols()))
    throw Error(ErrorKind::kValidation, "d=" + std::to_string(d) + " exceeds the answer matrix dimensions " +
                                            std::to_string(am.A.rows()) + " x " + std::to_string(am.A.cols()));
  SvdOptions so;
  const auto space = make_latent_space(am.A, d, seed_for(cfg.params.seed, "space"), so);
  const auto reps = g.representatives();
  const auto Q = build_motif_matrix(views, reps, am.A.col_labels);
  const auto emb = project_motifs(Q, space);

  ctx.write("U.bin", encode_matrix(space.U));
  ctx.write("S.bin", encode_matrix(Eigen::MatrixXd(space.S)));
  ctx.write("V.bin", encode_matrix(space.V));
  ctx.write("motif_vectors.bin", encode_matrix(emb.vectors));
  std::vector<bool> degenerate;
  for (char c : emb.degenerate) degenerate.push_back(c != 0);
  std::vector<std::string> zero_rows;
  for (std::size_t i = 0; i < am.zero_row.size(); ++i)
    if (am.zero_row[i]) zero_rows.push_back(am.A.row_labels[i]);
  ctx.write_json("space.json", {{"row_labels", space.row_labels},
                                {"col_labels", space.col_labels},
                                {"requested_rank", space.requested_rank},
                                {"rank", space.rank()},
                                {"rank_deficient", space.rank_deficient},
                                {"singular_values", std::vector<double>(space.S.data(), space.S.data() + space.S.size())},
                                {"zero_rows", zero_rows},
                                {"motif_ids", emb.motif_ids},
                                {"degenerate", degenerate}});
  ctx.finish({{"fragments", am.A.rows()},
              {"answers", am.A.cols()},
              {"rank", space.rank()},
              {"rank_deficient", space.rank_deficient},
              {"motifs", emb.motif_ids.size()},
              {"usable_motifs", emb.usable()}});
}

inline void stage_fit(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("fit", cfg, opt);
  MotifEmbedding emb;
  const auto space = detail::load_space(ctx, &emb);
  ctx.begin();
  KMeansOptions ko;
  ko.max_iterations = cfg.max_iterations;
  ko.tolerance = cfg.tolerance;
  auto model = fit_types(emb, cfg.params.k, seed_for(cfg.params.seed, "fit"), cfg.params.restarts, ko);
  model.params = cfg.params;
  const auto ft = assign_answer_fragments(space, model);
  model.answer_fragment_assignment = ft.assignment;
  model.unassigned_fragments = ft.unassigned;
  ctx.write("model.bin", encode_model(model, space, emb));
  std::vector<std::size_t> sizes(static_cast<std::size_t>(model.k), 0);
  for (const auto& [id, t] : model.motif_assignment) ++sizes[static_cast<std::size_t>(t)];
  ctx.log("inertia " + std::to_string(model.inertia));
  ctx.finish({{"inertia", model.inertia}, {"motifs_per_type", sizes}, {"unassigned_fragments", ft.unassigned.size()}});
}

inline void stage_assign(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("assign", cfg, opt);
  const auto bundle = decode_model(read_file(ctx.input("fit", "model.bin").string()));
  const auto views = detail::load_views(ctx);
  ctx.begin();
  std::vector<TypeAssignment> assigned;
  std::string unassigned;
  for (const auto& v : views) {
    auto a = assign_question(v, bundle.embedding, bundle.model);
    if (a) {
      assigned.push_back(std::move(*a));
    } else {
      unassigned += v.pair_id + "\n";
    }
  }
  std::ostringstream as, feats;
  write_assignments(as, assigned);
  export_latent_features(feats, assigned);
  ctx.write("assignments.jsonl", as.str());
  ctx.write("unassigned.txt", unassigned);
  ctx.write("features.csv", feats.str());
  ctx.finish({{"assigned", assigned.size()}, {"unassigned", views.size() - assigned.size()}});
}

inline void stage_analyze(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("analyze", cfg, opt);
  const Corpus corpus = detail::load_ingested(ctx);
  std::set<std::string> subset;
  {
    std::istringstream in(read_file(ctx.input("ingest", "analysis_subset.txt").string()));
    for (std::string id; std::getline(in, id);)
      if (!id.empty()) subset.insert(id);
  }
  std::vector<TypeAssignment> assignments;
  {
    std::ifstream in(ctx.input("assign", "assignments.jsonl"));
    for (auto& a : read_assignments(in))
      if (subset.count(a.pair_id)) assignments.push_back(std::move(a));
  }
  ctx.begin();
  const int k = cfg.params.k;
  const auto records = make_records(corpus, assignments);
  const Timeline timeline(cfg.timeline);

  json plot{{"log_odds", json::array()}, {"switch", json::array()}, {"tenure", json::array()}, {"cohort", json::array()}};
  std::string lor_csv = "affiliation,type_id,a,b,c,d,log_odds,ci_low,ci_high,haldane,binomial_p,stars\n";
  std::vector<QuestionRecord> known;
  for (const auto& r : records)
    if (r.affiliation) known.push_back(r);
  for (Affiliation aff : {Affiliation::kGovernment, Affiliation::kOpposition}) {
    for (int t = 0; t < k; ++t) {
      json row{{"affiliation", to_string(aff)}, {"type_id", t}};
      try {
        const auto g = log_odds_by_group(known, t, [aff](const QuestionRecord& r) { return r.affiliation == aff; });
        row.update({{"log_odds", g.lor.log_odds},
                    {"ci_low", g.lor.ci_low},
                    {"ci_high", g.lor.ci_high},
                    {"haldane", g.lor.haldane},
                    {"binomial_p", detail::opt_number(g.binomial_p)},
                    {"stars", g.binomial_p ? significance_stars(*g.binomial_p) : ""}});
        lor_csv += std::string(to_string(aff)) + "," + std::to_string(t) + "," + format_double(g.a) + "," +
                   format_double(g.b) + "," + format_double(g.c) + "," + format_double(g.d) + "," +
                   format_double(g.lor.log_odds) + "," + format_double(g.lor.ci_low) + "," +
                   format_double(g.lor.ci_high) + "," + (g.lor.haldane ? "1" : "0") + "," +
                   (g.binomial_p ? format_double(*g.binomial_p) : "") + "," + row["stars"].get<std::string>() + "\n";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDegenerate) throw;
        row["error"] = e.what();
      }
      plot["log_odds"].push_back(std::move(row));
    }
  }
  ctx.write("log_odds.csv", lor_csv);

  const auto props = propensities(records, k);
  std::string prop_csv = "asker_id,questions";
  for (int t = 0; t < k; ++t) prop_csv += ",p" + std::to_string(t);
  prop_csv += "\n";
  for (const auto& [asker, p] : props.propensity) {
    prop_csv += detail::csv_escape(asker) + "," + std::to_string(props.questions.at(asker));
    for (double x : p) prop_csv += "," + format_double(x);
    prop_csv += "\n";
  }
  ctx.write("propensities.csv", prop_csv);

  for (const auto& rep :
       switch_analysis(records, timeline, cfg.elections, cfg.analysis.min_questions_switch, k, cfg.analysis.zero_method)) {
    for (const auto& s : rep.types)
      plot["switch"].push_back({{"became", to_string(rep.became)},
                                {"askers", rep.askers},
                                {"type_id", s.type_id},
                                {"mean_before", s.mean_before},
                                {"mean_after", s.mean_after},
                                {"p_value", s.test ? json(s.test->p_value) : json(nullptr)},
                                {"degenerate", s.degenerate},
                                {"stars", s.stars}});
  }
  for (Affiliation aff : {Affiliation::kGovernment, Affiliation::kOpposition}) {
    try {
      const auto rep = median_tenure_by_type(records, aff, k);
      for (const auto& t : rep.types)
        plot["tenure"].push_back({{"affiliation", to_string(aff)},
                                  {"overall_median", rep.overall_median},
                                  {"type_id", t.type_id},
                                  {"questions", t.questions},
                                  {"median", detail::opt_number(t.median)},
                                  {"p_value", t.test ? json(t.test->p_value) : json(nullptr)},
                                  {"stars", t.stars}});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kDegenerate) throw;
      plot["tenure"].push_back({{"affiliation", to_string(aff)}, {"error", e.what()}});
    }
  }
  for (const auto& rep :
       cohort_analysis(records, timeline, cfg.elections, cfg.analysis.new_mp_window_days, k)) {
    for (const auto& t : rep.types)
      plot["cohort"].push_back({{"affiliation", to_string(rep.affiliation)},
                                {"new_askers", rep.new_askers},
                                {"old_askers", rep.old_askers},
                                {"new_empty", rep.new_empty},
                                {"old_empty", rep.old_empty},
                                {"type_id", t.type_id},
                                {"mean_new", t.mean_new},
                                {"mean_old", t.mean_old},
                                {"p_value", t.test ? json(t.test->p_value) : json(nullptr)},
                                {"stars", t.stars}});
  }
  ctx.write_json("plot_data.json", plot);
  ctx.finish({{"records", records.size()}, {"askers", props.propensity.size()}});
}

inline void stage_report(const PipelineConfig& cfg, const RunOptions& opt) {
  detail::StageContext ctx("report", cfg, opt);
  const auto bundle = decode_model(read_file(ctx.input("fit", "model.bin").string()));
  const auto g = detail::load_graph(ctx);
  std::vector<TypeAssignment> assignments;
  {
    std::ifstream in(ctx.input("assign", "assignments.jsonl"));
    assignments = read_assignments(in);
  }
  ctx.input("analyze", "plot_data.json");
  ctx.begin();
  const auto rep = type_report(bundle.model, g, bundle.space, assignments);
  ctx.write_json("typology.json", rep);

  std::ostringstream md;
  md << "| type | questions | motifs | top motifs | top answer fragments |\n|---|---|---|---|---|\n";
  for (const auto& t : rep.at("types")) {
    std::string ms, fs_;
    std::size_t i = 0;
    for (const auto& m : t.at("top_motifs")) {
      if (i++ == 5) break;
      std::string f;
      for (const auto& x : m.at("fragments")) f += (f.empty() ? "" : ", ") + x.get<std::string>();
      ms += (ms.empty() ? "" : "; ") + ("{" + f + "}");
    }
    i = 0;
    for (const auto& f : t.at("top_answer_fragments")) {
      if (i++ == 5) break;
      fs_ += (fs_.empty() ? "" : "; ") + f.at("fragment").get<std::string>();
    }
    md << "| " << t.at("type_id").get<int>() << " | " << t.at("questions").get<std::size_t>() << " | "
       << t.at("motifs").get<std::size_t>() << " | " << ms << " | " << fs_ << " |\n";
  }
  ctx.write("typology.md", md.str());
  ctx.finish({{"types", bundle.model.k}});
}

inline void run_stage(const std::string& name, const PipelineConfig& cfg, const RunOptions& opt = {}) {
  static const std::map<std::string, std::function<void(const PipelineConfig&, const RunOptions&)>> stages{
      {"ingest", stage_ingest}, {"fragments", stage_fragments}, {"motifs", stage_motifs},
      {"space", stage_space},   {"fit", stage_fit},             {"assign", stage_assign},
      {"analyze", stage_analyze}, {"report", stage_report}};
  if (name == "run-all") {
    for (const auto& s : stage_names()) stages.at(s)(cfg, opt);
    return;
  }
  auto it = stages.find(name);
  if (it == stages.end()) throw Error(ErrorKind::kValidation, "unknown stage '" + name + "'");
  it->second(cfg, opt);
}

}  // namespace qtypology
