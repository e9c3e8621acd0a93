#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qtypology/binio.hpp"
#include "qtypology/error.hpp"
#include "qtypology/kmeans.hpp"
#include "qtypology/latent.hpp"
#include "qtypology/motifs.hpp"

namespace qtypology {

struct ModelParams {
  std::size_t n = 100;
  double p = 0.9;
  std::size_t n_A = 100;
  int d = 25;
  int k = 8;
  std::uint64_t seed = 0;
  std::size_t max_size = 4;
  int restarts = 10;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline void to_json(nlohmann::json& j, const ModelParams& m) {
  j = nlohmann::json{{"n", m.n},       {"p", m.p},     {"n_A", m.n_A},           {"d", m.d},
                     {"k", m.k},       {"seed", m.seed}, {"max_size", m.max_size}, {"restarts", m.restarts}};
}

inline void from_json(const nlohmann::json& j, ModelParams& m) {
  j.at("n").get_to(m.n);
  j.at("p").get_to(m.p);
  j.at("n_A").get_to(m.n_A);
  j.at("d").get_to(m.d);
  j.at("k").get_to(m.k);
  j.at("seed").get_to(m.seed);
  j.at("max_size").get_to(m.max_size);
  j.at("restarts").get_to(m.restarts);
}

struct TypeModel {
  int k = 0;
  Eigen::MatrixXd centroids;                               // k x d
  std::map<int, int> motif_assignment;                     // representative motif id -> type
  std::map<std::string, int> answer_fragment_assignment;  // fragment -> type
  std::vector<std::string> unassigned_fragments;           // zero rows of U
  ModelParams params;
  double inertia = 0.0;
};

struct TypeAssignment {
  std::string pair_id;
  int type_id = -1;
  double distance = 0.0;
  Eigen::VectorXd vector;  // the projected question
};

// k-means over the non-degenerate motif embeddings.
inline TypeModel fit_types(const MotifEmbedding& emb, int k, std::uint64_t seed, int restarts,
                           KMeansOptions opt = {}) {
  if (k < 2) throw Error(ErrorKind::kValidation, "k must be >= 2");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < emb.motif_ids.size(); ++i)
    if (!emb.degenerate[i]) rows.push_back(static_cast<Eigen::Index>(i));
  if (static_cast<int>(rows.size()) < k)
    throw Error(ErrorKind::kInfeasible, "only " + std::to_string(rows.size()) +
                                            " non-degenerate motif embeddings for k=" + std::to_string(k));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), emb.vectors.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = emb.vectors.row(rows[i]);
  opt.restarts = restarts;
  auto km = kmeans(X, k, seed, opt);

  TypeModel m;
  m.k = k;
  m.centroids = std::move(km.centroids);
  m.inertia = km.inertia;
  for (std::size_t i = 0; i < rows.size(); ++i)
    m.motif_assignment.emplace(emb.motif_ids[static_cast<std::size_t>(rows[i])], km.labels[i]);
  m.params.k = k;
  m.params.seed = seed;
  m.params.restarts = restarts;
  return m;
}

// Nearest-centroid type of a question from its sink motifs; nullopt when
// none of them has a usable embedding.
inline std::optional<TypeAssignment> assign_question(const QuestionMotifView& view, const MotifEmbedding& emb,
                                                     const TypeModel& model) {
  auto q = project_question(view, emb);
  if (!q) return std::nullopt;
  if (q->size() != model.centroids.cols())
    throw Error(ErrorKind::kAlignment, "question vector and centroids differ in dimension");
  auto [t, d2] = nearest_centroid(q->transpose(), model.centroids);
  return TypeAssignment{view.pair_id, t, std::sqrt(d2), std::move(*q)};
}

struct FragmentTyping {
  std::map<std::string, int> assignment;
  std::vector<std::string> unassigned;
};

// Each row of U, scaled to unit norm, goes to its nearest centroid.
inline FragmentTyping assign_answer_fragments(const LatentSpace& space, const TypeModel& model) {
  if (space.U.cols() != model.centroids.cols())
    throw Error(ErrorKind::kAlignment, "latent space rank differs from centroid dimension");
  FragmentTyping out;
  for (Eigen::Index i = 0; i < space.U.rows(); ++i) {
    const auto& label = space.row_labels[static_cast<std::size_t>(i)];
    const double n = space.U.row(i).norm();
    if (n < kDegenerateNorm) {
      out.unassigned.push_back(label);
      continue;
    }
    Eigen::RowVectorXd u = space.U.row(i) / n;
    out.assignment.emplace(label, nearest_centroid(u, model.centroids).first);
  }
  return out;
}

struct ModelBundle {
  TypeModel model;
  LatentSpace space;
  MotifEmbedding embedding;
};

inline constexpr std::string_view kModelMagic = "QTYPMODL";
inline constexpr std::uint32_t kModelVersion = 1;

inline std::string encode_model(const TypeModel& model, const LatentSpace& space, const MotifEmbedding& emb) {
  ByteWriter w;
  w.u32(kModelVersion);
  w.tag("PRMS");
  nlohmann::json pj = model.params;
  pj["inertia"] = model.inertia;
  w.bytes(pj.dump());
  w.tag("CENT");
  w.matrix(model.centroids);
  w.tag("MASG");
  w.u64(model.motif_assignment.size());
  for (const auto& [id, t] : model.motif_assignment) {
    w.i64(id);
    w.i64(t);
  }
  w.tag("FASG");
  w.u64(model.answer_fragment_assignment.size());
  for (const auto& [f, t] : model.answer_fragment_assignment) {
    w.bytes(f);
    w.i64(t);
  }
  w.strings(model.unassigned_fragments);
  w.tag("SPCE");
  w.matrix(space.U);
  w.vector(space.S);
  w.matrix(space.V);
  w.strings(space.row_labels);
  w.strings(space.col_labels);
  w.i64(space.requested_rank);
  w.u32(space.rank_deficient ? 1 : 0);
  w.tag("EMBD");
  w.u64(emb.motif_ids.size());
  for (int id : emb.motif_ids) w.i64(id);
  w.matrix(emb.vectors);
  for (char c : emb.degenerate) w.u32(c ? 1 : 0);
  w.tag("END!");
  return std::string(kModelMagic) + w.str();
}

inline ModelBundle decode_model(std::string_view data) {
  if (data.size() < kModelMagic.size() || data.substr(0, kModelMagic.size()) != kModelMagic)
    throw Error(ErrorKind::kCorrupt, "model file: bad magic");
  ByteReader r(data.substr(kModelMagic.size()), "model file");
  const auto version = r.u32();
  if (version != kModelVersion)
    throw Error(ErrorKind::kIncompatible, "model file version " + std::to_string(version) + ", expected " +
                                              std::to_string(kModelVersion));
  ModelBundle b;
  r.expect_tag("PRMS");
  try {
    auto pj = nlohmann::json::parse(r.bytes());
    b.model.params = pj.get<ModelParams>();
    b.model.inertia = pj.at("inertia").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kCorrupt, std::string("model file: bad params: ") + e.what());
  }
  r.expect_tag("CENT");
  b.model.centroids = r.matrix();
  b.model.k = static_cast<int>(b.model.centroids.rows());
  r.expect_tag("MASG");
  for (auto n = r.count(16); n > 0; --n) {
    const auto id = static_cast<int>(r.i64());
    b.model.motif_assignment.emplace(id, static_cast<int>(r.i64()));
  }
  r.expect_tag("FASG");
  for (auto n = r.count(16); n > 0; --n) {
    auto f = r.bytes();
    b.model.answer_fragment_assignment.emplace(std::move(f), static_cast<int>(r.i64()));
  }
  b.model.unassigned_fragments = r.strings();
  r.expect_tag("SPCE");
  b.space.U = r.matrix();
  b.space.S = r.vector();
  b.space.V = r.matrix();
  b.space.row_labels = r.strings();
  b.space.col_labels = r.strings();
  b.space.requested_rank = static_cast<int>(r.i64());
  b.space.rank_deficient = r.u32() != 0;
  r.expect_tag("EMBD");
  const auto n = r.count(8);
  for (std::uint64_t i = 0; i < n; ++i) b.embedding.motif_ids.push_back(static_cast<int>(r.i64()));
  b.embedding.vectors = r.matrix();
  for (std::uint64_t i = 0; i < n; ++i) b.embedding.degenerate.push_back(r.u32() ? 1 : 0);
  r.expect_tag("END!");
  if (!r.at_end()) throw Error(ErrorKind::kCorrupt, "model file: trailing bytes");
  if (b.model.k != b.model.params.k || b.embedding.vectors.rows() != static_cast<Eigen::Index>(n))
    throw Error(ErrorKind::kCorrupt, "model file: inconsistent sections");
  return b;
}

inline void save_model(const TypeModel& model, const LatentSpace& space, const MotifEmbedding& emb,
                       const std::string& path) {
  write_file(path, encode_model(model, space, emb));
}

inline ModelBundle load_model(const std::string& path) { return decode_model(read_file(path)); }

inline void write_assignments(std::ostream& out, const std::vector<TypeAssignment>& as) {
  for (const auto& a : as)
    out << nlohmann::json{{"pair_id", a.pair_id}, {"type_id", a.type_id}, {"distance", a.distance}}.dump() << '\n';
}

inline std::vector<TypeAssignment> read_assignments(std::istream& in) {
  std::vector<TypeAssignment> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      out.push_back({j.at("pair_id").get<std::string>(), j.at("type_id").get<int>(), j.at("distance").get<double>(), {}});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kCorrupt, "assignments line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

// Per-type summary in the shape of a typology table: motif and question
// counts, the most frequent motifs, and the answer fragments closest to the
// centroid.
inline nlohmann::json type_report(const TypeModel& model, const MotifGraph& g, const LatentSpace& space,
                                  const std::vector<TypeAssignment>& assignments, std::size_t top = 20) {
  std::vector<std::size_t> questions(static_cast<std::size_t>(model.k), 0);
  for (const auto& a : assignments) ++questions[static_cast<std::size_t>(a.type_id)];

  std::vector<std::vector<int>> motifs_of(static_cast<std::size_t>(model.k));
  for (const auto& [id, t] : model.motif_assignment) motifs_of[static_cast<std::size_t>(t)].push_back(id);

  std::vector<std::vector<std::pair<double, std::string>>> frags_of(static_cast<std::size_t>(model.k));
  std::map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < space.row_labels.size(); ++i) row_of.emplace(space.row_labels[i], static_cast<Eigen::Index>(i));
  for (const auto& [f, t] : model.answer_fragment_assignment) {
    auto it = row_of.find(f);
    if (it == row_of.end()) continue;
    Eigen::RowVectorXd u = space.U.row(it->second).normalized();
    frags_of[static_cast<std::size_t>(t)].emplace_back((u - model.centroids.row(t)).norm(), f);
  }

  nlohmann::json types = nlohmann::json::array();
  for (int t = 0; t < model.k; ++t) {
    auto& ms = motifs_of[static_cast<std::size_t>(t)];
    std::stable_sort(ms.begin(), ms.end(), [&](int a, int b) { return g.motif(a).support > g.motif(b).support; });
    nlohmann::json top_motifs = nlohmann::json::array();
    for (std::size_t i = 0; i < ms.size() && i < top; ++i)
      top_motifs.push_back({{"motif_id", ms[i]}, {"fragments", g.motif(ms[i]).fragments}, {"support", g.motif(ms[i]).support}});
    auto& fs = frags_of[static_cast<std::size_t>(t)];
    std::sort(fs.begin(), fs.end());
    nlohmann::json top_frags = nlohmann::json::array();
    for (std::size_t i = 0; i < fs.size() && i < top; ++i) top_frags.push_back({{"fragment", fs[i].second}, {"distance", fs[i].first}});
    types.push_back({{"type_id", t},
                     {"questions", questions[static_cast<std::size_t>(t)]},
                     {"motifs", ms.size()},
                     {"top_motifs", std::move(top_motifs)},
                     {"top_answer_fragments", std::move(top_frags)}});
  }
  return {{"params", model.params}, {"types", std::move(types)}};
}

}  // namespace qtypology
