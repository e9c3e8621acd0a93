#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "qtypology/corpus.hpp"
#include "qtypology/error.hpp"
#include "qtypology/fragments.hpp"
#include "qtypology/motifs.hpp"
#include "qtypology/svd.hpp"

namespace qtypology {

struct SparseMatrix {
  SparseRowMatrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// One answer as the multiset of its fragments: every sentence contributes
// each of its (distinct) fragments once.
struct AnswerDocument {
  std::string pair_id;
  std::vector<std::string> fragments;
};

struct TfidfOptions {
  bool smooth_idf = false;  // ln((1+N)/(1+df)) + 1 instead of ln(N/df)
};

struct AnswerMatrix {
  SparseMatrix A;             // fragments x answers, rows unit-norm (or zero)
  std::vector<char> zero_row;  // rows whose weights are all zero (idf = 0)
  std::vector<std::size_t> document_frequency;
};

// Fragment-answer matrix: fragments seen in fewer than n_A answers are
// dropped, each entry is tf * idf with tf the raw count and idf = ln(N/df),
// and each row is scaled to unit Euclidean norm. Columns follow `docs`.
inline AnswerMatrix build_answer_matrix(const std::vector<AnswerDocument>& docs, std::size_t n_A,
                                        const TfidfOptions& opt = {}) {
  if (n_A < 1) throw Error(ErrorKind::kValidation, "n_A must be >= 1");
  std::map<std::string, std::size_t> df;
  std::vector<std::map<std::string, int>> tf(docs.size());
  for (std::size_t j = 0; j < docs.size(); ++j) {
    for (const auto& f : docs[j].fragments) ++tf[j][f];
    for (const auto& [f, c] : tf[j]) ++df[f];
  }
  AnswerMatrix out;
  std::unordered_map<std::string, int> row_of;
  for (const auto& [f, count] : df) {
    if (count < n_A) continue;
    row_of.emplace(f, static_cast<int>(out.A.row_labels.size()));
    out.A.row_labels.push_back(f);
    out.document_frequency.push_back(count);
  }
  if (out.A.row_labels.empty())
    throw Error(ErrorKind::kInvalidInput, "answer matrix is empty: no fragment occurs in >= n_A answers");

  const double N = static_cast<double>(docs.size());
  std::vector<double> idf(out.A.row_labels.size());
  for (std::size_t i = 0; i < idf.size(); ++i) {
    const double d = static_cast<double>(out.document_frequency[i]);
    idf[i] = opt.smooth_idf ? std::log((1.0 + N) / (1.0 + d)) + 1.0 : std::log(N / d);
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> row_sq(idf.size(), 0.0);
  for (std::size_t j = 0; j < docs.size(); ++j) {
    out.A.col_labels.push_back(docs[j].pair_id);
    for (const auto& [f, c] : tf[j]) {
      auto it = row_of.find(f);
      if (it == row_of.end()) continue;
      const double w = c * idf[static_cast<std::size_t>(it->second)];
      if (w == 0.0) continue;
      triplets.emplace_back(it->second, static_cast<int>(j), w);
      row_sq[static_cast<std::size_t>(it->second)] += w * w;
    }
  }
  for (auto& t : triplets) {
    const double norm = std::sqrt(row_sq[static_cast<std::size_t>(t.row())]);
    t = Eigen::Triplet<double>(t.row(), t.col(), t.value() / norm);
  }
  out.A.values.resize(static_cast<Eigen::Index>(idf.size()), static_cast<Eigen::Index>(docs.size()));
  out.A.values.setFromTriplets(triplets.begin(), triplets.end());
  out.zero_row.resize(idf.size());
  for (std::size_t i = 0; i < idf.size(); ++i) out.zero_row[i] = row_sq[i] == 0.0;
  return out;
}

inline std::vector<AnswerDocument> answer_documents(const Corpus& corpus, const FragmentConfig& cfg) {
  std::vector<AnswerDocument> docs;
  docs.reserve(corpus.size());
  for (const auto& p : corpus.pairs()) {
    AnswerDocument d{p.pair_id, {}};
    for (const auto& s : p.answer_sentences)
      for (auto& f : extract_fragments(s, cfg).canonical_strings()) d.fragments.push_back(std::move(f));
    docs.push_back(std::move(d));
  }
  return docs;
}

struct LatentSpace {
  Eigen::MatrixXd U;  // fragments x d
  Eigen::VectorXd S;  // d
  Eigen::MatrixXd V;  // answers x d
  std::vector<std::string> row_labels;  // answer fragments
  std::vector<std::string> col_labels;  // pair ids
  int requested_rank = 0;
  bool rank_deficient = false;

  int rank() const { return static_cast<int>(S.size()); }
};

inline LatentSpace make_latent_space(const SparseMatrix& A, int d, std::uint64_t seed, const SvdOptions& opt = {}) {
  auto f = truncated_svd(A.values, d, seed, opt);
  if (f.S.size() == 0) throw Error(ErrorKind::kDegenerate, "answer matrix has numerical rank 0");
  return {std::move(f.U), std::move(f.S), std::move(f.V), A.row_labels, A.col_labels, d, f.rank_deficient};
}

// Motif-question matrix over representative motifs: q_ij = 1 when motif i
// is contained in question j, rows scaled to unit norm. Columns follow
// `columns`; views for pairs not listed are ignored.
inline SparseMatrix build_motif_matrix(const std::vector<QuestionMotifView>& views, const std::vector<int>& motif_ids,
                                       const std::vector<std::string>& columns) {
  std::unordered_map<int, int> row_of;
  SparseMatrix Q;
  for (int id : motif_ids) {
    row_of.emplace(id, static_cast<int>(Q.row_labels.size()));
    Q.row_labels.push_back(std::to_string(id));
  }
  Q.col_labels = columns;
  std::unordered_map<std::string, int> col_of;
  for (std::size_t j = 0; j < columns.size(); ++j) col_of.emplace(columns[j], static_cast<int>(j));

  std::vector<std::vector<int>> cols_of_row(motif_ids.size());
  for (const auto& v : views) {
    auto c = col_of.find(v.pair_id);
    if (c == col_of.end()) continue;
    for (int m : v.contained_motifs) {
      auto r = row_of.find(m);
      if (r != row_of.end()) cols_of_row[static_cast<std::size_t>(r->second)].push_back(c->second);
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t i = 0; i < cols_of_row.size(); ++i) {
    auto& cs = cols_of_row[i];
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    const double w = cs.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(cs.size()));
    for (int c : cs) triplets.emplace_back(static_cast<int>(i), c, w);
  }
  Q.values.resize(static_cast<Eigen::Index>(motif_ids.size()), static_cast<Eigen::Index>(columns.size()));
  Q.values.setFromTriplets(triplets.begin(), triplets.end());
  return Q;
}

struct MotifEmbedding {
  std::vector<int> motif_ids;
  Eigen::MatrixXd vectors;       // one unit row per motif (zero when degenerate)
  std::vector<char> degenerate;  // zero before normalization

  std::optional<std::size_t> row_of(int motif_id) const {
    auto it = std::lower_bound(motif_ids.begin(), motif_ids.end(), motif_id);
    if (it == motif_ids.end() || *it != motif_id) return std::nullopt;
    return static_cast<std::size_t>(it - motif_ids.begin());
  }
  std::size_t usable() const {
    return static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 0));
  }
};

// Q V S^-1 without row normalization (linear in Q).
inline Eigen::MatrixXd project_rows_raw(const SparseMatrix& Q, const LatentSpace& space) {
  if (Q.col_labels != space.col_labels)
    throw Error(ErrorKind::kAlignment, "motif matrix columns do not align with the latent space answers");
  return (Q.values * space.V) * space.S.cwiseInverse().asDiagonal();
}

inline constexpr double kDegenerateNorm = 1e-12;

// Rows of Q V S^-1 scaled to unit norm; numerically zero rows are flagged.
// Row labels of Q must be motif ids in increasing order.
inline MotifEmbedding project_motifs(const SparseMatrix& Q, const LatentSpace& space) {
  Eigen::MatrixXd raw = project_rows_raw(Q, space);
  MotifEmbedding emb;
  emb.vectors = Eigen::MatrixXd::Zero(raw.rows(), raw.cols());
  emb.degenerate.assign(static_cast<std::size_t>(raw.rows()), 0);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    emb.motif_ids.push_back(std::stoi(Q.row_labels[static_cast<std::size_t>(i)]));
    const double n = raw.row(i).norm();
    if (n < kDegenerateNorm) {
      emb.degenerate[static_cast<std::size_t>(i)] = 1;
    } else {
      emb.vectors.row(i) = raw.row(i) / n;
    }
  }
  if (!std::is_sorted(emb.motif_ids.begin(), emb.motif_ids.end()))
    throw Error(ErrorKind::kValidation, "motif matrix rows must be in increasing motif id order");
  return emb;
}

// Latent vector of one question: its binary sink-motif indicator scaled to
// unit norm and pushed through the motif embeddings, then renormalized,
// which equals the normalized sum of the sink motifs' embeddings. Degenerate
// or unknown sinks are skipped; no usable sink means the question is
// unassignable (nullopt).
inline std::optional<Eigen::VectorXd> project_question(const QuestionMotifView& view, const MotifEmbedding& emb) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(emb.vectors.cols());
  std::size_t used = 0;
  for (int m : view.sink_motifs) {
    auto r = emb.row_of(m);
    if (!r || emb.degenerate[*r]) continue;
    acc += emb.vectors.row(static_cast<Eigen::Index>(*r)).transpose();
    ++used;
  }
  if (used == 0) return std::nullopt;
  acc /= std::sqrt(static_cast<double>(used));
  const double n = acc.norm();
  if (n < kDegenerateNorm) return std::nullopt;
  return Eigen::VectorXd(acc / n);
}

}  // namespace qtypology
