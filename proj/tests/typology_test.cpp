#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "qtypology/kmeans.hpp"
#include "qtypology/rng.hpp"
#include "qtypology/typology.hpp"

using namespace qtypology;

namespace {

Eigen::MatrixXd gaussian(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = rng.normal();
  return X;
}

// Two tight blobs around +-c along the first axis.
Eigen::MatrixXd two_blobs(Rng& rng, int n, int dims, std::vector<int>& truth) {
  Eigen::MatrixXd X = 0.1 * gaussian(rng, n, dims);
  truth.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    truth[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
    X(i, 0) += truth[static_cast<std::size_t>(i)] ? 3.0 : -3.0;
  }
  if (std::count(truth.begin(), truth.end(), 1) == 0) {
    truth[0] = 1;
    X(0, 0) += 6.0;
  }
  if (std::count(truth.begin(), truth.end(), 0) == 0) {
    truth[0] = 0;
    X(0, 0) -= 6.0;
  }
  return X;
}

MotifEmbedding unit_embedding(Rng& rng, int motifs, int dims) {
  MotifEmbedding e;
  e.vectors = gaussian(rng, motifs, dims);
  for (int i = 0; i < motifs; ++i) {
    e.motif_ids.push_back(3 * i + 1);
    e.vectors.row(i).normalize();
  }
  e.degenerate.assign(static_cast<std::size_t>(motifs), 0);
  return e;
}

struct Fitted {
  TypeModel model;
  LatentSpace space;
  MotifEmbedding emb;
};

Fitted fitted(std::uint64_t seed) {
  Rng rng(seed);
  Fitted f;
  SparseMatrix A;
  A.values = gaussian(rng, 12, 9).sparseView();
  for (int i = 0; i < 12; ++i) A.row_labels.push_back("frag" + std::to_string(i));
  for (int j = 0; j < 9; ++j) A.col_labels.push_back("pair" + std::to_string(j));
  f.space = make_latent_space(A, 4, 3);
  f.emb = unit_embedding(rng, 20, 4);
  f.emb.degenerate[7] = 1;
  f.emb.vectors.row(7).setZero();
  f.model = fit_types(f.emb, 3, 42, 5);
  f.model.params = ModelParams{100, 0.9, 100, 25, 3, 42, 4, 5};
  const auto ft = assign_answer_fragments(f.space, f.model);
  f.model.answer_fragment_assignment = ft.assignment;
  f.model.unassigned_fragments = ft.unassigned;
  return f;
}

}  // namespace

TEST(KMeans, TwoClustersMatchExhaustiveOracle) {
  Rng rng(10);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.below(11));
    std::vector<int> truth;
    const auto X = two_blobs(rng, n, 1 + static_cast<int>(rng.below(4)), truth);
    const auto km = kmeans(X, 2, rng.next());
    const auto [best, labels] = oracle::best_bipartition(X);
    EXPECT_NEAR(km.inertia, best, 1e-9 * std::max(1.0, best));
    EXPECT_TRUE(oracle::same_partition(km.labels, labels));
  }
}

TEST(KMeans, NeverBeatsTheGlobalOptimum) {
  Rng rng(11);
  for (int t = 0; t < 60; ++t) {
    const auto X = gaussian(rng, 3 + static_cast<int>(rng.below(10)), 2);
    const auto km = kmeans(X, 2, rng.next());
    EXPECT_GE(km.inertia, oracle::best_bipartition(X).first - 1e-9);
  }
}

TEST(KMeans, InertiaHistoryIsNonIncreasing) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto X = gaussian(rng, 80, 3);
    const auto km = kmeans(X, 5, rng.next(), {1, 300, 0.0});
    for (std::size_t i = 1; i < km.inertia_history.size(); ++i)
      EXPECT_LE(km.inertia_history[i], km.inertia_history[i - 1] + 1e-12);
    EXPECT_LE(km.inertia, km.inertia_history.back() + 1e-12);
  }
}

TEST(KMeans, KDistinctPointsGiveZeroInertia) {
  Rng rng(13);
  const auto X = gaussian(rng, 4, 3);
  const auto km = kmeans(X, 4, 1);
  EXPECT_NEAR(km.inertia, 0.0, 1e-20);
  std::set<int> used(km.labels.begin(), km.labels.end());
  EXPECT_EQ(used.size(), 4u);
}

TEST(KMeans, ValidatesArguments) {
  const Eigen::MatrixXd X = Eigen::MatrixXd::Zero(3, 2);
  try {
    kmeans(X, 4, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
  }
  EXPECT_THROW(kmeans(X, 0, 1), Error);
}

TEST(KMeans, DeterministicForSeed) {
  Rng rng(14);
  const auto X = gaussian(rng, 50, 4);
  const auto a = kmeans(X, 3, 77), b = kmeans(X, 3, 77);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(KMeans, NearestCentroidTiesGoToLowestId) {
  Eigen::MatrixXd C(3, 1);
  C << 1, -1, 1;
  const auto [t, d2] = nearest_centroid(Eigen::RowVectorXd::Zero(1), C);
  EXPECT_EQ(t, 0);
  EXPECT_EQ(d2, 1.0);
}

TEST(Typing, AssignmentIsNearestCentroidOfNormalizedSinkSum) {
  const auto f = fitted(1);
  EXPECT_EQ(f.model.motif_assignment.size(), 19u);
  EXPECT_FALSE(f.model.motif_assignment.count(f.emb.motif_ids[7]));
  QuestionMotifView v;
  v.pair_id = "q";
  v.sink_motifs = {f.emb.motif_ids[0], f.emb.motif_ids[4]};
  const auto a = assign_question(v, f.emb, f.model);
  ASSERT_TRUE(a);
  Eigen::VectorXd q = f.emb.vectors.row(0) + f.emb.vectors.row(4);
  q.normalize();
  double best = INFINITY;
  for (int t = 0; t < f.model.k; ++t) best = std::min(best, (q.transpose() - f.model.centroids.row(t)).norm());
  EXPECT_NEAR(a->distance, best, 1e-12);
  EXPECT_NEAR((q.transpose() - f.model.centroids.row(a->type_id)).norm(), best, 1e-12);
  v.sink_motifs = {f.emb.motif_ids[7]};
  EXPECT_FALSE(assign_question(v, f.emb, f.model));
}

TEST(Typing, FitRejectsBadK) {
  Rng rng(2);
  const auto e = unit_embedding(rng, 3, 2);
  EXPECT_THROW(fit_types(e, 1, 1, 1), Error);
  EXPECT_THROW(fit_types(e, 4, 1, 1), Error);
}

TEST(ModelFile, SaveLoadSaveIsByteIdentical) {
  const auto f = fitted(3);
  const auto bytes = encode_model(f.model, f.space, f.emb);
  const auto b = decode_model(bytes);
  EXPECT_EQ(encode_model(b.model, b.space, b.embedding), bytes);
  EXPECT_EQ(b.model.params, (ModelParams{100, 0.9, 100, 25, 3, 42, 4, 5}));
  EXPECT_EQ(b.model.centroids, f.model.centroids);
  EXPECT_EQ(b.model.motif_assignment, f.model.motif_assignment);
  EXPECT_EQ(b.space.U, f.space.U);
  EXPECT_EQ(b.embedding.degenerate, f.emb.degenerate);

  const auto path = (std::filesystem::temp_directory_path() / "qtypology_model_test.bin").string();
  save_model(f.model, f.space, f.emb, path);
  EXPECT_EQ(encode_model(load_model(path).model, f.space, f.emb), bytes);
  std::filesystem::remove(path);
}

TEST(ModelFile, DefaultParametersSurvive) {
  auto f = fitted(4);
  f.model.params = ModelParams{};
  f.model.params.k = 3;
  const auto b = decode_model(encode_model(f.model, f.space, f.emb));
  EXPECT_EQ(b.model.params.n, 100u);
  EXPECT_EQ(b.model.params.p, 0.9);
  EXPECT_EQ(b.model.params.n_A, 100u);
  EXPECT_EQ(b.model.params.d, 25);
}

TEST(ModelFile, TruncationIsCorrupt) {
  const auto f = fitted(5);
  const auto bytes = encode_model(f.model, f.space, f.emb);
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
    try {
      decode_model(std::string_view(bytes).substr(0, cut));
      FAIL() << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kCorrupt) << cut;
    }
  }
  try {
    decode_model(bytes + "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorrupt);
  }
}

TEST(ModelFile, VersionMismatchIsIncompatible) {
  const auto f = fitted(6);
  auto bytes = encode_model(f.model, f.space, f.emb);
  bytes[kModelMagic.size()] = static_cast<char>(bytes[kModelMagic.size()] + 1);
  try {
    decode_model(bytes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIncompatible);
    EXPECT_EQ(e.exit_code(), 10 + static_cast<int>(ErrorKind::kIncompatible));
  }
  EXPECT_THROW(load_model("/nonexistent/model.bin"), Error);
}

TEST(Assignments, JsonlRoundTrip) {
  std::vector<TypeAssignment> as{{"a", 0, 0.25, {}}, {"b", 2, 1.0 / 3.0, {}}};
  std::stringstream ss;
  write_assignments(ss, as);
  const auto back = read_assignments(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].pair_id, "b");
  EXPECT_EQ(back[1].type_id, 2);
  EXPECT_EQ(back[1].distance, 1.0 / 3.0);
}
