#pragma once

#include <algorithm>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtypology/binio.hpp"
#include "qtypology/corpus.hpp"
#include "qtypology/error.hpp"
#include "qtypology/stats.hpp"
#include "qtypology/typology.hpp"

namespace qtypology {

struct QuestionRecord {
  std::string pair_id;
  int type_id = -1;
  std::string asker_id;
  std::optional<Affiliation> affiliation;
  std::optional<int> tenure_years;
  Date date;
  std::optional<Date> first_office_date;
};

// Joins assignments with asker metadata; unassigned pairs are skipped.
inline std::vector<QuestionRecord> make_records(const Corpus& corpus, const std::vector<TypeAssignment>& assignments) {
  std::vector<QuestionRecord> out;
  out.reserve(assignments.size());
  for (const auto& a : assignments) {
    const QAPair* p = corpus.find(a.pair_id);
    if (p == nullptr) throw Error(ErrorKind::kAlignment, "assignment for unknown pair " + a.pair_id);
    out.push_back({a.pair_id, a.type_id, p->asker.speaker_id, p->asker.affiliation, tenure_years(p->asker, p->date),
                   p->date, p->asker.first_office_date});
  }
  return out;
}

struct PropensityTable {
  int k = 0;
  std::map<std::string, std::vector<double>> propensity;  // asker -> P_{M,t}
  std::map<std::string, std::size_t> questions;

  const std::vector<double>& of(const std::string& asker) const { return propensity.at(asker); }
};

// Share of each asker's questions falling in each type; askers with fewer
// than `min_questions` questions are left out.
inline PropensityTable propensities(const std::vector<QuestionRecord>& records, int k, std::size_t min_questions = 0) {
  std::map<std::string, std::vector<std::size_t>> counts;
  for (const auto& r : records) {
    if (r.type_id < 0 || r.type_id >= k) throw Error(ErrorKind::kValidation, "type id out of range in " + r.pair_id);
    auto& c = counts[r.asker_id];
    c.resize(static_cast<std::size_t>(k), 0);
    ++c[static_cast<std::size_t>(r.type_id)];
  }
  PropensityTable t;
  t.k = k;
  for (const auto& [asker, c] : counts) {
    std::size_t total = 0;
    for (auto x : c) total += x;
    if (total < min_questions || total == 0) continue;
    std::vector<double> p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[i] = static_cast<double>(c[i]) / static_cast<double>(total);
    t.propensity.emplace(asker, std::move(p));
    t.questions.emplace(asker, total);
  }
  return t;
}

struct GroupLogOdds {
  int type_id = -1;
  double a = 0, b = 0, c = 0, d = 0;  // in/type, in/other, out/type, out/other
  LogOddsResult lor;
  std::optional<double> binomial_p;  // in-group type count against the out-group rate
};

// Log-odds of type t among records matching `in_group` against the rest.
inline GroupLogOdds log_odds_by_group(const std::vector<QuestionRecord>& records, int t,
                                      const std::function<bool(const QuestionRecord&)>& in_group) {
  GroupLogOdds g;
  g.type_id = t;
  for (const auto& r : records) {
    const bool in = in_group(r), hit = r.type_id == t;
    (in ? (hit ? g.a : g.b) : (hit ? g.c : g.d)) += 1;
  }
  g.lor = log_odds_ratio(g.a, g.b, g.c, g.d);
  const double p0 = g.c / (g.c + g.d);
  if (p0 > 0.0 && p0 < 1.0)
    g.binomial_p = binomial_test(static_cast<std::size_t>(g.a), static_cast<std::size_t>(g.a + g.b), p0);
  return g;
}

// Government and opposition log-odds per type, each against all other
// records with a known affiliation.
inline std::map<Affiliation, std::vector<GroupLogOdds>> affiliation_log_odds(const std::vector<QuestionRecord>& records,
                                                                             int k) {
  std::vector<QuestionRecord> known;
  for (const auto& r : records)
    if (r.affiliation) known.push_back(r);
  std::map<Affiliation, std::vector<GroupLogOdds>> out;
  for (Affiliation a : {Affiliation::kGovernment, Affiliation::kOpposition}) {
    for (int t = 0; t < k; ++t)
      out[a].push_back(log_odds_by_group(known, t, [a](const QuestionRecord& r) { return r.affiliation == a; }));
  }
  return out;
}

struct TypeTenure {
  int type_id = -1;
  std::size_t questions = 0;
  std::optional<double> median;
  std::optional<TestResult> test;  // in-type vs out-of-type tenures
  std::string stars;
};

struct TenureReport {
  Affiliation affiliation = Affiliation::kGovernment;
  double overall_median = 0.0;
  std::size_t questions = 0;
  std::vector<TypeTenure> types;
};

// Median asker tenure per type within one affiliation, each type tested
// against the tenures of the affiliation's other questions.
inline TenureReport median_tenure_by_type(const std::vector<QuestionRecord>& records, Affiliation aff, int k) {
  std::vector<std::vector<double>> by_type(static_cast<std::size_t>(k));
  std::vector<double> all;
  for (const auto& r : records) {
    if (r.affiliation != aff || !r.tenure_years) continue;
    by_type[static_cast<std::size_t>(r.type_id)].push_back(*r.tenure_years);
    all.push_back(*r.tenure_years);
  }
  if (all.empty()) throw Error(ErrorKind::kDegenerate, std::string("no tenured records for ") + to_string(aff));
  TenureReport rep;
  rep.affiliation = aff;
  rep.overall_median = median(all);
  rep.questions = all.size();
  for (int t = 0; t < k; ++t) {
    TypeTenure tt;
    tt.type_id = t;
    const auto& in = by_type[static_cast<std::size_t>(t)];
    tt.questions = in.size();
    if (!in.empty()) {
      tt.median = median(in);
      std::vector<double> out;
      for (int u = 0; u < k; ++u)
        if (u != t) out.insert(out.end(), by_type[static_cast<std::size_t>(u)].begin(), by_type[static_cast<std::size_t>(u)].end());
      if (!out.empty()) {
        tt.test = mann_whitney_u(in, out);
        tt.stars = significance_stars(tt.test->p_value);
      }
    }
    rep.types.push_back(std::move(tt));
  }
  return rep;
}

struct TypeShift {
  int type_id = -1;
  double mean_before = 0.0;
  double mean_after = 0.0;
  std::optional<TestResult> test;  // empty when every difference is zero
  bool degenerate = false;
  std::string stars;
};

struct SwitchReport {
  Affiliation became = Affiliation::kGovernment;
  std::size_t askers = 0;
  std::vector<TypeShift> types;
};

namespace detail {

// Single affiliation shared by all of an asker's records, if any.
inline std::optional<Affiliation> consistent_affiliation(const std::vector<const QuestionRecord*>& rs) {
  std::optional<Affiliation> a;
  for (const auto* r : rs) {
    if (!r->affiliation) return std::nullopt;
    if (a && *a != *r->affiliation) return std::nullopt;
    a = r->affiliation;
  }
  return a;
}

inline std::vector<double> proportions(const std::vector<const QuestionRecord*>& rs, int k) {
  std::vector<double> p(static_cast<std::size_t>(k), 0.0);
  for (const auto* r : rs) p[static_cast<std::size_t>(r->type_id)] += 1.0;
  for (auto& x : p) x /= static_cast<double>(rs.size());
  return p;
}

inline TypeShift compare_paired(int t, const std::vector<double>& before, const std::vector<double>& after,
                                ZeroMethod zeros) {
  TypeShift s;
  s.type_id = t;
  if (before.empty()) return s;
  for (std::size_t i = 0; i < before.size(); ++i) {
    s.mean_before += before[i];
    s.mean_after += after[i];
  }
  s.mean_before /= static_cast<double>(before.size());
  s.mean_after /= static_cast<double>(after.size());
  try {
    s.test = wilcoxon_signed_rank(before, after, zeros);
    s.stars = significance_stars(s.test->p_value);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDegenerate) throw;
    s.degenerate = true;
  }
  return s;
}

}  // namespace detail

// Propensities of askers whose affiliation flips at an election, computed
// over all their questions in the government period ending at the election
// and in the one starting there. Askers need at least `min_questions` on
// each side.
inline std::vector<SwitchReport> switch_analysis(const std::vector<QuestionRecord>& records, const Timeline& timeline,
                                                 const std::vector<Date>& elections, std::size_t min_questions, int k,
                                                 ZeroMethod zeros = ZeroMethod::kWilcoxon) {
  std::map<Affiliation, std::vector<std::vector<double>>> before, after;
  for (const auto& e : elections) {
    const auto* pre = timeline.period_at(e.plus_days(-1));
    const auto* post = timeline.period_at(e);
    if (pre == nullptr || post == nullptr || pre == post) continue;
    std::map<std::string, std::vector<const QuestionRecord*>> in_pre, in_post;
    for (const auto& r : records) {
      if (pre->start <= r.date && r.date < pre->end) in_pre[r.asker_id].push_back(&r);
      if (post->start <= r.date && r.date < post->end) in_post[r.asker_id].push_back(&r);
    }
    for (const auto& [asker, rs] : in_pre) {
      auto it = in_post.find(asker);
      if (it == in_post.end() || rs.size() < min_questions || it->second.size() < min_questions) continue;
      auto a0 = detail::consistent_affiliation(rs), a1 = detail::consistent_affiliation(it->second);
      if (!a0 || !a1 || *a0 == *a1 || *a0 == Affiliation::kOther || *a1 == Affiliation::kOther) continue;
      before[*a1].push_back(detail::proportions(rs, k));
      after[*a1].push_back(detail::proportions(it->second, k));
    }
  }
  std::vector<SwitchReport> out;
  for (Affiliation became : {Affiliation::kGovernment, Affiliation::kOpposition}) {
    SwitchReport rep;
    rep.became = became;
    const auto& b = before[became];
    const auto& a = after[became];
    rep.askers = b.size();
    for (int t = 0; t < k; ++t) {
      std::vector<double> x, y;
      for (std::size_t i = 0; i < b.size(); ++i) {
        x.push_back(b[i][static_cast<std::size_t>(t)]);
        y.push_back(a[i][static_cast<std::size_t>(t)]);
      }
      rep.types.push_back(detail::compare_paired(t, x, y, zeros));
    }
    out.push_back(std::move(rep));
  }
  return out;
}

struct CohortType {
  int type_id = -1;
  double mean_new = 0.0;
  double mean_old = 0.0;
  std::optional<TestResult> test;
  std::string stars;
};

struct CohortReport {
  Affiliation affiliation = Affiliation::kGovernment;
  std::size_t new_askers = 0;
  std::size_t old_askers = 0;
  bool new_empty = false;
  bool old_empty = false;
  std::vector<CohortType> types;
};

// New MPs first took office within `new_window_days` of an election; old MPs
// held office before it. Propensities cover each asker's questions in the
// sitting that follows the election (up to the next listed election, or the
// end of the government period that starts there).
inline std::vector<CohortReport> cohort_analysis(const std::vector<QuestionRecord>& records, const Timeline& timeline,
                                                 std::vector<Date> elections, int new_window_days, int k,
                                                 std::size_t min_questions = 1) {
  std::sort(elections.begin(), elections.end());
  std::map<Affiliation, std::vector<std::vector<double>>> fresh, old;
  for (std::size_t i = 0; i < elections.size(); ++i) {
    const Date e = elections[i];
    Date end;
    if (i + 1 < elections.size()) {
      end = elections[i + 1];
    } else if (const auto* p = timeline.period_at(e)) {
      end = p->end;
    } else {
      continue;
    }
    std::map<std::string, std::vector<const QuestionRecord*>> by_asker;
    for (const auto& r : records)
      if (e <= r.date && r.date < end && r.first_office_date) by_asker[r.asker_id].push_back(&r);
    for (const auto& [asker, rs] : by_asker) {
      if (rs.size() < min_questions) continue;
      auto aff = detail::consistent_affiliation(rs);
      if (!aff || *aff == Affiliation::kOther) continue;
      const Date first = *rs.front()->first_office_date;
      if (first < e) {
        old[*aff].push_back(detail::proportions(rs, k));
      } else if (first < e.plus_days(new_window_days)) {
        fresh[*aff].push_back(detail::proportions(rs, k));
      }
    }
  }
  std::vector<CohortReport> out;
  for (Affiliation aff : {Affiliation::kGovernment, Affiliation::kOpposition}) {
    CohortReport rep;
    rep.affiliation = aff;
    const auto& n = fresh[aff];
    const auto& o = old[aff];
    rep.new_askers = n.size();
    rep.old_askers = o.size();
    rep.new_empty = n.empty();
    rep.old_empty = o.empty();
    for (int t = 0; t < k; ++t) {
      CohortType ct;
      ct.type_id = t;
      std::vector<double> x, y;
      for (const auto& p : n) x.push_back(p[static_cast<std::size_t>(t)]);
      for (const auto& p : o) y.push_back(p[static_cast<std::size_t>(t)]);
      if (!x.empty()) ct.mean_new = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
      if (!y.empty()) ct.mean_old = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
      if (!x.empty() && !y.empty()) {
        ct.test = mann_whitney_u(x, y);
        ct.stars = significance_stars(ct.test->p_value);
      }
      rep.types.push_back(std::move(ct));
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// CSV rows: pair_id, type_id, distance, x0..x{d-1}. Assignments without a
// vector are skipped.
inline void export_latent_features(std::ostream& out, const std::vector<TypeAssignment>& assignments) {
  Eigen::Index d = -1;
  for (const auto& a : assignments)
    if (a.vector.size() > 0) {
      d = a.vector.size();
      break;
    }
  out << "pair_id,type_id,distance";
  for (Eigen::Index i = 0; i < std::max<Eigen::Index>(d, 0); ++i) out << ",x" << i;
  out << '\n';
  for (const auto& a : assignments) {
    if (a.vector.size() == 0) continue;
    if (a.vector.size() != d) throw Error(ErrorKind::kAlignment, "latent vectors differ in dimension");
    if (a.pair_id.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : a.pair_id) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      out << q << '"';
    } else {
      out << a.pair_id;
    }
    out << ',' << a.type_id << ',' << format_double(a.distance);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(a.vector(i));
    out << '\n';
  }
}

// Reader for files written by export_latent_features (unquoted ids only).
inline std::vector<TypeAssignment> read_latent_features(std::istream& in) {
  std::vector<TypeAssignment> out;
  std::string line;
  if (!std::getline(in, line)) return out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() < 3) throw Error(ErrorKind::kCorrupt, "feature row has fewer than 3 cells");
    TypeAssignment a;
    a.pair_id = cells[0];
    a.type_id = std::stoi(cells[1]);
    a.distance = std::stod(cells[2]);
    a.vector.resize(static_cast<Eigen::Index>(cells.size() - 3));
    for (std::size_t i = 3; i < cells.size(); ++i) a.vector(static_cast<Eigen::Index>(i - 3)) = std::stod(cells[i]);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace qtypology
