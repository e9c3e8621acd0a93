#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "qtypology/conllu.hpp"
#include "qtypology/date.hpp"
#include "qtypology/error.hpp"

namespace qtypology {

enum class Affiliation { kGovernment, kOpposition, kOther };

inline const char* to_string(Affiliation a) {
  switch (a) {
    case Affiliation::kGovernment: return "government";
    case Affiliation::kOpposition: return "opposition";
    case Affiliation::kOther: return "other";
  }
  return "other";
}

// One government period: [start, end) with its governing party and the
// official (largest) opposition party.
struct GovernmentPeriod {
  Date start;
  Date end;
  std::string governing_party;
  std::string opposition_party;
  std::string label;
};

class Timeline {
 public:
  Timeline() = default;
  explicit Timeline(std::vector<GovernmentPeriod> periods) : periods_(std::move(periods)) {
    std::sort(periods_.begin(), periods_.end(),
              [](const auto& a, const auto& b) { return a.start < b.start; });
  }

  const std::vector<GovernmentPeriod>& periods() const { return periods_; }
  bool empty() const { return periods_.empty(); }

  const GovernmentPeriod* period_at(const Date& d) const {
    for (const auto& p : periods_)
      if (p.start <= d && d < p.end) return &p;
    return nullptr;
  }

  // Null when the date falls outside the timeline or the party is unknown.
  std::optional<Affiliation> affiliation(const std::string& party, const Date& d) const {
    if (party.empty()) return std::nullopt;
    const auto* p = period_at(d);
    if (p == nullptr) return std::nullopt;
    if (party == p->governing_party) return Affiliation::kGovernment;
    if (party == p->opposition_party) return Affiliation::kOpposition;
    return Affiliation::kOther;
  }

 private:
  std::vector<GovernmentPeriod> periods_;
};

struct SpeakerMeta {
  std::string speaker_id;
  std::string party;
  std::optional<Date> first_office_date;
  std::optional<bool> is_minister;
  std::optional<bool> is_shadow;
  std::optional<Affiliation> affiliation;  // resolved against the timeline at the pair's date

  friend bool operator==(const SpeakerMeta&, const SpeakerMeta&) = default;
};

struct QAPair {
  std::string pair_id;
  Date date;
  std::string question_text;
  std::string answer_text;
  std::vector<ParsedSentence> question_sentences;
  std::vector<ParsedSentence> answer_sentences;
  SpeakerMeta asker;
  SpeakerMeta answerer;
  std::optional<std::string> department;

  friend bool operator==(const QAPair&, const QAPair&) = default;
};

// Sentences of the question utterance that end in '?', in order.
inline std::vector<const ParsedSentence*> question_sentences_of(const QAPair& pair) {
  std::vector<const ParsedSentence*> out;
  for (const auto& s : pair.question_sentences)
    if (s.is_question) out.push_back(&s);
  return out;
}

// Years in office at the question date; null without a first-office date.
inline std::optional<int> tenure_years(const SpeakerMeta& m, const Date& at) {
  if (!m.first_office_date) return std::nullopt;
  return whole_years_between(*m.first_office_date, at);
}

class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<QAPair> pairs) : pairs_(std::move(pairs)) {
    std::stable_sort(pairs_.begin(), pairs_.end(), [](const QAPair& a, const QAPair& b) {
      return std::tie(a.date, a.pair_id) < std::tie(b.date, b.pair_id);
    });
    for (std::size_t i = 0; i < pairs_.size(); ++i) index_.emplace(pairs_[i].pair_id, i);
  }

  const std::vector<QAPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  const QAPair& operator[](std::size_t i) const { return pairs_[i]; }

  const QAPair* find(const std::string& pair_id) const {
    auto it = index_.find(pair_id);
    return it == index_.end() ? nullptr : &pairs_[it->second];
  }

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.pairs_ == b.pairs_; }

 private:
  std::vector<QAPair> pairs_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class RecordErrorKind { kMalformedJson, kSchema, kDuplicateId, kOrphanParse, kMissingParse, kMalformedParse, kNoQuestion };

inline const char* to_string(RecordErrorKind k) {
  switch (k) {
    case RecordErrorKind::kMalformedJson: return "malformed-json";
    case RecordErrorKind::kSchema: return "schema";
    case RecordErrorKind::kDuplicateId: return "duplicate-id";
    case RecordErrorKind::kOrphanParse: return "orphan-parse";
    case RecordErrorKind::kMissingParse: return "missing-parse";
    case RecordErrorKind::kMalformedParse: return "malformed-parse";
    case RecordErrorKind::kNoQuestion: return "no-question";
  }
  return "unknown";
}

struct RecordError {
  RecordErrorKind kind;
  std::string source;  // "metadata" or "parses"
  std::size_t line = 0;
  std::string pair_id;
  std::string message;
};

struct LoadResult {
  Corpus corpus;
  std::vector<RecordError> errors;

  std::size_t count(RecordErrorKind k) const {
    return static_cast<std::size_t>(
        std::count_if(errors.begin(), errors.end(), [k](const RecordError& e) { return e.kind == k; }));
  }
};

namespace detail {

using nlohmann::json;

inline std::optional<bool> opt_bool(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_boolean()) throw std::invalid_argument(std::string(key) + " must be boolean or null");
  return it->get<bool>();
}

inline std::string req_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw std::invalid_argument(std::string("missing string field ") + key);
  return it->get<std::string>();
}

inline SpeakerMeta parse_speaker(const json& j, const char* role) {
  if (!j.is_object()) throw std::invalid_argument(std::string(role) + " must be an object");
  SpeakerMeta m;
  m.speaker_id = req_string(j, "speaker_id");
  auto party = j.find("party");
  if (party != j.end() && party->is_string()) m.party = party->get<std::string>();
  auto fod = j.find("first_office_date");
  if (fod != j.end() && !fod->is_null()) {
    if (!fod->is_string()) throw std::invalid_argument(std::string(role) + ".first_office_date must be a date");
    m.first_office_date = Date::parse(fod->get<std::string>());
    if (!m.first_office_date) throw std::invalid_argument(std::string(role) + ".first_office_date unparseable");
  }
  m.is_minister = opt_bool(j, "is_minister");
  m.is_shadow = opt_bool(j, "is_shadow");
  return m;
}

inline json speaker_json(const SpeakerMeta& m) {
  json j;
  j["speaker_id"] = m.speaker_id;
  j["party"] = m.party;
  j["first_office_date"] = m.first_office_date ? json(m.first_office_date->iso()) : json(nullptr);
  j["is_minister"] = m.is_minister ? json(*m.is_minister) : json(nullptr);
  j["is_shadow"] = m.is_shadow ? json(*m.is_shadow) : json(nullptr);
  return j;
}

struct SentenceKey {
  std::string pair_id;
  char side = 'q';
  int index = -1;
};

inline std::optional<SentenceKey> parse_sent_id(const std::string& id) {
  const auto last = id.rfind(':');
  if (last == std::string::npos || last < 2 || id[last - 2] != ':') return std::nullopt;
  const char side = id[last - 1];
  if (side != 'q' && side != 'a') return std::nullopt;
  SentenceKey k;
  k.side = side;
  if (!parse_int(std::string_view(id).substr(last + 1), k.index) || k.index < 0) return std::nullopt;
  k.pair_id = id.substr(0, last - 2);
  if (k.pair_id.empty()) return std::nullopt;
  return k;
}

}  // namespace detail

// Loads line-delimited JSON metadata and CoNLL-U parses aligned by sentence
// ids `<pair_id>:q:<i>` / `<pair_id>:a:<i>`. Records that fail validation go
// to `errors` and are left out of the corpus.
inline LoadResult load_corpus(std::istream& metadata, std::istream& parses, const Timeline& timeline = {}) {
  using detail::json;
  LoadResult result;

  struct Pending {
    QAPair pair;
    std::size_t line;
    std::map<int, ParsedSentence> q, a;
    bool bad_parse = false;
  };
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> by_id;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(metadata, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      result.errors.push_back({RecordErrorKind::kMalformedJson, "metadata", lineno, "", e.what()});
      continue;
    }
    QAPair p;
    try {
      if (!j.is_object()) throw std::invalid_argument("record is not an object");
      p.pair_id = detail::req_string(j, "pair_id");
      auto date = Date::parse(detail::req_string(j, "date"));
      if (!date) throw std::invalid_argument("unparseable date");
      p.date = *date;
      p.question_text = detail::req_string(j, "question_text");
      p.answer_text = detail::req_string(j, "answer_text");
      if (!j.contains("asker") || !j.contains("answerer")) throw std::invalid_argument("missing asker/answerer");
      p.asker = detail::parse_speaker(j.at("asker"), "asker");
      p.answerer = detail::parse_speaker(j.at("answerer"), "answerer");
      auto dep = j.find("department");
      if (dep != j.end() && dep->is_string()) p.department = dep->get<std::string>();
    } catch (const std::exception& e) {
      std::string id = j.is_object() && j.contains("pair_id") && j["pair_id"].is_string() ? j["pair_id"].get<std::string>() : "";
      result.errors.push_back({RecordErrorKind::kSchema, "metadata", lineno, id, e.what()});
      continue;
    }
    if (by_id.count(p.pair_id)) {
      result.errors.push_back({RecordErrorKind::kDuplicateId, "metadata", lineno, p.pair_id, "duplicate pair_id"});
      continue;
    }
    p.asker.affiliation = timeline.affiliation(p.asker.party, p.date);
    p.answerer.affiliation = timeline.affiliation(p.answerer.party, p.date);
    by_id.emplace(p.pair_id, pending.size());
    pending.push_back({std::move(p), lineno, {}, {}, false});
  }

  for (auto& block : read_conllu(parses)) {
    auto key = detail::parse_sent_id(block.sentence.sent_id);
    if (!key) {
      result.errors.push_back({RecordErrorKind::kMalformedParse, "parses", block.line, "",
                               "bad sent_id '" + block.sentence.sent_id + "'"});
      continue;
    }
    auto it = by_id.find(key->pair_id);
    if (it == by_id.end()) {
      result.errors.push_back({RecordErrorKind::kOrphanParse, "parses", block.line, key->pair_id,
                               "no metadata record for sentence " + block.sentence.sent_id});
      continue;
    }
    Pending& pd = pending[it->second];
    if (!block.error.empty()) {
      result.errors.push_back({RecordErrorKind::kMalformedParse, "parses", block.line, key->pair_id, block.error});
      pd.bad_parse = true;
      continue;
    }
    auto& side = key->side == 'q' ? pd.q : pd.a;
    if (!side.emplace(key->index, std::move(block.sentence)).second) {
      result.errors.push_back({RecordErrorKind::kMalformedParse, "parses", block.line, key->pair_id, "duplicate sent_id"});
      pd.bad_parse = true;
    }
  }

  std::vector<QAPair> good;
  good.reserve(pending.size());
  for (auto& pd : pending) {
    if (pd.bad_parse) continue;
    auto contiguous = [](const std::map<int, ParsedSentence>& m) {
      return !m.empty() && m.begin()->first == 0 && m.rbegin()->first == static_cast<int>(m.size()) - 1;
    };
    if (!contiguous(pd.q) || !contiguous(pd.a)) {
      result.errors.push_back({RecordErrorKind::kMissingParse, "metadata", pd.line, pd.pair.pair_id,
                               "question or answer sentences missing from parses"});
      continue;
    }
    for (auto& [i, s] : pd.q) pd.pair.question_sentences.push_back(std::move(s));
    for (auto& [i, s] : pd.a) pd.pair.answer_sentences.push_back(std::move(s));
    if (question_sentences_of(pd.pair).empty()) {
      result.errors.push_back({RecordErrorKind::kNoQuestion, "metadata", pd.line, pd.pair.pair_id,
                               "no question sentence ends with '?'"});
      continue;
    }
    good.push_back(std::move(pd.pair));
  }
  result.corpus = Corpus(std::move(good));
  return result;
}

inline LoadResult load_corpus(const std::string& metadata_path, const std::string& parses_path,
                              const Timeline& timeline = {}) {
  std::ifstream meta(metadata_path);
  if (!meta) throw Error(ErrorKind::kIo, "cannot open metadata file " + metadata_path);
  std::ifstream parses(parses_path);
  if (!parses) throw Error(ErrorKind::kIo, "cannot open parses file " + parses_path);
  return load_corpus(meta, parses, timeline);
}

// Canonical serialization in the input formats: one JSON object per line
// (keys sorted) and one CoNLL-U block per sentence, in corpus order.
inline void write_metadata(std::ostream& out, const Corpus& corpus) {
  using detail::json;
  for (const auto& p : corpus.pairs()) {
    json j;
    j["pair_id"] = p.pair_id;
    j["date"] = p.date.iso();
    j["question_text"] = p.question_text;
    j["answer_text"] = p.answer_text;
    j["asker"] = detail::speaker_json(p.asker);
    j["answerer"] = detail::speaker_json(p.answerer);
    j["department"] = p.department ? json(*p.department) : json(nullptr);
    out << j.dump() << '\n';
  }
}

inline void write_parses(std::ostream& out, const Corpus& corpus) {
  for (const auto& p : corpus.pairs()) {
    for (const auto& s : p.question_sentences) write_conllu(out, s);
    for (const auto& s : p.answer_sentences) write_conllu(out, s);
  }
}

struct FilterConfig {
  bool single_question_only = true;
  bool require_metadata = true;
  bool exclude_shadow = true;
};

struct FilterResult {
  Corpus corpus;
  std::size_t input = 0;
  std::size_t removed_multi_question = 0;
  std::size_t removed_missing_metadata = 0;
  std::size_t removed_shadow = 0;

  std::size_t retained() const { return corpus.size(); }
};

// Rules apply in order; each removed pair is charged to the first rule it
// fails, so the three removal counts plus the retained count equal the input.
inline FilterResult filter_analysis_subset(const Corpus& corpus, const FilterConfig& rules) {
  FilterResult r;
  r.input = corpus.size();
  std::vector<QAPair> kept;
  for (const auto& p : corpus.pairs()) {
    if (rules.single_question_only && question_sentences_of(p).size() != 1) {
      ++r.removed_multi_question;
      continue;
    }
    if (rules.require_metadata &&
        (!p.asker.affiliation || !p.answerer.affiliation || !p.asker.is_minister || !p.answerer.is_minister)) {
      ++r.removed_missing_metadata;
      continue;
    }
    if (rules.exclude_shadow && p.asker.is_shadow.value_or(true)) {
      ++r.removed_shadow;
      continue;
    }
    kept.push_back(p);
  }
  r.corpus = Corpus(std::move(kept));
  return r;
}

}  // namespace qtypology
