#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtypology/conllu.hpp"
#include "qtypology/corpus.hpp"
#include "qtypology/date.hpp"
#include "qtypology/rng.hpp"

namespace qtypology {

// Planted corpus: three question phrasing families, each answered from its
// own vocabulary, asked by two alternating governing parties (plus a minor
// one). Government askers lean to family 0, opposition askers to family 1.
struct SyntheticCorpus {
  Corpus corpus;
  std::map<std::string, int> family;  // pair_id -> planted family
  std::vector<GovernmentPeriod> timeline;
  std::vector<Date> elections;
};

struct SyntheticOptions {
  std::size_t pairs = 500;
  std::uint64_t seed = 7;
};

namespace detail {

using Slots = std::map<std::string, std::vector<std::string>>;

// Template tokens are "form/TAG/head/label"; a form {X} draws from slot X.
inline ParsedSentence render(const std::string& tmpl, const Slots& slots, Rng& rng, const std::string& sent_id) {
  ParsedSentence s;
  s.sent_id = sent_id;
  std::istringstream in(tmpl);
  std::string item;
  int index = 0;
  while (in >> item) {
    const auto a = item.find('/');
    const auto b = item.find('/', a + 1);
    const auto c = item.find('/', b + 1);
    Token t;
    t.index = ++index;
    t.surface = item.substr(0, a);
    if (t.surface.size() > 2 && t.surface.front() == '{') {
      const auto& choices = slots.at(t.surface.substr(1, t.surface.size() - 2));
      t.surface = choices[rng.below(choices.size())];
    }
    t.xpos = item.substr(a + 1, b - a - 1);
    t.upos = "_";
    t.lemma = "_";
    t.head = std::stoi(item.substr(b + 1, c - b - 1));
    t.dep_label = item.substr(c + 1);
    const bool punct = t.dep_label == "punct";
    if (!s.raw_text.empty() && !punct) s.raw_text += ' ';
    s.raw_text += t.surface;
    s.tokens.push_back(std::move(t));
  }
  s.is_question = ends_with_question_mark(s.raw_text);
  return s;
}

inline const std::vector<std::vector<std::string>>& question_templates() {
  static const std::vector<std::vector<std::string>> t{
      {
          "Does/VBZ/4/aux the/DT/3/det {MIN}/NN/4/nsubj agree/VB/0/root that/IN/7/mark {N}/NN/7/nsubj is/VBZ/4/ccomp "
          "{ADJ}/JJ/7/acomp ?/./4/punct",
          "Does/VBZ/5/aux my/PRP$/4/poss right/JJ/4/amod friend/NN/5/nsubj agree/VB/0/root with/IN/5/prep the/DT/8/det "
          "{N}/NN/6/pobj ?/./5/punct",
          "Would/MD/4/aux the/DT/3/det {MIN}/NN/4/nsubj agree/VB/0/root that/IN/7/mark {N}/NN/7/nsubj is/VBZ/4/ccomp "
          "{ADJ}/JJ/7/acomp ?/./4/punct",
      },
      {
          "What/WP/7/dobj is/VBZ/5/aux the/DT/4/det {MIN}/NN/5/nsubj going/VBG/0/root to/TO/7/aux do/VB/5/xcomp "
          "about/IN/7/prep the/DT/10/det {N}/NN/8/pobj ?/./5/punct",
          "What/WDT/2/det steps/NNS/6/dobj is/VBZ/6/aux the/DT/5/det {MIN}/NN/6/nsubj taking/VBG/0/root to/TO/8/aux "
          "{V}/VB/6/xcomp the/DT/10/det {N}/NN/8/dobj ?/./6/punct",
          "What/WP/5/dobj is/VBZ/5/aux the/DT/4/det government/NN/5/nsubj doing/VBG/0/root about/IN/5/prep "
          "{N}/NN/6/pobj ?/./5/punct",
      },
      {
          "Will/MD/4/aux the/DT/3/det {MIN}/NN/4/nsubj confirm/VB/0/root that/IN/9/mark the/DT/7/det {N}/NN/9/nsubj "
          "will/MD/9/aux {V2}/VB/4/ccomp ?/./4/punct",
          "Can/MD/4/aux the/DT/3/det {MIN}/NN/4/nsubj confirm/VB/0/root when/WRB/9/advmod the/DT/7/det {N}/NN/9/nsubj "
          "will/MD/9/aux {V2}/VB/4/ccomp ?/./4/punct",
          "Will/MD/3/aux he/PRP/3/nsubj tell/VB/0/root the/DT/5/det House/NN/3/dobj whether/IN/10/mark the/DT/8/det "
          "{N}/NN/10/nsubj will/MD/10/aux {V2}/VB/3/ccomp ?/./3/punct",
      },
  };
  return t;
}

inline const std::vector<std::string>& answer_templates() {
  static const std::vector<std::string> t{
      "{OPEN}/RB/3/advmod I/PRP/3/nsubj {VERB}/VBP/0/root {ADV}/RB/3/advmod ././3/punct",
      "We/PRP/2/nsubj {VERB}/VBP/0/root {ADV}/RB/2/advmod ././2/punct",
  };
  return t;
}

inline const std::vector<Slots>& answer_vocab() {
  static const std::vector<Slots> v{
      {{"OPEN", {"Indeed", "Certainly", "Yes", "Naturally"}},
       {"VERB", {"agree", "concur", "welcome", "endorse"}},
       {"ADV", {"wholeheartedly", "entirely", "absolutely", "warmly"}}},
      {{"OPEN", {"Currently", "Presently", "Already", "Shortly"}},
       {"VERB", {"invest", "allocate", "spend", "deliver"}},
       {"ADV", {"substantially", "heavily", "nationally", "steadily"}}},
      {{"OPEN", {"Frankly", "Unfortunately", "Regrettably", "Sadly"}},
       {"VERB", {"disclose", "reveal", "announce", "speculate"}},
       {"ADV", {"yet", "today", "publicly", "prematurely"}}},
  };
  return v;
}

inline const Slots& question_slots() {
  static const Slots s{
      {"MIN", {"Minister", "Secretary", "Chancellor"}},
      {"N", {"school", "hospital", "railway", "budget", "pension", "housing", "prison", "army"}},
      {"ADJ", {"important", "unacceptable", "welcome", "urgent"}},
      {"V", {"reduce", "improve", "protect", "fund"}},
      {"V2", {"close", "expand", "continue", "reopen"}},
  };
  return s;
}

}  // namespace detail

inline SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& opt = {}) {
  using detail::render;
  SyntheticCorpus out;
  const Date start{2000, 1, 1}, election{2005, 5, 5}, end{2010, 1, 1};
  out.timeline = {{start, election, "Red", "Blue", "first"}, {election, end, "Blue", "Red", "second"}};
  out.elections = {election};
  const Timeline timeline(out.timeline);
  Rng rng(opt.seed);

  std::vector<SpeakerMeta> askers, ministers;
  auto member = [&](const std::string& id, const std::string& party, Date first) {
    SpeakerMeta m;
    m.speaker_id = id;
    m.party = party;
    m.first_office_date = first;
    m.is_minister = false;
    m.is_shadow = false;
    return m;
  };
  int serial = 0;
  for (const char* party : {"Red", "Blue"}) {
    for (int i = 0; i < 24; ++i) {
      const Date first = Date{1980, 1, 1}.plus_days(static_cast<long>(rng.below(7000)));
      askers.push_back(member("mp" + std::to_string(++serial), party, first));
    }
    for (int i = 0; i < 8; ++i)
      askers.push_back(member("mp" + std::to_string(++serial), party, election.plus_days(static_cast<long>(rng.below(30)))));
    for (int i = 0; i < 6; ++i) {
      auto m = member("min" + std::string(party) + std::to_string(i), party, Date{1985, 6, 1});
      m.is_minister = true;
      ministers.push_back(std::move(m));
    }
  }
  for (int i = 0; i < 4; ++i) askers.push_back(member("mp" + std::to_string(++serial), "Green", Date{1995, 3, 1}));
  askers[3].is_shadow = true;
  askers[30].is_shadow = true;
  askers[5].is_minister.reset();
  askers[40].first_office_date.reset();

  const auto& qt = detail::question_templates();
  const auto& at = detail::answer_templates();
  const double lean[3][3] = {{0.6, 0.2, 0.2}, {0.15, 0.55, 0.3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  const std::vector<std::string> departments{"Health", "Education", "Transport"};
  const long span = end.serial() - start.serial();

  std::vector<QAPair> pairs;
  for (std::size_t i = 0; i < opt.pairs; ++i) {
    QAPair p;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04zu", i + 1);
    p.pair_id = id;
    p.date = start.plus_days(static_cast<long>(rng.below(static_cast<std::uint64_t>(span))));
    std::vector<const SpeakerMeta*> eligible;
    for (const auto& a : askers)
      if (!a.first_office_date || *a.first_office_date <= p.date) eligible.push_back(&a);
    p.asker = *eligible[rng.below(eligible.size())];
    p.asker.affiliation = timeline.affiliation(p.asker.party, p.date);
    const auto* gov = timeline.period_at(p.date);
    std::vector<const SpeakerMeta*> answering;
    for (const auto& m : ministers)
      if (m.party == gov->governing_party) answering.push_back(&m);
    p.answerer = *answering[rng.below(answering.size())];
    p.answerer.affiliation = timeline.affiliation(p.answerer.party, p.date);
    p.department = departments[rng.below(departments.size())];

    const int row = p.asker.affiliation == Affiliation::kGovernment ? 0
                    : p.asker.affiliation == Affiliation::kOpposition ? 1
                                                                      : 2;
    const double u = rng.uniform();
    const int fam = u < lean[row][0] ? 0 : u < lean[row][0] + lean[row][1] ? 1 : 2;
    out.family.emplace(p.pair_id, fam);

    auto qid = [&] { return p.pair_id + ":q:" + std::to_string(p.question_sentences.size()); };
    if (rng.uniform() < 0.15)
      p.question_sentences.push_back(render("The/DT/2/det {N}/NN/3/nsubj matters/VBZ/0/root ././3/punct",
                                            detail::question_slots(), rng, qid()));
    const auto& fam_templates = qt[static_cast<std::size_t>(fam)];
    p.question_sentences.push_back(render(fam_templates[rng.below(fam_templates.size())], detail::question_slots(), rng, qid()));
    if (rng.uniform() < 0.08)
      p.question_sentences.push_back(render(fam_templates[rng.below(fam_templates.size())], detail::question_slots(), rng, qid()));

    auto aid = [&] { return p.pair_id + ":a:" + std::to_string(p.answer_sentences.size()); };
    if (rng.uniform() < 0.3)
      p.answer_sentences.push_back(render("I/PRP/2/nsubj thank/VBP/0/root the/DT/5/det hon./JJ/5/amod member/NN/2/dobj ././2/punct",
                                          {}, rng, aid()));
    const auto& vocab = detail::answer_vocab()[static_cast<std::size_t>(fam)];
    const std::size_t n_answer = 2 + rng.below(2);
    for (std::size_t s = 0; s < n_answer; ++s) p.answer_sentences.push_back(render(at[rng.below(at.size())], vocab, rng, aid()));

    for (const auto& s : p.question_sentences) p.question_text += (p.question_text.empty() ? "" : " ") + s.raw_text;
    for (const auto& s : p.answer_sentences) p.answer_text += (p.answer_text.empty() ? "" : " ") + s.raw_text;
    pairs.push_back(std::move(p));
  }
  out.corpus = Corpus(std::move(pairs));
  return out;
}

// Pipeline config for the synthetic corpus with files beside it.
inline nlohmann::json synthetic_config(const SyntheticCorpus& s, std::uint64_t seed = 1) {
  nlohmann::json tl = nlohmann::json::array();
  for (const auto& g : s.timeline)
    tl.push_back({{"start", g.start.iso()},
                  {"end", g.end.iso()},
                  {"governing_party", g.governing_party},
                  {"opposition_party", g.opposition_party},
                  {"label", g.label}});
  nlohmann::json el = nlohmann::json::array();
  for (const auto& e : s.elections) el.push_back(e.iso());
  return {{"paths", {{"metadata", "metadata.jsonl"}, {"parses", "parses.conllu"}, {"workdir", "work"}}},
          {"parameters",
           {{"n", 20}, {"p", 0.9}, {"n_A", 10}, {"d", 8}, {"k", 3}, {"seed", seed}, {"max_size", 4}, {"restarts", 10}}},
          {"timeline", tl},
          {"elections", el},
          {"analysis", {{"min_questions_switch", 3}, {"new_mp_window_days", 60}}}};
}

}  // namespace qtypology
