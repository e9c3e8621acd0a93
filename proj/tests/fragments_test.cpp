#include <gtest/gtest.h>

#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "qtypology/fragments.hpp"

using namespace qtypology;

namespace {

std::vector<std::string> frags(const ParsedSentence& s, const FragmentConfig& cfg = {}) {
  return extract_fragments(s, cfg).canonical_strings();
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Fragments, MinisterQuestionHasFiveFragments) {
  const auto s = qtest::minister_question();
  EXPECT_TRUE(s.is_question);
  EXPECT_EQ(frags(s), sorted({"what", "what is", "going→*", "is←going", "going→do"}));
}

TEST(Fragments, SingleWordQuestion) {
  auto s = qtest::sentence("Why/WRB/0/root");
  s.raw_text = "Why?";
  EXPECT_EQ(frags(s), sorted({"why", "why→*"}));
}

TEST(Fragments, NounPhraseAndPronounChildrenDropped) {
  // "He praised the budget ." : nsubj pronoun and dobj noun both go.
  const auto s = qtest::sentence("He/PRP/2/nsubj praised/VBD/0/root the/DT/4/det budget/NN/2/dobj ././2/punct");
  EXPECT_EQ(frags(s), sorted({"he", "he praised", "praised→*"}));
}

TEST(Fragments, PronounTagFiltersNonNpLabel) {
  const auto s = qtest::sentence("Tell/VB/0/root us/PRP/1/iobj-x now/RB/1/advmod");
  EXPECT_EQ(frags(s), sorted({"tell", "tell us", "tell→*", "tell→now"}));
}

TEST(Fragments, WhDeterminerKeepsArc) {
  // "Which policy does he support ?" : the dobj NP starts with WDT.
  const auto s = qtest::sentence(
      "Which/WDT/2/det policy/NN/5/dobj does/VBZ/5/aux he/PRP/5/nsubj support/VB/0/root ?/./5/punct");
  EXPECT_EQ(frags(s), sorted({"which", "which policy", "support→*", "which←support", "does←support"}));
}

TEST(Fragments, WhRuleRespectsConfiguredTags) {
  const auto s = qtest::sentence(
      "Which/WDT/2/det policy/NN/5/dobj does/VBZ/5/aux he/PRP/5/nsubj support/VB/0/root ?/./5/punct");
  FragmentConfig cfg;
  cfg.wdt_pos_tags.clear();
  EXPECT_EQ(frags(s, cfg), sorted({"which", "which policy", "support→*", "does←support"}));
}

TEST(Fragments, RecursesIntoClausalChildren) {
  // "What is his view , and what are they going to do ?"
  const auto s = qtest::sentence(
      "What/WP/2/attr is/VBZ/0/root his/PRP$/4/poss view/NN/2/nsubj ,/,/2/punct and/CC/2/cc what/WP/12/dobj "
      "are/VBP/10/aux they/PRP/10/nsubj going/VBG/2/conj to/TO/12/aux do/VB/10/xcomp ?/./2/punct");
  EXPECT_EQ(frags(s), sorted({"what", "what is", "is→*", "what←is", "is→and", "is→going", "going→*",
                              "are←going", "going→do"}));
}

TEST(Fragments, NoRecursionOutsideConfiguredLabels) {
  const auto s = qtest::sentence(
      "What/WP/2/attr is/VBZ/0/root his/PRP$/4/poss view/NN/2/nsubj ,/,/2/punct and/CC/2/cc what/WP/12/dobj "
      "are/VBP/10/aux they/PRP/10/nsubj going/VBG/2/conj to/TO/12/aux do/VB/10/xcomp ?/./2/punct");
  FragmentConfig cfg;
  cfg.recursion_dep_labels.clear();
  EXPECT_EQ(frags(s, cfg), sorted({"what", "what is", "is→*", "what←is", "is→and", "is→going"}));
}

TEST(Fragments, PunctuationArcsSkippedUnlessConfigured) {
  auto s = qtest::minister_question();
  FragmentConfig cfg;
  cfg.skip_dep_labels.clear();
  auto f = frags(s, cfg);
  EXPECT_NE(std::find(f.begin(), f.end(), "going→?"), f.end());
}

TEST(Fragments, LemmaOption) {
  auto s = qtest::minister_question();
  FragmentConfig cfg;
  cfg.use_lemma = true;
  EXPECT_EQ(frags(s, cfg), sorted({"what", "what is", "go→*", "be←go", "go→do"}));
}

TEST(Fragments, EmptySentenceRejected) {
  ParsedSentence s;
  EXPECT_THROW(extract_fragments(s, {}), Error);
}

TEST(Fragments, InvalidTreeRejected) {
  auto s = qtest::sentence("a/DT/2/det b/NN/1/dep");
  try {
    extract_fragments(s, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
}

TEST(Fragments, CanonicalStringsAreInjective) {
  // Words containing the reserved characters must not collide.
  std::set<std::string> seen;
  const std::vector<Fragment> fs{
      Fragment::unigram("a b"),        Fragment::bigram("a", "b"),          Fragment::root_only("x"),
      Fragment::unigram("x→*"),        Fragment::arc("a", "b", false),      Fragment::unigram("a→b"),
      Fragment::arc("b", "a", true),   Fragment::unigram("b←a"),            Fragment::arc("a\\", "b", false),
      Fragment::arc("a", "\\b", false), Fragment::bigram("a|b", "c"),      Fragment::bigram("a", "b|c"),
  };
  for (const auto& f : fs) EXPECT_TRUE(seen.insert(canonical_string(f)).second) << canonical_string(f);
}

TEST(Fragments, ConfigJsonRoundTrip) {
  FragmentConfig c;
  c.use_lemma = true;
  c.np_dep_labels.insert("obl");
  nlohmann::json j = c;
  EXPECT_EQ(j.get<FragmentConfig>(), c);
  EXPECT_EQ(nlohmann::json::object().get<FragmentConfig>(), FragmentConfig{});
}

TEST(Fragments, DeterministicAcrossCalls) {
  const auto s = qtest::minister_question();
  EXPECT_EQ(frags(s), frags(s));
}
