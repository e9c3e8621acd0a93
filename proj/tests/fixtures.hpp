#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "qtypology/conllu.hpp"
#include "qtypology/fragments.hpp"
#include "qtypology/rng.hpp"
#include "qtypology/synthetic.hpp"

namespace qtest {

using qtypology::ParsedSentence;

// "What is the minister going to do about the policy?"
inline const char* kMinisterQuestionConllu =
    "# sent_id = mq:q:0\n"
    "# text = What is the minister going to do about the policy?\n"
    "1\tWhat\twhat\tPRON\tWP\t_\t7\tdobj\t_\t_\n"
    "2\tis\tbe\tAUX\tVBZ\t_\t5\taux\t_\t_\n"
    "3\tthe\tthe\tDET\tDT\t_\t4\tdet\t_\t_\n"
    "4\tminister\tminister\tNOUN\tNN\t_\t5\tnsubj\t_\t_\n"
    "5\tgoing\tgo\tVERB\tVBG\t_\t0\troot\t_\t_\n"
    "6\tto\tto\tPART\tTO\t_\t7\taux\t_\t_\n"
    "7\tdo\tdo\tVERB\tVB\t_\t5\txcomp\t_\t_\n"
    "8\tabout\tabout\tADP\tIN\t_\t7\tprep\t_\t_\n"
    "9\tthe\tthe\tDET\tDT\t_\t10\tdet\t_\t_\n"
    "10\tpolicy\tpolicy\tNOUN\tNN\t_\t8\tpobj\t_\t_\n"
    "11\t?\t?\tPUNCT\t.\t_\t5\tpunct\t_\t_\n"
    "\n";

inline ParsedSentence parse_one(const std::string& conllu) {
  std::istringstream in(conllu);
  auto blocks = qtypology::read_conllu(in);
  if (blocks.size() != 1 || !blocks[0].error.empty()) throw std::runtime_error("bad fixture");
  return blocks[0].sentence;
}

inline ParsedSentence minister_question() { return parse_one(kMinisterQuestionConllu); }

// Sentence from the "form/TAG/head/label" template notation.
inline ParsedSentence sentence(const std::string& tmpl, const std::string& id = "s:q:0") {
  qtypology::Rng rng(1);
  return qtypology::detail::render(tmpl, {}, rng, id);
}

inline std::vector<std::string> fragments_of(const ParsedSentence& s) {
  return qtypology::extract_fragments(s, {}).canonical_strings();
}

// Questions built around the minister question; the counts keep the unwanted
// equivalences below p = 0.9.
inline std::vector<std::vector<std::string>> minister_question_corpus() {
  std::vector<std::vector<std::string>> tx;
  auto add = [&](const std::string& tmpl, int times) {
    const auto f = fragments_of(qtest::sentence(tmpl));
    for (int i = 0; i < times; ++i) tx.push_back(f);
  };
  add("What/WP/7/dobj is/VBZ/5/aux the/DT/4/det minister/NN/5/nsubj going/VBG/0/root to/TO/7/aux do/VB/5/xcomp "
      "about/IN/7/prep it/PRP/8/pobj ?/./5/punct",
      20);
  add("What/WP/6/dobj exactly/RB/5/advmod is/VBZ/5/aux he/PRP/5/nsubj going/VBG/0/root to/TO/7/aux do/VB/5/xcomp ?/./5/punct",
      3);
  add("When/WRB/5/advmod is/VBZ/5/aux he/PRP/5/nsubj going/VBG/0/root to/TO/6/aux do/VB/4/xcomp it/PRP/6/dobj ?/./4/punct", 5);
  add("What/WP/7/dobj is/VBZ/5/aux the/DT/4/det minister/NN/5/nsubj going/VBG/0/root to/TO/7/aux say/VB/5/xcomp ?/./5/punct",
      5);
  add("What/WP/2/attr is/VBZ/0/root the/DT/4/det point/NN/2/nsubj ?/./2/punct", 5);
  add("What/WP/6/dobj are/VBP/4/aux they/PRP/4/nsubj going/VBG/0/root to/TO/6/aux do/VB/4/xcomp ?/./4/punct", 5);
  add("What/WP/2/attr is/VBZ/0/root the/DT/4/det plan/NN/2/nsubj and/CC/2/cc are/VBP/8/aux they/PRP/8/nsubj "
      "going/VBG/2/conj to/TO/10/aux do/VB/8/xcomp it/PRP/10/dobj ?/./2/punct",
      3);
  return tx;
}

}  // namespace qtest
