#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qtypology/conllu.hpp"
#include "qtypology/error.hpp"

namespace qtypology {

enum class FragmentKind { kInitialUnigram, kInitialBigram, kRootOnly, kRootArc };

// A lexico-syntactic unit of a sentence: its root, a (root, child) arc, or
// the sentence's first one or two words. All text is lowercased.
struct Fragment {
  FragmentKind kind = FragmentKind::kRootOnly;
  std::string root;   // empty for initial n-grams
  std::string child;  // root arcs only
  bool child_precedes_root = false;
  std::vector<std::string> words;  // initial n-grams only

  static Fragment unigram(std::string w) { return {FragmentKind::kInitialUnigram, {}, {}, false, {std::move(w)}}; }
  static Fragment bigram(std::string a, std::string b) {
    return {FragmentKind::kInitialBigram, {}, {}, false, {std::move(a), std::move(b)}};
  }
  static Fragment root_only(std::string r) { return {FragmentKind::kRootOnly, std::move(r), {}, false, {}}; }
  static Fragment arc(std::string r, std::string c, bool child_first) {
    return {FragmentKind::kRootArc, std::move(r), std::move(c), child_first, {}};
  }

  friend auto operator<=>(const Fragment&, const Fragment&) = default;
};

namespace detail {

inline bool needs_escape(char c) { return c == '\\' || c == '*' || c == '|' || c == ' ' || c == '\t' || c == '\n'; }

inline void append_escaped(std::string& out, std::string_view w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    // The arrows are three-byte UTF-8 sequences E2 86 92 / E2 86 90.
    if (w.compare(i, 3, "\xE2\x86\x92") == 0 || w.compare(i, 3, "\xE2\x86\x90") == 0) {
      out += '\\';
      out.append(w.substr(i, 3));
      i += 2;
      continue;
    }
    if (needs_escape(w[i])) out += '\\';
    out += w[i];
  }
}

}  // namespace detail

inline constexpr std::string_view kRightArrow = "\xE2\x86\x92";  // →
inline constexpr std::string_view kLeftArrow = "\xE2\x86\x90";   // ←

// `what`, `what is`, `going→*`, `is←going` (child first), `going→do`.
// Reserved characters inside words are backslash-escaped, which keeps the
// rendering injective.
inline std::string canonical_string(const Fragment& f) {
  std::string s;
  switch (f.kind) {
    case FragmentKind::kInitialUnigram:
    case FragmentKind::kInitialBigram:
      for (std::size_t i = 0; i < f.words.size(); ++i) {
        if (i) s += ' ';
        detail::append_escaped(s, f.words[i]);
      }
      break;
    case FragmentKind::kRootOnly:
      detail::append_escaped(s, f.root);
      s += kRightArrow;
      s += '*';
      break;
    case FragmentKind::kRootArc:
      if (f.child_precedes_root) {
        detail::append_escaped(s, f.child);
        s += kLeftArrow;
        detail::append_escaped(s, f.root);
      } else {
        detail::append_escaped(s, f.root);
        s += kRightArrow;
        detail::append_escaped(s, f.child);
      }
      break;
  }
  return s;
}

struct FragmentConfig {
  std::set<std::string> np_dep_labels{"nsubj", "nsubjpass", "dobj", "iobj", "pobj", "attr"};
  std::set<std::string> pronoun_pos_tags{"PRP", "PRP$", "WP", "WP$"};
  std::set<std::string> wdt_pos_tags{"WDT", "WP"};
  std::set<std::string> recursion_dep_labels{"conj", "parataxis", "ccomp", "advcl"};
  std::set<std::string> skip_dep_labels{"punct"};
  bool use_lemma = false;

  friend bool operator==(const FragmentConfig&, const FragmentConfig&) = default;
};

inline void to_json(nlohmann::json& j, const FragmentConfig& c) {
  j = nlohmann::json{{"np_dep_labels", c.np_dep_labels},
                     {"pronoun_pos_tags", c.pronoun_pos_tags},
                     {"wdt_pos_tags", c.wdt_pos_tags},
                     {"recursion_dep_labels", c.recursion_dep_labels},
                     {"skip_dep_labels", c.skip_dep_labels},
                     {"use_lemma", c.use_lemma}};
}

// Missing keys keep their defaults.
inline void from_json(const nlohmann::json& j, FragmentConfig& c) {
  auto set_if = [&](const char* key, std::set<std::string>& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::set<std::string>>();
  };
  set_if("np_dep_labels", c.np_dep_labels);
  set_if("pronoun_pos_tags", c.pronoun_pos_tags);
  set_if("wdt_pos_tags", c.wdt_pos_tags);
  set_if("recursion_dep_labels", c.recursion_dep_labels);
  set_if("skip_dep_labels", c.skip_dep_labels);
  if (j.contains("use_lemma")) c.use_lemma = j.at("use_lemma").get<bool>();
}

struct FragmentSet {
  std::string owner_id;
  std::set<Fragment> fragments;

  std::vector<std::string> canonical_strings() const {
    std::vector<std::string> out;
    out.reserve(fragments.size());
    for (const auto& f : fragments) out.push_back(canonical_string(f));
    std::sort(out.begin(), out.end());
    return out;
  }
};

inline std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_filtered_child(const Token& /*root*/, const Token& child, const ParsedSentence& /*sentence*/,
                              const FragmentConfig& cfg) {
  return cfg.np_dep_labels.count(child.dep_label) > 0 || cfg.pronoun_pos_tags.count(child.pos_tag()) > 0;
}

namespace detail {

class FragmentExtractor {
 public:
  FragmentExtractor(const ParsedSentence& s, const FragmentConfig& cfg) : s_(s), cfg_(cfg), children_(s.size() + 1) {
    for (const auto& t : s.tokens) children_[static_cast<std::size_t>(t.head)].push_back(t.index);
  }

  std::set<Fragment> run() {
    out_.emplace(Fragment::unigram(lowercase(s_.tokens[0].surface)));
    if (s_.size() >= 2) out_.emplace(Fragment::bigram(lowercase(s_.tokens[0].surface), lowercase(s_.tokens[1].surface)));
    from_root(children_[0].front(), 0);
    return std::move(out_);
  }

 private:
  std::string word(const Token& t) const {
    if (cfg_.use_lemma && !t.lemma.empty() && t.lemma != "_") return lowercase(t.lemma);
    return lowercase(t.surface);
  }

  int subtree_first(int idx) const {
    int first = idx;
    for (int c : children_[static_cast<std::size_t>(idx)]) first = std::min(first, subtree_first(c));
    return first;
  }

  void from_root(int root_idx, int depth) {
    const Token& root = s_.token(root_idx);
    const std::string r = word(root);
    out_.emplace(Fragment::root_only(r));
    if (depth > static_cast<int>(s_.size())) return;
    for (int ci : children_[static_cast<std::size_t>(root_idx)]) {
      const Token& child = s_.token(ci);
      if (cfg_.skip_dep_labels.count(child.dep_label)) continue;
      if (is_filtered_child(root, child, s_, cfg_)) {
        if (cfg_.np_dep_labels.count(child.dep_label)) {
          const Token& first = s_.token(subtree_first(ci));
          if (cfg_.wdt_pos_tags.count(first.pos_tag()))
            out_.emplace(Fragment::arc(r, word(first), first.index < root.index));
        }
        continue;
      }
      out_.emplace(Fragment::arc(r, word(child), child.index < root.index));
      if (cfg_.recursion_dep_labels.count(child.dep_label)) from_root(ci, depth + 1);
    }
  }

  const ParsedSentence& s_;
  const FragmentConfig& cfg_;
  std::vector<std::vector<int>> children_;
  std::set<Fragment> out_;
};

}  // namespace detail

// Fragments of one parsed sentence: the root, its surviving (root, child)
// arcs, the initial unigram and bigram, plus the same recursively for
// clausal children listed in `recursion_dep_labels`. Children attached by an
// NP label or tagged as pronouns are dropped; an NP whose subtree starts with
// a wh-determiner contributes the (root, wh-word) arc instead.
inline FragmentSet extract_fragments(const ParsedSentence& sentence, const FragmentConfig& cfg) {
  if (sentence.tokens.empty()) throw Error(ErrorKind::kInvalidInput, "cannot extract fragments from an empty sentence");
  if (auto problem = validate_tree(sentence); !problem.empty())
    throw Error(ErrorKind::kInvalidInput, "sentence " + sentence.sent_id + ": " + problem);
  FragmentSet fs;
  fs.owner_id = sentence.sent_id;
  fs.fragments = detail::FragmentExtractor(sentence, cfg).run();
  return fs;
}

}  // namespace qtypology
