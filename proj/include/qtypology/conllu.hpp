#pragma once

#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qtypology/error.hpp"

namespace qtypology {

struct Token {
  int index = 0;  // 1-based
  std::string surface;
  std::string lemma;
  std::string upos;
  std::string xpos;
  int head = 0;  // 0 for the root
  std::string dep_label;

  // Penn-style XPOS when the parser filled it, UPOS otherwise.
  const std::string& pos_tag() const { return xpos.empty() || xpos == "_" ? upos : xpos; }

  friend bool operator==(const Token&, const Token&) = default;
};

struct ParsedSentence {
  std::string sent_id;
  std::vector<Token> tokens;
  bool is_question = false;
  std::string raw_text;

  std::size_t size() const { return tokens.size(); }
  const Token& token(int index) const { return tokens[static_cast<std::size_t>(index - 1)]; }

  friend bool operator==(const ParsedSentence&, const ParsedSentence&) = default;
};

// A sentence counts as a question iff its text ends with '?' (trailing
// whitespace ignored).
inline bool ends_with_question_mark(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  return !text.empty() && text.back() == '?';
}

// Checks the tree invariants: heads in range, no self-loops, exactly one
// root, every token reaches the root. Returns an empty string when valid.
inline std::string validate_tree(const ParsedSentence& s) {
  const int n = static_cast<int>(s.tokens.size());
  if (n == 0) return "sentence has no tokens";
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    const Token& t = s.tokens[static_cast<std::size_t>(i)];
    if (t.index != i + 1) return "token ids are not consecutive from 1";
    if (t.head < 0 || t.head > n) return "head out of range at token " + std::to_string(t.index);
    if (t.head == t.index) return "self-loop at token " + std::to_string(t.index);
    if (t.head == 0) ++roots;
  }
  if (roots != 1) return "expected exactly one root, found " + std::to_string(roots);
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    for (int steps = 0; cur != 0; ++steps) {
      if (steps > n) return "cycle through token " + std::to_string(i);
      cur = s.token(cur).head;
    }
  }
  return {};
}

struct ConlluBlock {
  std::size_t line = 0;  // line of the first line of the block
  ParsedSentence sentence;
  std::string error;  // non-empty when the block is malformed
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

inline bool parse_int(std::string_view s, int& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace detail

// Reads every sentence block. Multiword-token ranges (1-2) and empty nodes
// (1.1) are skipped; FEATS, DEPS and MISC are ignored. Malformed blocks are
// returned with `error` set so the caller can report them with line numbers.
inline std::vector<ConlluBlock> read_conllu(std::istream& in) {
  std::vector<ConlluBlock> blocks;
  ConlluBlock cur;
  bool open = false;
  bool has_text = false;
  std::string line;
  std::size_t lineno = 0;

  auto finish = [&] {
    if (!open) return;
    ParsedSentence& s = cur.sentence;
    if (!has_text) {
      for (const auto& t : s.tokens) {
        if (!s.raw_text.empty()) s.raw_text += ' ';
        s.raw_text += t.surface;
      }
    }
    s.is_question = ends_with_question_mark(s.raw_text);
    if (cur.error.empty() && s.sent_id.empty()) cur.error = "block without sent_id";
    if (cur.error.empty()) cur.error = validate_tree(s);
    blocks.push_back(std::move(cur));
    cur = ConlluBlock{};
    open = false;
    has_text = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) {
      finish();
      continue;
    }
    if (!open) {
      open = true;
      cur.line = lineno;
    }
    if (line[0] == '#') {
      std::string_view body = detail::trim(std::string_view(line).substr(1));
      auto eq = body.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = detail::trim(body.substr(0, eq));
      const auto val = detail::trim(body.substr(eq + 1));
      if (key == "sent_id") cur.sentence.sent_id = std::string(val);
      if (key == "text") {
        cur.sentence.raw_text = std::string(val);
        has_text = true;
      }
      continue;
    }
    const auto cols = detail::split_tabs(line);
    if (cols.size() != 10) {
      if (cur.error.empty()) cur.error = "line " + std::to_string(lineno) + ": expected 10 columns";
      continue;
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    Token t;
    if (!detail::parse_int(cols[0], t.index) || !detail::parse_int(cols[6], t.head)) {
      if (cur.error.empty()) cur.error = "line " + std::to_string(lineno) + ": bad ID or HEAD";
      continue;
    }
    t.surface = std::string(cols[1]);
    t.lemma = std::string(cols[2]);
    t.upos = std::string(cols[3]);
    t.xpos = std::string(cols[4]);
    t.dep_label = std::string(cols[7]);
    cur.sentence.tokens.push_back(std::move(t));
  }
  finish();
  return blocks;
}

inline void write_conllu(std::ostream& out, const ParsedSentence& s) {
  out << "# sent_id = " << s.sent_id << '\n';
  out << "# text = " << s.raw_text << '\n';
  for (const auto& t : s.tokens) {
    out << t.index << '\t' << t.surface << '\t' << (t.lemma.empty() ? "_" : t.lemma) << '\t'
        << (t.upos.empty() ? "_" : t.upos) << '\t' << (t.xpos.empty() ? "_" : t.xpos) << "\t_\t"
        << t.head << '\t' << t.dep_label << "\t_\t_\n";
  }
  out << '\n';
}

}  // namespace qtypology
