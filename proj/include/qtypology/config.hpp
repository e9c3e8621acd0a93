#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qtypology/corpus.hpp"
#include "qtypology/date.hpp"
#include "qtypology/error.hpp"
#include "qtypology/fragments.hpp"
#include "qtypology/stats.hpp"
#include "qtypology/typology.hpp"

namespace qtypology {

struct AnalysisConfig {
  std::size_t min_questions_switch = 5;
  int new_mp_window_days = 60;
  ZeroMethod zero_method = ZeroMethod::kWilcoxon;
};

struct PipelineConfig {
  std::string metadata_path;
  std::string parses_path;
  std::string workdir = "work";
  ModelParams params;
  int max_iterations = 300;
  double tolerance = 1e-6;
  bool smooth_idf = false;
  FragmentConfig fragments;
  FilterConfig filters;
  std::vector<GovernmentPeriod> timeline;
  std::vector<Date> elections;
  AnalysisConfig analysis;
};

namespace detail {

inline Date req_date(const nlohmann::json& j, const std::string& what) {
  if (!j.is_string()) throw Error(ErrorKind::kValidation, what + " must be an ISO date string");
  auto d = Date::parse(j.get<std::string>());
  if (!d) throw Error(ErrorKind::kValidation, what + " is not a valid date: " + j.get<std::string>());
  return *d;
}

// Counts arrive as signed JSON numbers; negatives are rejected here rather
// than wrapping around.
inline void get_count(const nlohmann::json& j, const char* key, std::size_t& dst) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<long long>();
  if (v < 1) throw Error(ErrorKind::kValidation, std::string(key) + " must be >= 1");
  dst = static_cast<std::size_t>(v);
}

template <class T>
void get_if(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace detail

// Range checks on every parameter; runs before any stage does work.
inline void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kValidation, m); };
  const auto& p = c.params;
  if (p.n < 1) fail("n must be >= 1");
  if (!(p.p > 0.5 && p.p <= 1.0)) fail("p must satisfy 0.5 < p <= 1");
  if (p.n_A < 1) fail("n_A must be >= 1");
  if (p.d < 1) fail("d must be >= 1");
  if (p.k < 2) fail("k must be >= 2");
  if (p.max_size < 1) fail("max_size must be >= 1");
  if (p.restarts < 1) fail("restarts must be >= 1");
  if (c.max_iterations < 1) fail("max_iterations must be >= 1");
  if (!(c.tolerance >= 0.0)) fail("tolerance must be >= 0");
  if (c.analysis.new_mp_window_days < 1) fail("new_mp_window_days must be >= 1");
  if (c.metadata_path.empty() || c.parses_path.empty()) fail("paths.metadata and paths.parses are required");
  for (std::size_t i = 0; i < c.timeline.size(); ++i) {
    const auto& g = c.timeline[i];
    if (!(g.start < g.end)) fail("timeline period " + std::to_string(i) + " has start >= end");
    if (g.governing_party.empty()) fail("timeline period " + std::to_string(i) + " lacks governing_party");
  }
  auto sorted = c.timeline;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].start < sorted[i - 1].end) fail("timeline periods overlap");
}

// Relative paths resolve against `base` (the config file's directory).
inline PipelineConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  PipelineConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorKind::kValidation, "config must be a JSON object");
    auto resolve = [&](const std::string& s) {
      std::filesystem::path p(s);
      return (p.is_relative() && !base.empty() ? base / p : p).lexically_normal().string();
    };
    if (j.contains("paths")) {
      const auto& pj = j.at("paths");
      if (pj.contains("metadata")) c.metadata_path = resolve(pj.at("metadata").get<std::string>());
      if (pj.contains("parses")) c.parses_path = resolve(pj.at("parses").get<std::string>());
      if (pj.contains("workdir")) c.workdir = pj.at("workdir").get<std::string>();
    }
    c.workdir = resolve(c.workdir);
    if (j.contains("parameters")) {
      const auto& pj = j.at("parameters");
      for (auto it = pj.begin(); it != pj.end(); ++it) {
        static const std::set<std::string> known{"n",        "p",         "n_A",       "d",         "k",
                                                 "seed",     "max_size",  "restarts",  "max_iterations",
                                                 "tolerance", "smooth_idf"};
        if (!known.count(it.key())) throw Error(ErrorKind::kValidation, "unknown parameter " + it.key());
      }
      detail::get_count(pj, "n", c.params.n);
      detail::get_if(pj, "p", c.params.p);
      detail::get_count(pj, "n_A", c.params.n_A);
      detail::get_if(pj, "d", c.params.d);
      detail::get_if(pj, "k", c.params.k);
      detail::get_if(pj, "seed", c.params.seed);
      detail::get_count(pj, "max_size", c.params.max_size);
      detail::get_if(pj, "restarts", c.params.restarts);
      detail::get_if(pj, "max_iterations", c.max_iterations);
      detail::get_if(pj, "tolerance", c.tolerance);
      detail::get_if(pj, "smooth_idf", c.smooth_idf);
    }
    if (j.contains("fragments")) c.fragments = j.at("fragments").get<FragmentConfig>();
    if (j.contains("filters")) {
      const auto& fj = j.at("filters");
      detail::get_if(fj, "single_question_only", c.filters.single_question_only);
      detail::get_if(fj, "require_metadata", c.filters.require_metadata);
      detail::get_if(fj, "exclude_shadow", c.filters.exclude_shadow);
    }
    if (j.contains("timeline")) {
      for (const auto& pj : j.at("timeline")) {
        GovernmentPeriod g;
        g.start = detail::req_date(pj.at("start"), "timeline start");
        g.end = detail::req_date(pj.at("end"), "timeline end");
        g.governing_party = pj.at("governing_party").get<std::string>();
        detail::get_if(pj, "opposition_party", g.opposition_party);
        detail::get_if(pj, "label", g.label);
        c.timeline.push_back(std::move(g));
      }
    }
    if (j.contains("elections"))
      for (const auto& e : j.at("elections")) c.elections.push_back(detail::req_date(e, "election date"));
    if (j.contains("analysis")) {
      const auto& aj = j.at("analysis");
      detail::get_count(aj, "min_questions_switch", c.analysis.min_questions_switch);
      detail::get_if(aj, "new_mp_window_days", c.analysis.new_mp_window_days);
      if (aj.contains("zero_method")) {
        const auto z = aj.at("zero_method").get<std::string>();
        if (z == "wilcox") {
          c.analysis.zero_method = ZeroMethod::kWilcoxon;
        } else if (z == "pratt") {
          c.analysis.zero_method = ZeroMethod::kPratt;
        } else {
          throw Error(ErrorKind::kValidation, "zero_method must be wilcox or pratt");
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kValidation, "config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).parent_path());
}

// Everything that influences stage outputs, for manifests.
inline nlohmann::json config_json(const PipelineConfig& c) {
  nlohmann::json tl = nlohmann::json::array();
  for (const auto& g : c.timeline)
    tl.push_back({{"start", g.start.iso()},
                  {"end", g.end.iso()},
                  {"governing_party", g.governing_party},
                  {"opposition_party", g.opposition_party},
                  {"label", g.label}});
  nlohmann::json el = nlohmann::json::array();
  for (const auto& e : c.elections) el.push_back(e.iso());
  nlohmann::json params = c.params;
  params["max_iterations"] = c.max_iterations;
  params["tolerance"] = c.tolerance;
  params["smooth_idf"] = c.smooth_idf;
  return {{"parameters", params},
          {"fragments", c.fragments},
          {"filters",
           {{"single_question_only", c.filters.single_question_only},
            {"require_metadata", c.filters.require_metadata},
            {"exclude_shadow", c.filters.exclude_shadow}}},
          {"timeline", tl},
          {"elections", el},
          {"analysis",
           {{"min_questions_switch", c.analysis.min_questions_switch},
            {"new_mp_window_days", c.analysis.new_mp_window_days},
            {"zero_method", c.analysis.zero_method == ZeroMethod::kPratt ? "pratt" : "wilcox"}}}};
}

}  // namespace qtypology
