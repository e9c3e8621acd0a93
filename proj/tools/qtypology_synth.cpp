#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtypology/corpus.hpp"
#include "qtypology/synthetic.hpp"

// Writes the planted synthetic corpus plus a matching pipeline config.
int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic planted corpus"};
  std::string out = "data/synthetic";
  qtypology::SyntheticOptions opt;
  std::uint64_t config_seed = 1;
  app.add_option("--out", out, "output directory");
  app.add_option("--pairs", opt.pairs, "number of question-answer pairs");
  app.add_option("--seed", opt.seed, "generator seed");
  app.add_option("--config-seed", config_seed, "seed written into config.json");
  CLI11_PARSE(app, argc, argv);

  const auto s = qtypology::make_synthetic_corpus(opt);
  std::filesystem::create_directories(out);
  const std::filesystem::path dir(out);
  {
    std::ofstream f(dir / "metadata.jsonl", std::ios::binary);
    qtypology::write_metadata(f, s.corpus);
  }
  {
    std::ofstream f(dir / "parses.conllu", std::ios::binary);
    qtypology::write_parses(f, s.corpus);
  }
  {
    std::ofstream f(dir / "labels.jsonl", std::ios::binary);
    for (const auto& [id, fam] : s.family) f << nlohmann::json{{"pair_id", id}, {"family", fam}}.dump() << '\n';
  }
  {
    std::ofstream f(dir / "config.json", std::ios::binary);
    f << qtypology::synthetic_config(s, config_seed).dump(2) << '\n';
  }
  std::cout << "wrote " << s.corpus.size() << " pairs to " << out << '\n';
  return 0;
}
