#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sbmltk/model.hpp"

namespace sbmltk::testing {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(SBMLTK_FIXTURE_DIR) / name;
}

inline std::string fixture(const std::string& name) { return read_file(fixture_path(name)); }

struct CorpusModel {
  std::string name;
  ModelDocument doc;
};

/// Every model under fixtures/corpus, .shs and .xml alike, sorted by file name.
std::vector<CorpusModel> load_corpus();

}  // namespace sbmltk::testing
