#include "fixtures.hpp"

#include <algorithm>

#include "sbmltk/sbml_io.hpp"
#include "sbmltk/shorthand.hpp"

namespace sbmltk::testing {

std::vector<CorpusModel> load_corpus() {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(fixture_path("corpus"))) {
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CorpusModel> out;
  for (const auto& path : files) {
    auto text = read_file(path);
    ModelDocument doc = path.extension() == ".shs" ? parse_shorthand(text) : read_sbml(text);
    out.push_back({path.filename().string(), std::move(doc)});
  }
  return out;
}

}  // namespace sbmltk::testing
