#pragma once

#include <string>

#include "sbmltk/cluster.hpp"
#include "sbmltk/model.hpp"

namespace sbmltk {

struct DotOptions {
  bool show_modifiers = true;
  bool compartment_clusters = true;
};

/// Bipartite species/reaction network. Node ids are `s_<id>` and `r_<id>`.
std::string model_to_dot(const ModelDocument& doc, const DotOptions& opts = {});

/// Undirected similarity graph; node fill colors cycle through a fixed
/// palette by cluster index.
std::string similarity_to_dot(const SimilarityGraph& graph);

}  // namespace sbmltk
