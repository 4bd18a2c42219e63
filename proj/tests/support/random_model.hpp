#pragma once

#include <random>
#include <string>
#include <vector>

#include "sbmltk/model.hpp"

namespace sbmltk::testing {

struct RandomModelOptions {
  std::size_t max_compartments = 2;
  std::size_t max_species = 8;
  std::size_t max_parameters = 4;
  std::size_t max_reactions = 10;
  bool annotations = true;
  bool names = true;
};

/// A valid document drawn from `rng`; every kinetic-law symbol resolves.
ModelDocument random_model(std::mt19937_64& rng, const RandomModelOptions& opts = {});

/// Random expression over `symbols` with depth at most `max_depth`.
Expression random_expression(std::mt19937_64& rng, const std::vector<std::string>& symbols,
                             int max_depth);

/// Shared pool of normalized URIs used by random annotations.
const std::vector<std::string>& uri_pool();

}  // namespace sbmltk::testing
