#pragma once

#include <random>
#include <vector>

#include "sbmltk/balancing.hpp"

namespace sbmltk::testing {

using DenseMatrix = std::vector<std::vector<double>>;

/// Gauss-Jordan with partial pivoting. Throws std::runtime_error if singular.
DenseMatrix gauss_jordan_inverse(DenseMatrix a);

struct DensePosterior {
  std::vector<double> mean;  // basics
  DenseMatrix cov;           // basics x basics
};

/// (S0^-1 + Qd' Sy^-1 Qd)^-1 formed by explicit inversion, row by row, from
/// the problem's prior, observations and dependence rows.
DensePosterior dense_posterior(const BalancingProblem& p);

/// Dependence row of a derived instance, rebuilt from the reaction
/// participants rather than from the stoichiometric matrix.
std::vector<double> hand_dependence_row(const ModelDocument& doc, const BalancingProblem& p,
                                        const QuantityInstance& derived);

/// Small valid model plus random data rows, with at most `max_basics` basics.
struct RandomBalancing {
  ModelDocument doc;
  std::vector<DataRow> data;
};
RandomBalancing random_balancing(std::mt19937_64& rng, std::size_t max_basics, std::size_t max_data);

double relative_error(double got, double want);

}  // namespace sbmltk::testing
