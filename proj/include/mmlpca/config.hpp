#pragma once

#include <istream>
#include <string>
#include <vector>

#include "mmlpca/simlab.hpp"

namespace mmlpca {

/// Experiment grid parsed from a config file, plus the cells it dropped.
struct SimGrid {
    std::vector<SimConfig> cells;
    std::vector<std::string> notes;
};

/**
 * Parses a `key = value` experiment file. `#` starts a comment, list values
 * are comma-separated, and N, K, J expand to their Cartesian product. Cells
 * with J above min(K - 1, max_rank(K)) are dropped with a note.
 *
 * Keys: N, K, J, sigma2, alpha, replications, seed, estimators, criteria,
 * threads. Unknown, duplicated or malformed keys throw InvalidData naming every
 * offending key.
 */
SimGrid parse_sim_config(std::istream& in);
SimGrid read_sim_config_file(const std::string& path);

Estimator parse_estimator(const std::string& name);
Criterion parse_criterion(const std::string& name);

}  // namespace mmlpca
