#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mmlpca {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitModel = 3;

/**
 * Entry point of the `mmlpca` tool. `args` excludes the program name.
 *
 *   fit <data.csv> --rank J [--estimator ml|mml]
 *   select <data.csv> [--criterion mml|bic|laplace|all]
 *   simulate <config> --suite estimate|select   (also sim-estimate, sim-select)
 *
 * Returns 0 on success, 2 for input or config errors, 3 for model errors.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmlpca
