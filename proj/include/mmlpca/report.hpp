#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmlpca/codelength.hpp"
#include "mmlpca/error.hpp"
#include "mmlpca/selection_report.hpp"
#include "mmlpca/simlab.hpp"

namespace mmlpca {

inline constexpr int kSchemaVersion = 1;

// Every JSON document carries a top-level "schema_version".

std::string fit_json(const Spectrum<double>& spec, const PcaFit<double>& fit,
                     const std::vector<std::string>& warnings);

/// Structured failure of a fit; `fallback` is the J = 0 fit reported for NoValidRoot.
std::string fit_error_json(const Spectrum<double>& spec, int rank, Estimator estimator, const Error& error,
                           const std::optional<PcaFit<double>>& fallback);

std::string selection_json(const Spectrum<double>& spec, const std::vector<SelectionReport>& reports);

enum class Suite { Estimate, Select };

std::string simulation_json(Suite suite, const std::vector<SimResult>& results,
                            const std::vector<std::string>& notes);

/**
 * One row per (cell, estimator): N,K,J,estimator,S1,S2,KL,se_S1,se_S2,se_KL,fallbacks
 * or per (cell, criterion): N,K,J,criterion,KL,se_KL,pct_below,pct_equal,pct_above.
 * pct_below is "-" when the true rank is 0.
 */
std::string simulation_csv(Suite suite, const std::vector<SimResult>& results);

/// One human-readable line per cell.
std::string simulation_summary_line(Suite suite, const SimResult& result);

}  // namespace mmlpca
