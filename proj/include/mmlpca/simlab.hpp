#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mmlpca/codelength.hpp"
#include "mmlpca/gaussian.hpp"
#include "mmlpca/selection_report.hpp"
#include "mmlpca/spectrum.hpp"

namespace mmlpca {

inline constexpr std::uint64_t kDefaultSeed = 0xC0FFEE;

/// One cell of a simulation grid. Factor lengths default to 1, sigma2 to 1.
struct SimConfig {
    int n_obs = 100;
    int dim = 10;
    int true_rank = 1;
    double sigma2 = 1.0;
    std::vector<double> alphas;  ///< empty means all ones
    int replications = 1000;
    std::uint64_t master_seed = kDefaultSeed;
    std::vector<Estimator> estimators{Estimator::ML, Estimator::MML};
    std::vector<Criterion> criteria{Criterion::MML, Criterion::BIC, Criterion::Laplace};
    int threads = 0;  ///< 0: MMLPPCA_THREADS, else hardware concurrency

    std::vector<double> factor_lengths() const;
    /// Throws Error(InvalidParameter) naming every violated field.
    void validate() const;
};

struct SimulatedData {
    DataMatrix data;
    FactorCovariance<double> truth;  ///< A A' + sigma2 I of the generating model
};

/// Seed of replicate `index`: a SplitMix64 mix of (master, index), so any
/// replicate can be regenerated independently of the others.
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index);

/**
 * Draws one data set from the latent-factor model x = A v + e. Columns of A are
 * alpha_j times independent uniform directions on the unit K-sphere (not
 * orthogonalized); v ~ N(0, I_J), e ~ N(0, sigma2 I_K).
 */
SimulatedData generate_dataset(const SimConfig& config, std::uint64_t replicate_index);

/// S1 = log sigma_hat, S2 = S1^2.
std::pair<double, double> metric_s1s2(double sigma2_hat);

struct MeanEstimate {
    double mean = 0;
    double std_error = 0;
};

struct EstimatorSummary {
    MeanEstimate s1;
    MeanEstimate s2;
    MeanEstimate kl;
    int fallbacks = 0;  ///< replicates that fell back to the J = 0 model
};

struct SelectionSummary {
    double below = 0;
    double equal = 0;
    double above = 0;
    double se_below = 0;
    double se_equal = 0;
    double se_above = 0;
    MeanEstimate kl;
    std::map<int, int> selected_counts;
};

struct SimResult {
    SimConfig config;
    int replications = 0;
    bool standard_errors_defined = false;  ///< false with a single replicate
    std::map<Estimator, EstimatorSummary> estimation;
    std::map<Criterion, SelectionSummary> selection;
};

/// Fits every configured estimator at the true rank and aggregates S1, S2 and
/// KL(truth || fit).
SimResult run_estimation_experiment(const SimConfig& config);

/// Selects the rank under every configured criterion, tallies below / equal /
/// above the true rank and the KL of the selected fit.
SimResult run_selection_experiment(const SimConfig& config);

/// Worker count for `requested` (0 consults MMLPPCA_THREADS, then hardware).
int resolve_thread_count(int requested);

}  // namespace mmlpca
