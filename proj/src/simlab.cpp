#include "mmlpca/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "mmlpca/comparators.hpp"
#include "mmlpca/estimators.hpp"

namespace mmlpca {

std::vector<double> SimConfig::factor_lengths() const {
    if (alphas.empty()) return std::vector<double>(static_cast<std::size_t>(std::max(true_rank, 0)), 1.0);
    return alphas;
}

void SimConfig::validate() const {
    std::vector<std::string> problems;
    if (n_obs < 2) problems.push_back("N must be >= 2");
    if (dim < 2) problems.push_back("K must be >= 2");
    if (dim >= 2 && (true_rank < 0 || true_rank > candidate_max_rank(dim))) {
        problems.push_back("J must lie in [0, " + std::to_string(candidate_max_rank(dim)) + "] for K = " +
                           std::to_string(dim));
    }
    if (!(sigma2 > 0) || !std::isfinite(sigma2)) problems.push_back("sigma2 must be positive");
    if (!alphas.empty() && static_cast<int>(alphas.size()) != true_rank) {
        problems.push_back("alpha needs one length per true factor");
    }
    for (double a : alphas) {
        if (!(a > 0) || !std::isfinite(a)) {
            problems.push_back("alpha entries must be positive");
            break;
        }
    }
    if (replications < 1) problems.push_back("replications must be >= 1");
    if (threads < 0) problems.push_back("threads must be >= 0");
    if (problems.empty()) return;

    std::string message = "invalid simulation config:";
    for (const auto& p : problems) message += " " + p + ";";
    message.pop_back();
    throw Error(ErrorCode::InvalidParameter, message);
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master) ^ index);
}

SimulatedData generate_dataset(const SimConfig& config, std::uint64_t replicate_index) {
    config.validate();
    std::mt19937_64 rng(replicate_seed(config.master_seed, replicate_index));
    std::normal_distribution<double> normal(0.0, 1.0);

    const Index n = config.n_obs;
    const Index k = config.dim;
    const Index rank = config.true_rank;
    const std::vector<double> lengths = config.factor_lengths();

    Matrix<double> loadings(k, rank);
    for (Index j = 0; j < rank; ++j) {
        for (Index i = 0; i < k; ++i) loadings(i, j) = normal(rng);
        loadings.col(j) *= lengths[static_cast<std::size_t>(j)] / loadings.col(j).norm();
    }

    const double noise_sd = std::sqrt(config.sigma2);
    SimulatedData out;
    out.data.resize(n, k);
    Vector<double> latent(rank);
    for (Index row = 0; row < n; ++row) {
        for (Index j = 0; j < rank; ++j) latent(j) = normal(rng);
        for (Index i = 0; i < k; ++i) out.data(row, i) = noise_sd * normal(rng);
        if (rank > 0) out.data.row(row) += (loadings * latent).transpose();
    }
    out.truth = {std::move(loadings), config.sigma2};
    return out;
}

std::pair<double, double> metric_s1s2(double sigma2_hat) {
    if (!(sigma2_hat > 0) || !std::isfinite(sigma2_hat)) {
        throw Error(ErrorCode::InvalidParameter, "variance estimate must be positive and finite");
    }
    const double s1 = 0.5 * std::log(sigma2_hat);
    return {s1, s1 * s1};
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MMLPPCA_THREADS")) {
        int value = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec == std::errc() && ptr == end && value > 0) return value;
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception is rethrown after all workers join.
template <typename Body>
void parallel_for(int count, int threads, Body&& body) {
    const int workers = std::clamp(threads, 1, std::max(count, 1));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (int i = next++; i < count && !failed; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
}

// Mean and standard error of the mean, accumulated in index order.
MeanEstimate summarize(const std::vector<double>& values) {
    MeanEstimate out;
    const double n = static_cast<double>(values.size());
    if (values.empty()) return out;
    double sum = 0;
    for (double v : values) sum += v;
    out.mean = sum / n;
    if (values.size() > 1) {
        double ss = 0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

double proportion_se(double p, int n) { return n > 1 ? std::sqrt(p * (1.0 - p) / n) : 0.0; }

template <typename T>
void require_nonempty(const std::vector<T>& items, const char* what) {
    if (items.empty()) throw Error(ErrorCode::InvalidParameter, std::string(what) + " selection is empty");
}

struct EstimateRecord {
    double s1 = 0;
    double s2 = 0;
    double kl = 0;
    bool fallback = false;
};

EstimateRecord estimate_once(const Spectrum<double>& spec, const FactorCovariance<double>& truth,
                             Estimator estimator, int rank) {
    EstimateRecord rec;
    PcaFit<double> fit;
    if (estimator == Estimator::ML) {
        fit = ml_estimate(spec, rank);
    } else {
        try {
            fit = mml_estimate(spec, rank);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoValidRoot && e.code() != ErrorCode::DegenerateSpectrum) throw;
            fit = mml_estimate(spec, 0);
            rec.fallback = true;
        }
    }
    std::tie(rec.s1, rec.s2) = metric_s1s2(fit.sigma2);
    rec.kl = kl_gaussian(truth, fit.covariance());
    return rec;
}

}  // namespace

SimResult run_estimation_experiment(const SimConfig& config) {
    config.validate();
    require_nonempty(config.estimators, "estimator");
    const int reps = config.replications;
    const std::size_t n_est = config.estimators.size();
    std::vector<EstimateRecord> records(static_cast<std::size_t>(reps) * n_est);

    parallel_for(reps, resolve_thread_count(config.threads), [&](int rep) {
        const SimulatedData sample = generate_dataset(config, static_cast<std::uint64_t>(rep));
        const Spectrum<double> spec = spectrum_of(sample.data);
        for (std::size_t e = 0; e < n_est; ++e) {
            records[static_cast<std::size_t>(rep) * n_est + e] =
                estimate_once(spec, sample.truth, config.estimators[e], config.true_rank);
        }
    });

    SimResult result;
    result.config = config;
    result.replications = reps;
    result.standard_errors_defined = reps > 1;
    for (std::size_t e = 0; e < n_est; ++e) {
        std::vector<double> s1, s2, kl;
        EstimatorSummary summary;
        for (int rep = 0; rep < reps; ++rep) {
            const EstimateRecord& rec = records[static_cast<std::size_t>(rep) * n_est + e];
            s1.push_back(rec.s1);
            s2.push_back(rec.s2);
            kl.push_back(rec.kl);
            summary.fallbacks += rec.fallback ? 1 : 0;
        }
        summary.s1 = summarize(s1);
        summary.s2 = summarize(s2);
        summary.kl = summarize(kl);
        result.estimation[config.estimators[e]] = summary;
    }
    return result;
}

SimResult run_selection_experiment(const SimConfig& config) {
    config.validate();
    require_nonempty(config.criteria, "criterion");
    const int reps = config.replications;
    const std::size_t n_crit = config.criteria.size();
    std::vector<int> selected(static_cast<std::size_t>(reps) * n_crit);
    std::vector<double> kl(selected.size());

    parallel_for(reps, resolve_thread_count(config.threads), [&](int rep) {
        const SimulatedData sample = generate_dataset(config, static_cast<std::uint64_t>(rep));
        const Spectrum<double> spec = spectrum_of(sample.data);
        for (std::size_t c = 0; c < n_crit; ++c) {
            const Criterion criterion = config.criteria[c];
            const SelectionReport report = select_rank(spec, criterion);
            const PcaFit<double> fit = fit_for_criterion(spec, criterion, report.selected_rank);
            const std::size_t slot = static_cast<std::size_t>(rep) * n_crit + c;
            selected[slot] = report.selected_rank;
            kl[slot] = kl_gaussian(sample.truth, fit.covariance());
        }
    });

    SimResult result;
    result.config = config;
    result.replications = reps;
    result.standard_errors_defined = reps > 1;
    for (std::size_t c = 0; c < n_crit; ++c) {
        SelectionSummary summary;
        int below = 0, equal = 0, above = 0;
        std::vector<double> kls;
        for (int rep = 0; rep < reps; ++rep) {
            const std::size_t slot = static_cast<std::size_t>(rep) * n_crit + c;
            const int j = selected[slot];
            ++summary.selected_counts[j];
            if (j < config.true_rank) ++below;
            else if (j == config.true_rank) ++equal;
            else ++above;
            kls.push_back(kl[slot]);
        }
        summary.below = static_cast<double>(below) / reps;
        summary.equal = static_cast<double>(equal) / reps;
        summary.above = static_cast<double>(above) / reps;
        summary.se_below = proportion_se(summary.below, reps);
        summary.se_equal = proportion_se(summary.equal, reps);
        summary.se_above = proportion_se(summary.above, reps);
        summary.kl = summarize(kls);
        result.selection[config.criteria[c]] = summary;
    }
    return result;
}

}  // namespace mmlpca
