#pragma once

#include <limits>
#include <map>
#include <string>
#include <string_view>

#include "mmlpca/error.hpp"

namespace mmlpca {

enum class Criterion { MML, BIC, Laplace };

constexpr std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::MML: return "mml";
        case Criterion::BIC: return "bic";
        case Criterion::Laplace: return "laplace";
    }
    return "unknown";
}

struct SkippedCandidate {
    ErrorCode code = ErrorCode::InvalidRank;
    std::string reason;
};

/**
 * Per-rank scores (nats, lower is better) for one criterion. Every candidate
 * rank lands in exactly one of `scores` or `skipped`. For the Laplace
 * criterion the log-evidence is negated, and J = 0 is scored with the
 * isotropic BIC form because the evidence approximation needs J >= 1.
 */
struct SelectionReport {
    Criterion criterion = Criterion::MML;
    std::map<int, double> scores;
    std::map<int, SkippedCandidate> skipped;
    int selected_rank = 0;
};

namespace detail {

// Smallest finite score wins; ties go to the smaller rank.
inline void choose_rank(SelectionReport& report) {
    double best = std::numeric_limits<double>::infinity();
    report.selected_rank = 0;
    for (const auto& [rank, score] : report.scores) {
        if (score < best) {
            best = score;
            report.selected_rank = rank;
        }
    }
}

}  // namespace detail

}  // namespace mmlpca
