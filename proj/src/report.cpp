#include "mmlpca/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace mmlpca {
namespace {

using nlohmann::ordered_json;

ordered_json vector_json(const Vector<double>& v) {
    ordered_json out = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

ordered_json header(const Spectrum<double>& spec) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["N"] = spec.n_obs;
    out["K"] = spec.dim;
    out["candidate_ranks"] = ordered_json::array();
    for (int j = 0; j <= candidate_max_rank(static_cast<int>(spec.dim)); ++j) out["candidate_ranks"].push_back(j);
    return out;
}

ordered_json fit_body(const PcaFit<double>& fit) {
    ordered_json out;
    out["J"] = fit.rank;
    out["estimator"] = std::string(to_string(fit.estimator));
    out["sigma2"] = fit.sigma2;
    out["alphas"] = vector_json(fit.alphas);
    if (fit.codelength) {
        const auto& c = *fit.codelength;
        out["codelength"] = {{"total", c.total},
                             {"neg_log_likelihood", c.neg_log_likelihood},
                             {"neg_log_prior", c.neg_log_prior},
                             {"half_log_fisher", c.half_log_fisher},
                             {"quantization", c.quantization},
                             {"parameters", c.parameters},
                             {"angles", c.angles}};
    }
    return out;
}

std::string format(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

std::string pct(double rate) { return format(100.0 * rate); }

ordered_json mean_json(const MeanEstimate& m) { return {{"mean", m.mean}, {"se", m.std_error}}; }

ordered_json config_json(const SimConfig& c) {
    ordered_json out;
    out["N"] = c.n_obs;
    out["K"] = c.dim;
    out["J"] = c.true_rank;
    out["sigma2"] = c.sigma2;
    out["alpha"] = c.factor_lengths();
    out["replications"] = c.replications;
    out["seed"] = c.master_seed;
    return out;
}

}  // namespace

std::string fit_json(const Spectrum<double>& spec, const PcaFit<double>& fit,
                     const std::vector<std::string>& warnings) {
    ordered_json out = header(spec);
    out["status"] = "ok";
    const ordered_json body = fit_body(fit);
    for (const auto& [key, value] : body.items()) out[key] = value;
    out["eigenvalues"] = vector_json(spec.eigenvalues);
    out["warnings"] = warnings;
    return out.dump(2) + "\n";
}

std::string fit_error_json(const Spectrum<double>& spec, int rank, Estimator estimator, const Error& error,
                           const std::optional<PcaFit<double>>& fallback) {
    ordered_json out = header(spec);
    out["status"] = "error";
    out["J"] = rank;
    out["estimator"] = std::string(to_string(estimator));
    out["error"] = {{"code", std::string(to_string(error.code()))}, {"reason", error.what()}};
    out["eigenvalues"] = vector_json(spec.eigenvalues);
    if (fallback) out["fallback"] = fit_body(*fallback);
    return out.dump(2) + "\n";
}

std::string selection_json(const Spectrum<double>& spec, const std::vector<SelectionReport>& reports) {
    ordered_json out = header(spec);
    out["eigenvalues"] = vector_json(spec.eigenvalues);
    ordered_json crit = ordered_json::object();
    for (const auto& r : reports) {
        ordered_json entry;
        entry["selected_J"] = r.selected_rank;
        ordered_json scores = ordered_json::array();
        for (const auto& [j, s] : r.scores) scores.push_back({{"J", j}, {"score", s}});
        entry["scores"] = scores;
        ordered_json skipped = ordered_json::array();
        for (const auto& [j, s] : r.skipped) {
            skipped.push_back({{"J", j}, {"code", std::string(to_string(s.code))}, {"reason", s.reason}});
        }
        entry["skipped"] = skipped;
        crit[std::string(to_string(r.criterion))] = entry;
    }
    out["criteria"] = crit;
    return out.dump(2) + "\n";
}

std::string simulation_json(Suite suite, const std::vector<SimResult>& results,
                            const std::vector<std::string>& notes) {
    ordered_json out;
    out["schema_version"] = kSchemaVersion;
    out["suite"] = suite == Suite::Estimate ? "estimate" : "select";
    out["notes"] = notes;
    ordered_json cells = ordered_json::array();
    for (const auto& r : results) {
        ordered_json cell;
        cell["config"] = config_json(r.config);
        cell["replications"] = r.replications;
        cell["standard_errors_defined"] = r.standard_errors_defined;
        if (suite == Suite::Estimate) {
            ordered_json est = ordered_json::object();
            for (const auto& [e, s] : r.estimation) {
                est[std::string(to_string(e))] = {{"S1", mean_json(s.s1)},
                                                  {"S2", mean_json(s.s2)},
                                                  {"KL", mean_json(s.kl)},
                                                  {"fallbacks", s.fallbacks}};
            }
            cell["estimators"] = est;
        } else {
            ordered_json sel = ordered_json::object();
            for (const auto& [c, s] : r.selection) {
                ordered_json counts = ordered_json::object();
                for (const auto& [j, n] : s.selected_counts) counts[std::to_string(j)] = n;
                sel[std::string(to_string(c))] = {
                    {"below", {{"rate", s.below}, {"se", s.se_below}}},
                    {"equal", {{"rate", s.equal}, {"se", s.se_equal}}},
                    {"above", {{"rate", s.above}, {"se", s.se_above}}},
                    {"KL", mean_json(s.kl)},
                    {"selected_counts", counts}};
            }
            cell["criteria"] = sel;
        }
        cells.push_back(cell);
    }
    out["cells"] = cells;
    return out.dump(2) + "\n";
}

std::string simulation_csv(Suite suite, const std::vector<SimResult>& results) {
    std::ostringstream out;
    if (suite == Suite::Estimate) {
        out << "N,K,J,estimator,S1,S2,KL,se_S1,se_S2,se_KL,fallbacks\n";
        for (const auto& r : results) {
            for (const auto& [e, s] : r.estimation) {
                out << r.config.n_obs << ',' << r.config.dim << ',' << r.config.true_rank << ',' << to_string(e)
                    << ',' << format(s.s1.mean) << ',' << format(s.s2.mean) << ',' << format(s.kl.mean) << ','
                    << format(s.s1.std_error) << ',' << format(s.s2.std_error) << ',' << format(s.kl.std_error)
                    << ',' << s.fallbacks << '\n';
            }
        }
    } else {
        out << "N,K,J,criterion,KL,se_KL,pct_below,pct_equal,pct_above\n";
        for (const auto& r : results) {
            for (const auto& [c, s] : r.selection) {
                out << r.config.n_obs << ',' << r.config.dim << ',' << r.config.true_rank << ',' << to_string(c)
                    << ',' << format(s.kl.mean) << ',' << format(s.kl.std_error) << ','
                    << (r.config.true_rank == 0 ? std::string("-") : pct(s.below)) << ',' << pct(s.equal) << ','
                    << pct(s.above) << '\n';
            }
        }
    }
    return out.str();
}

std::string simulation_summary_line(Suite suite, const SimResult& r) {
    std::ostringstream out;
    out << "N=" << r.config.n_obs << " K=" << r.config.dim << " J=" << r.config.true_rank
        << " reps=" << r.replications;
    if (suite == Suite::Estimate) {
        for (const auto& [e, s] : r.estimation) {
            out << " | " << to_string(e) << " S1=" << format(s.s1.mean) << " S2=" << format(s.s2.mean)
                << " KL=" << format(s.kl.mean);
            if (s.fallbacks > 0) out << " fallbacks=" << s.fallbacks;
        }
    } else {
        for (const auto& [c, s] : r.selection) {
            out << " | " << to_string(c) << " <J=" << (r.config.true_rank == 0 ? std::string("-") : pct(s.below))
                << "% =J=" << pct(s.equal) << "% >J=" << pct(s.above) << "% KL=" << format(s.kl.mean);
        }
    }
    return out.str();
}

}  // namespace mmlpca
