#include "mmlpca/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace mmlpca {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list item");
        out.push_back(item);
    }
    if (out.empty()) throw std::invalid_argument("empty value");
    return out;
}

template <typename T>
T parse_scalar(const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    std::from_chars_result res{};
    if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
            res = std::from_chars(first + 2, last, value, 16);
        } else {
            res = std::from_chars(first, last, value);
        }
    } else {
        res = std::from_chars(first, last, value);
    }
    if (res.ec != std::errc() || res.ptr != last) throw std::invalid_argument("cannot parse '" + text + "'");
    return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& value) {
    std::vector<T> out;
    for (const auto& item : split_list(value)) out.push_back(parse_scalar<T>(item));
    return out;
}

const std::set<std::string> kKnownKeys = {"N", "K", "J", "sigma2", "alpha", "replications",
                                          "seed", "estimators", "criteria", "threads"};

}  // namespace

Estimator parse_estimator(const std::string& name) {
    const std::string n = lower(name);
    if (n == "ml" || n == "mle") return Estimator::ML;
    if (n == "mml") return Estimator::MML;
    throw Error(ErrorCode::InvalidParameter, "unknown estimator '" + name + "'");
}

Criterion parse_criterion(const std::string& name) {
    const std::string n = lower(name);
    if (n == "mml") return Criterion::MML;
    if (n == "bic") return Criterion::BIC;
    if (n == "laplace" || n == "bayes") return Criterion::Laplace;
    throw Error(ErrorCode::InvalidParameter, "unknown criterion '" + name + "'");
}

SimGrid parse_sim_config(std::istream& in) {
    std::map<std::string, std::string> raw;
    std::vector<std::string> bad;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bad.push_back("line " + std::to_string(line_no) + " (missing '=')");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kKnownKeys.count(key)) {
            bad.push_back(key + " (unknown key)");
        } else if (raw.count(key)) {
            bad.push_back(key + " (duplicated)");
        } else {
            raw[key] = value;
        }
    }

    std::vector<int> ns, ks, js;
    SimConfig base;
    std::vector<double> alpha;
    auto field = [&](const std::string& key, auto&& apply) {
        const auto it = raw.find(key);
        if (it == raw.end()) return;
        try {
            apply(it->second);
        } catch (const std::exception& e) {
            bad.push_back(key + " (" + e.what() + ")");
        }
    };
    field("N", [&](const std::string& v) { ns = parse_list<int>(v); });
    field("K", [&](const std::string& v) { ks = parse_list<int>(v); });
    field("J", [&](const std::string& v) { js = parse_list<int>(v); });
    field("sigma2", [&](const std::string& v) { base.sigma2 = parse_scalar<double>(v); });
    field("alpha", [&](const std::string& v) { alpha = parse_list<double>(v); });
    field("replications", [&](const std::string& v) { base.replications = parse_scalar<int>(v); });
    field("seed", [&](const std::string& v) { base.master_seed = parse_scalar<std::uint64_t>(v); });
    field("threads", [&](const std::string& v) { base.threads = parse_scalar<int>(v); });
    field("estimators", [&](const std::string& v) {
        base.estimators.clear();
        for (const auto& item : split_list(v)) base.estimators.push_back(parse_estimator(item));
    });
    field("criteria", [&](const std::string& v) {
        base.criteria.clear();
        for (const auto& item : split_list(v)) base.criteria.push_back(parse_criterion(item));
    });
    for (const char* key : {"N", "K", "J"}) {
        if (!raw.count(key)) bad.push_back(std::string(key) + " (required)");
    }
    if (alpha.size() > 1 && js.size() > 1) bad.push_back("alpha (a list of lengths needs a single J)");

    SimGrid grid;
    if (bad.empty()) {
        for (int n : ns) {
            for (int k : ks) {
                for (int j : js) {
                    SimConfig cell = base;
                    cell.n_obs = n;
                    cell.dim = k;
                    cell.true_rank = j;
                    if (k >= 2 && j > candidate_max_rank(k)) {
                        grid.notes.push_back("skipped N=" + std::to_string(n) + " K=" + std::to_string(k) +
                                             " J=" + std::to_string(j) + ": rank exceeds identifiable maximum");
                        continue;
                    }
                    if (alpha.size() == 1) {
                        cell.alphas.assign(static_cast<std::size_t>(std::max(j, 0)), alpha.front());
                    } else {
                        cell.alphas = alpha;
                    }
                    try {
                        cell.validate();
                    } catch (const Error& e) {
                        bad.push_back("N/K/J/alpha (" + std::string(e.what()) + ")");
                        break;
                    }
                    grid.cells.push_back(std::move(cell));
                }
            }
        }
    }
    if (!bad.empty()) {
        std::string message = "invalid config keys:";
        for (const auto& b : bad) message += " " + b + ",";
        message.pop_back();
        throw Error(ErrorCode::InvalidData, message);
    }
    return grid;
}

SimGrid read_sim_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidData, "cannot open config " + path);
    return parse_sim_config(in);
}

}  // namespace mmlpca
