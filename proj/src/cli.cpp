#include "mmlpca/cli.hpp"

#include <charconv>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "mmlpca/comparators.hpp"
#include "mmlpca/config.hpp"
#include "mmlpca/csv.hpp"
#include "mmlpca/estimators.hpp"
#include "mmlpca/report.hpp"

namespace mmlpca {
namespace {

struct Options {
    std::string input;
    int rank = -1;
    std::string estimator = "mml";
    std::string criterion = "all";
    std::string suite;
    std::string seed;
    int replications = 0;
    std::string output;
    std::string format;
};

bool is_input_error(ErrorCode code) {
    return code == ErrorCode::InvalidData || code == ErrorCode::InvalidParameter;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t value = 0;
    const bool hex = text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
    const char* first = text.data() + (hex ? 2 : 0);
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value, hex ? 16 : 10);
    if (ec != std::errc() || ptr != last || first == last) {
        throw Error(ErrorCode::InvalidParameter, "--seed: cannot parse '" + text + "'");
    }
    return value;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file || !(file << content)) throw Error(ErrorCode::InvalidData, "cannot write " + path);
}

void emit(const Options& opt, const std::string& document, std::ostream& out) {
    if (opt.output.empty()) {
        out << document;
    } else {
        write_file(opt.output, document);
    }
}

int cmd_fit(const Options& opt, std::ostream& out) {
    const Estimator estimator = parse_estimator(opt.estimator);
    const Spectrum<double> spec = spectrum_of(read_csv_file(opt.input));
    try {
        std::vector<std::string> warnings;
        PcaFit<double> fit;
        if (estimator == Estimator::ML) {
            fit = ml_estimate(spec, opt.rank);
        } else {
            fit = mml_estimate(spec, opt.rank);
            if (opt.rank > 0 && mml_polynomial(spec, opt.rank).admissible_roots.size() > 1) {
                warnings.push_back("several stationary points in (0, delta_J); kept the shortest codelength");
            }
        }
        emit(opt, fit_json(spec, fit, warnings), out);
        return kExitOk;
    } catch (const Error& e) {
        if (is_input_error(e.code())) throw;
        std::optional<PcaFit<double>> fallback;
        if (e.code() == ErrorCode::NoValidRoot) fallback = mml_estimate(spec, 0);
        emit(opt, fit_error_json(spec, opt.rank, estimator, e, fallback), out);
        return kExitModel;
    }
}

int cmd_select(const Options& opt, std::ostream& out) {
    std::vector<Criterion> criteria;
    if (opt.criterion == "all") {
        criteria = {Criterion::MML, Criterion::BIC, Criterion::Laplace};
    } else {
        criteria = {parse_criterion(opt.criterion)};
    }
    const Spectrum<double> spec = spectrum_of(read_csv_file(opt.input));
    std::vector<SelectionReport> reports;
    for (Criterion c : criteria) reports.push_back(select_rank(spec, c));
    emit(opt, selection_json(spec, reports), out);
    return kExitOk;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
    Suite suite;
    if (opt.suite == "estimate") {
        suite = Suite::Estimate;
    } else if (opt.suite == "select") {
        suite = Suite::Select;
    } else {
        throw Error(ErrorCode::InvalidParameter, "--suite must be estimate or select");
    }
    if (!opt.format.empty() && opt.format != "json" && opt.format != "csv") {
        throw Error(ErrorCode::InvalidParameter, "--format must be json or csv");
    }
    SimGrid grid = read_sim_config_file(opt.input);
    if (!opt.seed.empty()) {
        const std::uint64_t seed = parse_seed(opt.seed);
        for (auto& cell : grid.cells) cell.master_seed = seed;
    }
    if (opt.replications > 0) {
        for (auto& cell : grid.cells) cell.replications = opt.replications;
    }

    std::ostream& log = opt.output.empty() ? err : out;
    for (const auto& note : grid.notes) log << note << '\n';
    std::vector<SimResult> results;
    for (const auto& cell : grid.cells) {
        results.push_back(suite == Suite::Estimate ? run_estimation_experiment(cell)
                                                   : run_selection_experiment(cell));
        log << simulation_summary_line(suite, results.back()) << '\n';
    }

    const std::string json = simulation_json(suite, results, grid.notes);
    const std::string csv = simulation_csv(suite, results);
    if (opt.output.empty()) {
        out << (opt.format == "json" ? json : csv);
    } else if (opt.format.empty()) {
        write_file(opt.output + ".csv", csv);
        write_file(opt.output + ".json", json);
    } else {
        write_file(opt.output + "." + opt.format, opt.format == "json" ? json : csv);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rank selection and residual-variance estimation for probabilistic PCA", "mmlpca"};
    app.require_subcommand(1);
    Options opt;

    auto* fit = app.add_subcommand("fit", "Fit a model of a given rank to a CSV data file");
    fit->add_option("input", opt.input, "CSV file, rows are observations")->required();
    fit->add_option("--rank", opt.rank, "Number of latent factors")->required();
    fit->add_option("--estimator", opt.estimator, "ml or mml")->check(CLI::IsMember({"ml", "mml"}));
    fit->add_option("--output", opt.output, "Write JSON here instead of stdout");

    auto* select = app.add_subcommand("select", "Choose the number of latent factors");
    select->add_option("input", opt.input, "CSV file, rows are observations")->required();
    select->add_option("--criterion", opt.criterion, "mml, bic, laplace or all")
        ->check(CLI::IsMember({"mml", "bic", "laplace", "all"}));
    select->add_option("--output", opt.output, "Write JSON here instead of stdout");

    auto add_sim_options = [&](CLI::App* sub) {
        sub->add_option("config", opt.input, "Experiment config file")->required();
        sub->add_option("--seed", opt.seed, "Master seed (decimal or 0x-hex), overrides the config");
        sub->add_option("--replications", opt.replications, "Overrides the config")
            ->check(CLI::PositiveNumber);
        sub->add_option("--output", opt.output, "Output prefix; writes <prefix>.csv and <prefix>.json");
        sub->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    };
    auto* simulate = app.add_subcommand("simulate", "Run a simulation suite over a config grid");
    add_sim_options(simulate);
    simulate->add_option("--suite", opt.suite, "estimate or select")
        ->required()
        ->check(CLI::IsMember({"estimate", "select"}));
    auto* sim_estimate = app.add_subcommand("sim-estimate", "Same as simulate --suite estimate");
    add_sim_options(sim_estimate);
    auto* sim_select = app.add_subcommand("sim-select", "Same as simulate --suite select");
    add_sim_options(sim_select);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (fit->parsed()) return cmd_fit(opt, out);
        if (select->parsed()) return cmd_select(opt, out);
        if (sim_estimate->parsed()) opt.suite = "estimate";
        if (sim_select->parsed()) opt.suite = "select";
        return cmd_simulate(opt, out, err);
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return is_input_error(e.code()) ? kExitInput : kExitModel;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
}

}  // namespace mmlpca
