#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "mmlpca/config.hpp"
#include "mmlpca/csv.hpp"
#include "mmlpca/report.hpp"

using namespace mmlpca;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::DomainError;
}

std::string error_text(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("csv with and without a header") {
    std::istringstream with_header("a,b,c\n1,2,3\n4,5,6\n\n7,8,9\n");
    const DataMatrix x = read_csv(with_header);
    CHECK(x.rows() == 3);
    CHECK(x.cols() == 3);
    CHECK(x(2, 1) == 8);

    std::istringstream plain("1.5, -2e-3\r\n+3,4\n");
    const DataMatrix y = read_csv(plain);
    CHECK(y.rows() == 2);
    CHECK(y(0, 1) == doctest::Approx(-0.002));
    CHECK(y(1, 0) == 3);
}

TEST_CASE("csv errors carry line numbers") {
    std::istringstream ragged("1,2,3\n4,5\n");
    CHECK(code_of([&] { read_csv(ragged); }) == ErrorCode::InvalidData);
    std::istringstream ragged2("1,2,3\n4,5\n");
    CHECK(error_text([&] { read_csv(ragged2); }).find("line 2") != std::string::npos);
    std::istringstream bad("x,y\n1,2\n3,oops\n");
    CHECK(error_text([&] { read_csv(bad); }).find("line 3") != std::string::npos);
    std::istringstream empty("a,b\n");
    CHECK(code_of([&] { read_csv(empty); }) == ErrorCode::InvalidData);
    CHECK(code_of([] { read_csv_file("/nonexistent/file.csv"); }) == ErrorCode::InvalidData);
}

TEST_CASE("config grid expansion") {
    std::istringstream in(R"(# comment
N = 25, 50
K = 4, 8   # trailing comment
J = 1, 2
sigma2 = 2
alpha = 1.5
replications = 10
seed = 0xFF
estimators = ml, mml
criteria = mml, bayes
threads = 2
)");
    const SimGrid grid = parse_sim_config(in);
    CHECK(grid.cells.size() == 6);  // K=4 admits only J=1
    CHECK(grid.notes.size() == 2);
    const SimConfig& first = grid.cells.front();
    CHECK(first.n_obs == 25);
    CHECK(first.dim == 4);
    CHECK(first.true_rank == 1);
    CHECK(first.sigma2 == 2);
    CHECK(first.alphas == std::vector<double>{1.5});
    CHECK(first.master_seed == 255);
    CHECK(first.replications == 10);
    CHECK(first.threads == 2);
    CHECK(first.criteria == std::vector<Criterion>{Criterion::MML, Criterion::Laplace});
    CHECK(grid.cells.back().alphas.size() == 2);
}

TEST_CASE("config errors list every offending key") {
    std::istringstream in("N = 25\nK = 5\nJ = 1\nbogus = 3\nreplications = many\nN = 3\n");
    const std::string text = error_text([&] { parse_sim_config(in); });
    CHECK(text.find("bogus") != std::string::npos);
    CHECK(text.find("replications") != std::string::npos);
    CHECK(text.find("N (duplicated)") != std::string::npos);

    std::istringstream missing("N = 25\n");
    const std::string missing_text = error_text([&] { parse_sim_config(missing); });
    CHECK(missing_text.find("K (required)") != std::string::npos);
    CHECK(missing_text.find("J (required)") != std::string::npos);

    std::istringstream bad_estimator("N=10\nK=5\nJ=1\nestimators = ml, map\n");
    CHECK(error_text([&] { parse_sim_config(bad_estimator); }).find("estimators") != std::string::npos);
}

TEST_CASE("shipped configs parse") {
    const SimGrid t1 = read_sim_config_file(MMLPCA_SOURCE_DIR "/configs/estimation_grid.conf");
    CHECK(t1.cells.size() == 24);  // J=4 is not identifiable for K=5
    const SimGrid t2 = read_sim_config_file(MMLPCA_SOURCE_DIR "/configs/selection_grid.conf");
    CHECK(t2.cells.size() == 9);
    CHECK(t2.cells.front().criteria.size() == 3);
}

TEST_CASE("reports") {
    SimConfig c;
    c.n_obs = 30;
    c.dim = 5;
    c.true_rank = 0;
    c.replications = 5;
    const SimResult sel = run_selection_experiment(c);
    const std::string csv = simulation_csv(Suite::Select, {sel});
    CHECK(csv.rfind("N,K,J,criterion,KL,se_KL,pct_below,pct_equal,pct_above\n", 0) == 0);
    CHECK(csv.find(",-,") != std::string::npos);

    c.true_rank = 1;
    const SimResult est = run_estimation_experiment(c);
    const std::string est_csv = simulation_csv(Suite::Estimate, {est});
    CHECK(est_csv.rfind("N,K,J,estimator,S1,S2,KL,se_S1,se_S2,se_KL,fallbacks\n", 0) == 0);

    const auto doc = nlohmann::json::parse(simulation_json(Suite::Estimate, {est}, {"note"}));
    CHECK(doc["schema_version"] == kSchemaVersion);
    CHECK(doc["cells"][0]["estimators"].contains("mml"));
    CHECK(doc["notes"][0] == "note");
}
