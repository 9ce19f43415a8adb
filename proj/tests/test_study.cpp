#include <catch_amalgamated.hpp>

#include <sstream>

#include "xfire/experiment.hpp"
#include "xfire/study.hpp"

using namespace xfire;

namespace {

ScenarioConfig quick(const std::string& name) {
    auto c = experiment_preset(name);
    c.engine.sim_duration = 900;
    c.detect.ml.forest.n_trees = 10;
    c.detect.ml.svm_epochs = 20;
    c.detect.ml.train_runs = 1;
    c.detect.ml.test_runs = 1;
    return c;
}

} // namespace

TEST_CASE("study kinds by name") {
    for (auto k : {StudyKind::distribution, StudyKind::feature_count, StudyKind::visibility})
        CHECK(study_kind_from_string(to_string(k)) == k);
    CHECK_FALSE(study_kind_from_string("nope"));
}

TEST_CASE("distribution study labels") {
    auto c = quick("ml_distribution");
    c.detect.ml.topologies = {2, 4};
    const auto rep = run_study(StudyKind::distribution, c, {1, 2});
    CHECK(rep.configs() == std::vector<std::string>{"2ST/svm", "2ST/rf", "4ST/svm", "4ST/rf"});
    CHECK(rep.rows.size() == 8);
    for (const auto& r : rep.rows) {
        CHECK(r.auc >= 0.0);
        CHECK(r.auc <= 1.0);
    }
    // Config-major, seeds in order.
    CHECK(rep.rows[0].seed == 1);
    CHECK(rep.rows[1].seed == 2);
    CHECK(rep.rows[0].config == rep.rows[1].config);
}

TEST_CASE("feature-count and visibility study labels") {
    auto c = quick("ml_features");
    c.detect.ml.feature_sizes = {5, 10};
    const auto fc = run_study(StudyKind::feature_count, c, {3});
    CHECK(fc.configs() == std::vector<std::string>{"k=5/svm", "k=5/rf", "k=10/svm", "k=10/rf"});

    auto v = quick("ml_visibility");
    v.topology.n_subtrees = 2;
    v.detect.ml.edge_subset = 5;
    const auto vis = run_study(StudyKind::visibility, v, {3});
    CHECK(vis.configs() == std::vector<std::string>{"5edge/svm", "5edge/rf", "5edge+up/svm", "5edge+up/rf",
                                                     "20edge/svm", "20edge/rf", "20edge+up/svm", "20edge+up/rf"});
}

TEST_CASE("studies are deterministic and the csv carries summary rows") {
    auto c = quick("ml_features");
    c.detect.ml.feature_sizes = {5};
    const auto a = run_study(StudyKind::feature_count, c, {4, 5});
    const auto b = run_study(StudyKind::feature_count, c, {4, 5});
    std::ostringstream x, y;
    a.write_csv(x);
    b.write_csv(y);
    CHECK(x.str() == y.str());
    const auto text = x.str();
    CHECK(text.rfind("config,seed,auc\n", 0) == 0);
    CHECK(text.find("k=5/svm,mean,") != std::string::npos);
    CHECK(text.find("k=5/rf,std,") != std::string::npos);
    CHECK(a.mean("k=5/svm") == (a.aucs("k=5/svm")[0] + a.aucs("k=5/svm")[1]) / 2);
    CHECK_THROWS(a.mean("missing"));
}

TEST_CASE("an attack too weak to register is reported, not scored") {
    auto c = quick("ml_distribution");
    c.detect.ml.topologies = {2};
    c.attack.enabled = false;
    CHECK_THROWS_AS(run_study(StudyKind::distribution, c, {1}), std::runtime_error);
}
