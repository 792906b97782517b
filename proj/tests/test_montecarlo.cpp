#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "tsel/montecarlo.hpp"

using namespace tsel;
using namespace tsel::mc;

TEST_CASE("confidence intervals") {
    std::vector<double> flat(10, 2.5);
    auto [lo, hi] = confidence_interval(flat, 0.95);
    CHECK(lo == 2.5);
    CHECK(hi == 2.5);

    std::vector<double> coin;
    for (int i = 0; i < 5000; ++i) {
        coin.push_back(0.0);
        coin.push_back(1.0);
    }
    auto [clo, chi] = confidence_interval(coin, 0.95);
    CHECK((chi - clo) / 2.0 == doctest::Approx(0.0098).epsilon(1e-3));

    auto [slo, shi] = confidence_interval(coin, 0.6827);
    double se = 0.5000250018750938 / std::sqrt(10000.0);  // sample sd of the 0/1 sequence
    CHECK((shi - slo) / 2.0 == doctest::Approx(se).epsilon(0.01));

    CHECK_THROWS_AS(confidence_interval(std::vector<double>{1.0}, 0.95), std::invalid_argument);
}

TEST_CASE("accept-all interval run gives ratio exactly 1 on the exact pool") {
    ExperimentConfig cfg;
    cfg.model = Model::Interval;
    cfg.k = 2.0;
    cfg.schedule = ScheduleSpec::parse("power:0");
    cfg.n = 32;
    cfg.trials = 50;
    cfg.seed = 11;
    cfg.pool = OfflinePool::ExactN;
    auto report = run_experiment(cfg);
    CHECK(report.trials_run == 50);
    CHECK(report.degenerate_trials == 0);
    for (const auto& row : report.rows) {
        CHECK(row.ratio == 1.0);
        CHECK(row.seen_total == 32);
    }
    CHECK(report.mean_expected_ratio == 1.0);
    CHECK(report.ratio_of_expectations == doctest::Approx(1.0).epsilon(1e-12));

    // the adversarial pool on an accept-all rule is the same n samples
    cfg.pool = OfflinePool::Adversarial;
    auto adv = run_experiment(cfg);
    for (const auto& row : adv.rows) {
        CHECK(row.ratio == 1.0);
        CHECK(row.seen_total == 32);
    }
}

TEST_CASE("accept-all tree run gives per-trial ratio 1 on the exact pool") {
    ExperimentConfig cfg;
    cfg.model = Model::Tree;
    cfg.p = 0.5;
    cfg.schedule = ScheduleSpec::parse("const:1");
    cfg.n = 4;
    cfg.trials = 64;
    cfg.seed = 17;
    cfg.pool = OfflinePool::ExactN;
    auto report = run_experiment(cfg);
    for (const auto& row : report.rows) CHECK(row.ratio == 1.0);
}

TEST_CASE("per-trial ratios never drop below 1") {
    for (auto [model, schedule] :
         {std::pair{Model::Interval, "power:0.5"}, {Model::Tree, "log:1"},
          {Model::Skyline, "power:0.25"}}) {
        ExperimentConfig cfg;
        cfg.model = model;
        cfg.k = 1.5;
        cfg.p = 0.5;
        cfg.schedule = ScheduleSpec::parse(schedule);
        cfg.n = 16;
        cfg.trials = 100;
        cfg.seed = 23;
        auto report = run_experiment(cfg);
        for (const auto& row : report.rows) CHECK(row.ratio >= 1.0 - 1e-12);
    }
}

TEST_CASE("thread count does not change the report") {
    ExperimentConfig cfg;
    cfg.model = Model::Skyline;
    cfg.schedule = ScheduleSpec::parse("power:0.25");
    cfg.n = 24;
    cfg.trials = 150;
    cfg.seed = 31;
    cfg.threads = 1;
    std::string base = results_csv(cfg, run_experiment(cfg));
    cfg.threads = 3;
    CHECK(results_csv(cfg, run_experiment(cfg)) == base);
    cfg.threads = 8;
    CHECK(results_csv(cfg, run_experiment(cfg)) == base);
}

TEST_CASE("cube skyline reports event statistics instead of exact gaps") {
    ExperimentConfig cfg;
    cfg.model = Model::Skyline;
    cfg.space = SpaceSpec::parse("cube:3");
    cfg.schedule = ScheduleSpec::parse("power:0.25");
    cfg.n = 16;
    cfg.trials = 80;
    cfg.seed = 37;
    auto report = run_experiment(cfg);
    CHECK(std::isnan(report.mean_expected_ratio));
    CHECK(std::isnan(report.ratio_of_expectations));
    double c_n = build_schedule(cfg.schedule, ScheduleDomain::Real).value_at(cfg.n);
    CHECK(report.ratio_bound == 1.0 + report.event_rate / c_n);
    for (const auto& row : report.rows) CHECK(std::isnan(row.ratio));
}

TEST_CASE("csv layout is stable") {
    ExperimentConfig cfg;
    cfg.model = Model::Interval;
    cfg.schedule = ScheduleSpec::parse("power:0.5");
    cfg.n = 4;
    cfg.trials = 3;
    cfg.seed = 41;
    auto report = run_experiment(cfg);
    std::string csv = results_csv(cfg, report);
    CHECK(csv.rfind("model,n,trial,online_quality,offline_quality,ratio,T_n,event_En\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(csv.find("interval,4,0,") != std::string::npos);
    CHECK(csv.find("interval,4,2,") != std::string::npos);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.schedule = ScheduleSpec::parse("power:0.5");
    cfg.trials = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg.trials = 1;
    cfg.n = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg.n = 4;
    cfg.model = Model::Tree;
    cfg.schedule = ScheduleSpec::parse("const:2");
    cfg.p = 1.5;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);

    CHECK_THROWS_AS(SpaceSpec::parse("hexagon"), std::invalid_argument);
    CHECK_THROWS_AS(SpaceSpec::parse("cube:1"), std::invalid_argument);
    CHECK_THROWS_AS(SpaceSpec::parse("product2d:pow0,uniform"), std::invalid_argument);
    CHECK(SpaceSpec::parse("product2d:pow2,pow0.5").text() == "product2d:pow2,pow0.5");
}
