#include <doctest.h>

#include <cmath>
#include <string>

#include "bograph/montecarlo.hpp"
#include "bograph/oracle.hpp"

using namespace bograph;

TEST_CASE("campaign carries exactly the requested statistics") {
    McConfig cfg;
    cfg.params = {1.0, 1, 7};
    cfg.t = 10;
    cfg.replicas = 2;
    cfg.degree_max = 4;
    const McReport rep = run_campaign(cfg);
    CHECK(rep.statistics == std::vector<std::string>{"degree_counts"});
    CHECK(rep.replicas == 2);
    CHECK(rep.degree_mean.size() == 5);
    CHECK(rep.cov.empty());
    CHECK(rep.x_mean.empty());
    CHECK(rep.tail.empty());
    CHECK(rep.audited == 1);
    CHECK(rep.audit_failures == 0);

    McConfig cfg2 = cfg;
    cfg2.covariance = true;
    cfg2.edge_degree_max = 5;
    const McReport rep2 = run_campaign(cfg2);
    CHECK(rep2.statistics ==
          std::vector<std::string>{"degree_counts", "degree_covariance", "edge_counts"});
    CHECK(rep2.cov.size() == 4);   // d in [k, 4]
    CHECK(rep2.x_mean.size() == 5); // d in [k, 5]
}

TEST_CASE("reports are bit-identical across worker counts") {
    McConfig cfg;
    cfg.params = {0.5, 2, 99};
    cfg.t = 50;
    cfg.replicas = 2500; // several scheduling blocks
    cfg.degree_max = 10;
    cfg.covariance = true;
    cfg.edge_degree_max = 8;
    cfg.tail = {true, 2, 3, 1.0, {1.0, 4.0}};

    cfg.workers = 1;
    const std::string one = run_campaign(cfg).to_json().dump();
    cfg.workers = 3;
    const std::string three = run_campaign(cfg).to_json().dump();
    cfg.workers = 8;
    const std::string eight = run_campaign(cfg).to_json().dump();
    CHECK(one == three);
    CHECK(one == eight);
}

TEST_CASE("t=2 panel: R(1) and X(1,3) are Bernoulli(2/3)") {
    McConfig cfg;
    cfg.params = {1.0, 1, 2024};
    cfg.t = 2;
    cfg.replicas = 100000;
    cfg.degree_max = 3;
    cfg.edge_degree_max = 3;
    const McReport rep = run_campaign(cfg);
    const double p = 2.0 / 3.0;
    const double se = std::sqrt(p * (1 - p) / double(cfg.replicas));
    CHECK(std::abs(rep.degree_mean[1] - p) < 4 * se);
    CHECK(std::abs(rep.x_mean[0][2] - p) < 4 * se); // cell (d1,d2) = (1,3)
    CHECK(std::abs(rep.x_mean[2][0] - p) < 4 * se);
    // Variance of a Bernoulli(2/3) is 2/9.
    CHECK(rep.degree_var[1] == doctest::Approx(2.0 / 9).epsilon(0.05));
    CHECK(rep.audit_failures == 0);
}

TEST_CASE("degree gate passes against the exact oracle") {
    McConfig cfg;
    cfg.params = {1.0, 1, 31337};
    cfg.t = 30;
    cfg.replicas = 20000;
    cfg.degree_max = 12;
    const McReport rep = run_campaign(cfg);
    const DegreeExpectationTable oracle(cfg.params, cfg.t, {.keep_history = false});
    const auto gate = check_degree_expectation(rep, oracle, 12);
    CHECK(gate.cells.size() == 12);
    CHECK(double(gate.failures) <= gate.allowed_failures);
    CHECK(gate.pass_rate >= 0.9);

    // Oracle targets compared against themselves pass every cell.
    std::vector<double> mean, se, target;
    for (std::uint32_t d = cfg.params.k; d <= 12; ++d) {
        mean.push_back(oracle.value(d, cfg.t));
        se.push_back(rep.degree_se(d));
        target.push_back(oracle.value(d, cfg.t));
    }
    const auto self_gate =
        check_mean_panel(mean, se, target, {}, 4.0, cfg.params.k, cfg.replicas);
    CHECK(self_gate.failures == 0);
    CHECK(self_gate.pass);

    // Cells beyond the support have sample mean exactly 0.
    McConfig wide = cfg;
    wide.t = 3;
    wide.degree_max = 12; // support ends at kt + k = 4
    const McReport rep3 = run_campaign(wide);
    for (std::uint32_t d = 5; d <= 12; ++d) {
        CHECK(rep3.degree_mean[d] == 0.0);
        CHECK(rep3.degree_var[d] == 0.0);
    }

    // Mismatched oracle parameters are an input error.
    const DegreeExpectationTable other({0.5, 2, 0}, cfg.t, {.keep_history = false});
    CHECK_THROWS_AS(check_degree_expectation(rep, other, 12), std::invalid_argument);

    // The closed-form defect column is small at desk scale.
    const auto defect = closed_form_defect(oracle, 12);
    for (double v : defect) CHECK(v < 1.0);
}

TEST_CASE("degree panel at t=50 passes at least 99% of cells") {
    McConfig cfg;
    cfg.params = {1.0, 1, 90210};
    cfg.t = 50;
    cfg.replicas = 100000;
    cfg.degree_max = 51;
    const McReport rep = run_campaign(cfg);
    const DegreeExpectationTable oracle(cfg.params, cfg.t, {.keep_history = false});
    const auto gate = check_degree_expectation(rep, oracle, 51);
    CHECK(gate.pass_rate >= 0.99);
}

TEST_CASE("covariance gate against the exact oracle at t=20") {
    McConfig cfg;
    cfg.params = {1.0, 1, 555};
    cfg.t = 20;
    cfg.replicas = 50000;
    cfg.degree_max = 8;
    cfg.covariance = true;
    const McReport rep = run_campaign(cfg);
    const PairExpectationTables oracle(cfg.params, cfg.t, 10);
    const auto check = check_degree_covariance(rep, oracle, 10.0);
    // Empirical covariance matrix is symmetric by construction.
    for (std::size_t i = 0; i < rep.cov.size(); ++i)
        for (std::size_t j = 0; j < rep.cov.size(); ++j)
            CHECK(rep.cov[i][j] == doctest::Approx(rep.cov[j][i]).epsilon(1e-12));
    // Diagonal cells equal the variance panel.
    for (std::size_t i = 0; i < rep.cov.size(); ++i)
        CHECK(rep.cov[i][i] ==
              doctest::Approx(rep.degree_var[cfg.params.k + i]).epsilon(1e-9));
    CHECK(check.z_gate.pass_rate >= 0.98);
}

TEST_CASE("tail table behaves") {
    McConfig cfg;
    cfg.params = {1.0, 1, 777};
    cfg.t = 50;
    cfg.replicas = 4000;
    cfg.edge_degree_max = 3;
    const PairExpectationTables oracle(cfg.params, cfg.t, 6);
    cfg.tail = {true, 1, 2, oracle.edge_expectation(1, 2), {0.5, 1.0, 2.0, 4.0, 50.0}};
    const McReport rep = run_campaign(cfg);
    REQUIRE(rep.tail.size() == 5);
    for (std::size_t i = 1; i < rep.tail.size(); ++i) {
        CHECK(rep.tail[i].bound < rep.tail[i - 1].bound); // monotone in c
        CHECK(rep.tail[i].freq <= rep.tail[i - 1].freq);  // thresholds grow
    }
    CHECK(rep.tail.back().freq == 0.0); // c = 50 exceeds any possible deviation
    CHECK(check_tail_table(rep));
}

TEST_CASE("frequency gate alpha: Gaussian regime and Poisson regime") {
    // Large np: two-sided 4-sigma Gaussian tail.
    CHECK(frequency_gate_alpha(0.5, 1e6) == doctest::Approx(6.3342e-5).epsilon(1e-3));
    // Tiny np: a single occurrence already exceeds 4 SE, so alpha ~ p*n.
    const double a = frequency_gate_alpha(5e-8, 1e6);
    CHECK(a > 3e-8 * 1e6);
    CHECK(a < 7e-8 * 1e6);
    CHECK(frequency_gate_alpha(0.0, 1e6) == 0.0);
    // Budget formula.
    CHECK(failure_budget_uniform(100, 0.01) ==
          doctest::Approx(1.0 + 4.0 * std::sqrt(0.99)).epsilon(1e-12));
}

TEST_CASE("concentration screen tightens along t = 10^2, 10^3, 10^4") {
    const ModelParams p{1.0, 1, 4242};
    std::vector<double> frac;
    for (std::uint64_t t : {100ull, 1000ull, 10000ull})
        frac.push_back(concentration_violation_fraction(p, t, 1, 300, std::log(t)));
    // Monotone nonincreasing trend with one-step slack.
    int inversions = 0;
    for (std::size_t i = 1; i < frac.size(); ++i)
        if (frac[i] > frac[i - 1]) ++inversions;
    CHECK(inversions <= 1);
    CHECK(frac.back() <= frac.front());
}

TEST_CASE("degrees beyond 10 t^(1/(a+2)) are empty in most replicas") {
    const ModelParams p{1.0, 1, 515151};
    const std::uint64_t t = 10000;
    const double cut = 10.0 * std::pow(double(t), 1.0 / (p.a + 2.0));
    CHECK(max_presence_fraction_above(p, t, std::uint32_t(cut), 300) <= 0.05);
}
