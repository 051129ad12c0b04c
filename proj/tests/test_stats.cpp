#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "panceval/rng.hpp"
#include "panceval/stats.hpp"
#include "oracles.hpp"

using namespace panceval;

TEST_CASE("chi2_sf closed forms") {
    // df = 2: sf(x) = exp(-x/2).
    for (double x : {0.1, 1.0, 2.5, 6.0, 16.0, 40.0})
        CHECK(chi2_sf(x, 2) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
    // df = 1: sf(x) = erfc(sqrt(x/2)).
    for (double x : {0.5, 1.0, 3.84, 10.0})
        CHECK(chi2_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(x / 2.0))).epsilon(1e-10));
    // df = 4: sf(x) = (1 + x/2) exp(-x/2).
    for (double x : {1.0, 5.0, 12.0})
        CHECK(chi2_sf(x, 4) ==
              doctest::Approx((1.0 + x / 2.0) * std::exp(-x / 2.0)).epsilon(1e-12));
    CHECK(chi2_sf(0.0, 3) == 1.0);
    CHECK_THROWS_AS(chi2_sf(-1.0, 3), Error);
}

TEST_CASE("midranks handle ties") {
    CHECK(midranks({3.0, 1.0, 2.0}) == std::vector<double>{3.0, 1.0, 2.0});
    CHECK(midranks({1.0, 1.0, 2.0}) == std::vector<double>{1.5, 1.5, 3.0});
    CHECK(midranks({5.0, 5.0, 5.0}) == std::vector<double>{2.0, 2.0, 2.0});
    CHECK(midranks({2.0, 1.0, 2.0, 1.0}) == std::vector<double>{3.5, 1.5, 3.5, 1.5});
}

TEST_CASE("friedman on a fully ordered design") {
    // Three blocks, each ranking the models 1 < 2 < 3: stat 2n = 6, df 2.
    const std::vector<std::vector<double>> rows(3, {1.0, 2.0, 3.0});
    const TestResult r = friedman(rows);
    CHECK(r.statistic == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.df == 2);
    CHECK(r.p == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
}

TEST_CASE("friedman fully tied rows give the null result") {
    const std::vector<std::vector<double>> rows(4, {2.0, 2.0, 2.0});
    const TestResult r = friedman(rows);
    CHECK(r.statistic == 0.0);
    CHECK(r.p == 1.0);
}

TEST_CASE("friedman matches the definitional oracle on random data") {
    Rng rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.bounded(10);
        const std::size_t k = 2 + rng.bounded(4);
        std::vector<std::vector<double>> rows(n, std::vector<double>(k));
        for (auto& row : rows)
            for (auto& v : row)
                v = static_cast<double>(rng.bounded(5));  // coarse values force ties
        const TestResult r = friedman(rows);
        CHECK(r.statistic == doctest::Approx(oracle::friedman_statistic(rows)).epsilon(1e-12));
        if (static_cast<int>(r.df) == static_cast<int>(k) - 1 && k == 3)
            CHECK(r.p == doctest::Approx(std::exp(-r.statistic / 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("friedman is invariant to monotone transforms and block order") {
    Rng rng(88);
    std::vector<std::vector<double>> rows(6, std::vector<double>(4));
    for (auto& row : rows)
        for (auto& v : row) v = rng.uniform();
    const TestResult base = friedman(rows);

    std::vector<std::vector<double>> cubed = rows;
    for (auto& row : cubed)
        for (auto& v : row) v = v * v * v;
    CHECK(friedman(cubed).statistic == doctest::Approx(base.statistic).epsilon(1e-12));

    std::vector<std::vector<double>> reversed(rows.rbegin(), rows.rend());
    CHECK(friedman(reversed).statistic == doctest::Approx(base.statistic).epsilon(1e-12));
}

TEST_CASE("friedman agrees with the exact permutation distribution") {
    const std::vector<std::vector<double>> rows = {
        {0.9, 0.5, 0.7}, {0.8, 0.4, 0.6}, {0.7, 0.6, 0.9}, {0.95, 0.5, 0.55}};
    const TestResult r = friedman(rows);
    const double exact = oracle::friedman_permutation_p(rows);
    // The chi-square reference is an approximation; it must sit near the
    // exact tail probability for this size, not match it.
    CHECK(std::abs(r.p - exact) < 0.08);
    CHECK(r.statistic == doctest::Approx(oracle::friedman_statistic(rows)).epsilon(1e-12));
}

TEST_CASE("normal_range_sf matches tabulated studentized-range endpoints") {
    // P(range > 0) = 1 for any k >= 2.
    CHECK(normal_range_sf(0.0, 3) == doctest::Approx(1.0).epsilon(1e-9));
    // Large q drives the tail to zero.
    CHECK(normal_range_sf(12.0, 3) < 1e-8);
    // Monotone decreasing in q.
    double prev = 1.0;
    for (double q = 0.5; q <= 6.0; q += 0.5) {
        const double v = normal_range_sf(q, 4);
        CHECK(v < prev);
        prev = v;
    }
    // k = 2: range of two normals is |N(0,2)|, sf(q) = 2 Phi(-q / sqrt 2).
    for (double q : {0.5, 1.0, 2.0, 3.5})
        CHECK(normal_range_sf(q, 2) ==
              doctest::Approx(std::erfc(q / 2.0)).epsilon(1e-9));
}

TEST_CASE("normal_range_sf matches Monte Carlo") {
    for (double q : {1.0, 2.0, 3.0})
        CHECK(std::abs(normal_range_sf(q, 3) - oracle::mc_range_sf(q, 3, 2'000'000, 99)) <
              2e-3);
}

TEST_CASE("nemenyi matrix is symmetric with unit diagonal") {
    Rng rng(313);
    std::vector<std::vector<double>> rows(8, std::vector<double>(3));
    for (auto& row : rows)
        for (auto& v : row) v = rng.uniform();
    const auto p = nemenyi(rows);
    REQUIRE(p.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p[i][i] == 1.0);
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(p[i][j] == p[j][i]);
            CHECK(p[i][j] >= 0.0);
            CHECK(p[i][j] <= 1.0);
        }
    }
}

TEST_CASE("nemenyi separates a dominant model") {
    // Model 0 always best, models 1 and 2 identical: p(0,1) small, p(1,2) = 1.
    std::vector<std::vector<double>> rows(20, {0.9, 0.5, 0.5});
    const auto p = nemenyi(rows);
    CHECK(p[0][1] < 0.01);
    CHECK(p[1][2] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cochran_q on the one-model-fails pattern") {
    // 16 blocks, 3 models; model B fails detection in 8 of them.
    std::vector<std::vector<bool>> rows;
    for (int i = 0; i < 8; ++i) rows.push_back({true, false, true});
    for (int i = 0; i < 8; ++i) rows.push_back({true, true, true});
    const TestResult r = cochran_q(rows);
    CHECK(r.statistic == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(r.df == 2);
    CHECK(r.p == doctest::Approx(std::exp(-8.0)).epsilon(1e-10));
    CHECK(r.statistic ==
          doctest::Approx(oracle::cochran_q_statistic(rows)).epsilon(1e-12));
}

TEST_CASE("cochran_q all-identical columns give p 1") {
    std::vector<std::vector<bool>> rows(10, {true, true, true});
    const TestResult r = cochran_q(rows);
    CHECK(r.statistic == 0.0);
    CHECK(r.p == 1.0);
}

TEST_CASE("cochran_q ignores all-equal rows") {
    // Rows where every model agrees contribute nothing.
    std::vector<std::vector<bool>> rows;
    for (int i = 0; i < 5; ++i) rows.push_back({true, false, true});
    const double base = cochran_q(rows).statistic;
    rows.push_back({true, true, true});
    rows.push_back({false, false, false});
    CHECK(cochran_q(rows).statistic == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("cochran_q matches the oracle on random tables") {
    Rng rng(606);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.bounded(20);
        const std::size_t k = 2 + rng.bounded(4);
        std::vector<std::vector<bool>> rows(n, std::vector<bool>(k));
        for (auto& row : rows)
            for (std::size_t j = 0; j < k; ++j) row[j] = rng.bounded(2) == 1;
        const TestResult r = cochran_q(rows);
        CHECK(r.statistic ==
              doctest::Approx(oracle::cochran_q_statistic(rows)).epsilon(1e-10));
    }
}

TEST_CASE("mcnemar_exact known values") {
    // b = 8 discordant pairs all one way: p = 2 * (1/2)^8 * C(8,0) = 1/128.
    std::vector<bool> a(20, true), b(20, true);
    for (int i = 0; i < 8; ++i) b[i] = false;
    const TestResult r = mcnemar_exact(a, b);
    CHECK(r.p == 0.0078125);
    CHECK(r.statistic == 0.0);  // min(b, c)

    // No discordant pairs: p = 1.
    CHECK(mcnemar_exact(a, a).p == 1.0);

    // b = c: the most extreme balanced split, p = 1 (two-sided sum covers all).
    std::vector<bool> c = a, d = a;
    c[0] = false;
    d[1] = false;
    CHECK(mcnemar_exact(c, d).p == 1.0);

    // b = 5, c = 1: p = 2 * sum_{i<=1} C(6,i) / 64 = 14/64.
    std::vector<bool> e(20, true), f(20, true);
    for (int i = 0; i < 5; ++i) e[i] = false;
    f[10] = false;
    CHECK(mcnemar_exact(f, e).p == doctest::Approx(14.0 / 64.0).epsilon(1e-12));
    CHECK(mcnemar_exact(e, f).p == doctest::Approx(14.0 / 64.0).epsilon(1e-12));
}

TEST_CASE("bonferroni clamps at 1") {
    CHECK(bonferroni(0.0078125, 3) == doctest::Approx(0.0234375).epsilon(1e-15));
    CHECK(bonferroni(0.5, 3) == 1.0);
    CHECK(bonferroni(0.0, 10) == 0.0);
}

namespace {

std::vector<CaseMetrics> synthetic_metrics() {
    // 12 cases, 3 models. Model m2 misses the lesion in the first 8 cases
    // (imputed HD); everyone else is near-perfect.
    std::vector<CaseMetrics> rows;
    for (int c = 0; c < 12; ++c) {
        const std::string id = "case_" + std::to_string(c);
        for (const std::string model : {"m1", "m2", "m3"}) {
            CaseMetrics m;
            m.case_id = id;
            m.model_id = model;
            if (model == "m2" && c < 8) {
                m.dsc = 0.0;
                m.hd_mm = 170.0;
                m.detected = false;
                m.hd_imputed = true;
            } else {
                m.dsc = 0.9 + 0.001 * c + (model == "m1" ? 0.01 : 0.0);
                m.hd_mm = 3.0 - (model == "m1" ? 0.5 : 0.0) + 0.01 * c;
                m.detected = true;
            }
            rows.push_back(std::move(m));
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("run_study on the synthetic failure pattern") {
    const StudyResult s = run_study(synthetic_metrics());
    REQUIRE(s.models.size() == 3);
    CHECK(s.models[0].model_id == "m1");
    CHECK(s.models[1].model_id == "m2");
    CHECK(s.models[2].model_id == "m3");
    CHECK(s.n_complete == 12);
    CHECK(s.n_dropped_incomplete == 0);
    CHECK(s.n_dropped_missing_hd == 0);

    CHECK(s.models[1].detection_failures == 8);
    CHECK(s.models[0].detection_failures == 0);
    CHECK(s.models[1].dsc_mean < s.models[2].dsc_mean);
    CHECK(s.models[1].hd_mean > s.models[2].hd_mean);

    CHECK(s.cochran_detection.statistic == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(s.cochran_detection.p == doctest::Approx(std::exp(-8.0)).epsilon(1e-10));

    // Exact McNemar with Bonferroni m = 3: failing model vs either other.
    CHECK(s.mcnemar_detection[0][1] == doctest::Approx(0.0234375).epsilon(1e-15));
    CHECK(s.mcnemar_detection[1][2] == doctest::Approx(0.0234375).epsilon(1e-15));
    CHECK(s.mcnemar_detection[0][2] == 1.0);

    CHECK(s.friedman_dsc.p < 0.001);
    CHECK(s.friedman_hd.p < 0.001);
    CHECK(s.nemenyi_dsc[0][1] < 0.05);
}

TEST_CASE("run_study drops incomplete cases listwise") {
    auto rows = synthetic_metrics();
    // Remove case_3 under m2 only.
    rows.erase(std::find_if(rows.begin(), rows.end(), [](const CaseMetrics& m) {
        return m.case_id == "case_3" && m.model_id == "m2";
    }));
    const StudyResult s = run_study(rows);
    CHECK(s.n_complete == 11);
    CHECK(s.n_dropped_incomplete == 1);
    for (const auto& m : s.models) CHECK(m.n_cases == 11);
}

TEST_CASE("run_study drops complete cases with missing HD from the HD battery") {
    auto rows = synthetic_metrics();
    for (auto& m : rows)
        if (m.case_id == "case_5" && m.model_id == "m3") m.hd_mm.reset();
    const StudyResult s = run_study(rows);
    CHECK(s.n_complete == 12);
    CHECK(s.n_dropped_missing_hd == 1);
    // DSC battery still sees all 12 cases.
    CHECK(s.models[0].n_cases == 12);
}
