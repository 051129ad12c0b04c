#pragma once

// Nonparametric paired test battery: Friedman and Cochran's Q omnibus tests,
// Nemenyi and exact-binomial McNemar post-hoc tests with Bonferroni
// correction, plus the chi-square and normal-range tail functions they need.

#include <cstddef>
#include <string>
#include <vector>

#include "panceval/metrics.hpp"

namespace panceval {

struct TestResult {
    double statistic = 0.0;
    int df = 0;
    double p = 1.0;
    std::string method;
};

// Upper-tail probability of chi-square with df degrees of freedom, via the
// regularized incomplete gamma function (series + continued fraction);
// absolute error <= 1e-10.
double chi2_sf(double x, int df);

// P(range of k iid standard normals > q), by adaptive quadrature of
// k * phi(z) * (Phi(z+q) - Phi(z))^(k-1); absolute error well under 1e-6.
double normal_range_sf(double q, int k);

// Midranks of one row of measurements (average ranks on ties).
std::vector<double> midranks(const std::vector<double>& row);

// rows: n complete blocks, k measurements each. Tie-corrected Friedman
// chi-square with p from chi2_sf(stat, k-1); fully tied data gives stat 0,
// p 1.
TestResult friedman(const std::vector<std::vector<double>>& rows);

// Pairwise Nemenyi p-values following Friedman: q_ij = |meanrank_i -
// meanrank_j| / sqrt(k(k+1)/(12n)), referred to the range distribution of k
// standard normals. Symmetric with unit diagonal.
std::vector<std::vector<double>> nemenyi(const std::vector<std::vector<double>>& rows);

// rows: n blocks of k binary outcomes.
TestResult cochran_q(const std::vector<std::vector<bool>>& rows);

// Exact two-sided binomial McNemar test from two paired boolean columns.
TestResult mcnemar_exact(const std::vector<bool>& a, const std::vector<bool>& b);

// min(1, m * p)
double bonferroni(double p, int m);

struct ModelSummary {
    std::string model_id;
    std::size_t n_cases = 0;
    double dsc_mean = 0.0, dsc_sd = 0.0;
    double hd_mean = 0.0, hd_sd = 0.0;
    std::size_t detection_failures = 0;
};

struct StudyResult {
    std::vector<ModelSummary> models;           // column order of all tables
    std::size_t n_complete = 0;                 // cases present under every model
    std::size_t n_dropped_incomplete = 0;       // cases missing under some model
    std::size_t n_dropped_missing_hd = 0;       // complete cases dropped for HD
    TestResult friedman_dsc;
    TestResult friedman_hd;
    TestResult cochran_detection;
    std::vector<std::vector<double>> nemenyi_dsc;
    std::vector<std::vector<double>> nemenyi_hd;
    // Bonferroni-corrected exact McNemar p-values (m = k(k-1)/2).
    std::vector<std::vector<double>> mcnemar_detection;
};

// Full Table-1/Table-2 battery over per-case metrics rows. Model column
// order follows first appearance in the input. Cases not evaluated under
// every model are dropped listwise.
StudyResult run_study(const std::vector<CaseMetrics>& metrics);

}  // namespace panceval
