#include "panceval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace panceval {

namespace {

// Regularized lower incomplete gamma P(a, x) by series expansion; valid for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction (modified
// Lentz); valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

struct RangeIntegrand {
    double q;
    int k;
    double operator()(double z) const {
        const double w = norm_cdf(z + q) - norm_cdf(z);
        return k * norm_pdf(z) * std::pow(w, k - 1);
    }
};

double adaptive_simpson(const RangeIntegrand& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

double integrate(const RangeIntegrand& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double chi2_sf(double x, int df) {
    if (df <= 0) throw Error("chi2_sf: df must be positive");
    if (x < 0.0) throw Error("chi2_sf: x must be non-negative");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * df;
    const double xx = 0.5 * x;
    if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
    return gamma_q_cf(a, xx);
}

double normal_range_sf(double q, int k) {
    if (k < 2) throw Error("normal_range_sf: k must be >= 2");
    if (q <= 0.0) return 1.0;
    // CDF of the range of k iid standard normals; integrand is negligible
    // outside |z| ~ 9 and split at 0 keeps the adaptive refinement local.
    const RangeIntegrand f{q, k};
    const double lo = -9.0 - q, hi = 9.0;
    const double cdf = integrate(f, lo, 0.0, 5e-10) + integrate(f, 0.0, hi, 5e-10);
    return std::clamp(1.0 - cdf, 0.0, 1.0);
}

std::vector<double> midranks(const std::vector<double>& row) {
    const std::size_t k = row.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
    std::vector<double> ranks(k);
    std::size_t i = 0;
    while (i < k) {
        std::size_t j = i;
        while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

TestResult friedman(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n < 2) throw Error("friedman: need at least 2 complete rows");
    const std::size_t k = rows[0].size();
    if (k < 2) throw Error("friedman: need at least 2 models");

    std::vector<double> col_rank_sum(k, 0.0);
    double tie_sum = 0.0;  // sum over rows of sum(t^3 - t) per tie group
    for (const auto& row : rows) {
        if (row.size() != k) throw Error("friedman: ragged input");
        const std::vector<double> r = midranks(row);
        for (std::size_t j = 0; j < k; ++j) col_rank_sum[j] += r[j];
        std::map<double, int> groups;
        for (double v : row) ++groups[v];
        for (const auto& [value, t] : groups)
            tie_sum += static_cast<double>(t) * t * t - t;
    }

    const double kk = static_cast<double>(k);
    const double nn = static_cast<double>(n);
    double ssbn = 0.0;
    for (double s : col_rank_sum) ssbn += s * s;
    const double uncorrected = 12.0 * ssbn / (nn * kk * (kk + 1.0)) - 3.0 * nn * (kk + 1.0);
    const double correction = 1.0 - tie_sum / (nn * (kk * kk * kk - kk));

    TestResult res;
    res.df = static_cast<int>(k) - 1;
    res.method = "friedman";
    if (correction <= 0.0) {
        // Every row fully tied: no information.
        res.statistic = 0.0;
        res.p = 1.0;
        return res;
    }
    res.statistic = std::max(0.0, uncorrected / correction);
    res.p = chi2_sf(res.statistic, res.df);
    return res;
}

std::vector<std::vector<double>> nemenyi(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    if (n < 2) throw Error("nemenyi: need at least 2 complete rows");
    const std::size_t k = rows[0].size();
    if (k < 2) throw Error("nemenyi: need at least 2 models");

    std::vector<double> mean_rank(k, 0.0);
    for (const auto& row : rows) {
        const std::vector<double> r = midranks(row);
        for (std::size_t j = 0; j < k; ++j) mean_rank[j] += r[j];
    }
    for (double& m : mean_rank) m /= static_cast<double>(n);

    const double kk = static_cast<double>(k);
    const double se = std::sqrt(kk * (kk + 1.0) / (12.0 * static_cast<double>(n)));
    std::vector<std::vector<double>> p(k, std::vector<double>(k, 1.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            const double q = std::abs(mean_rank[i] - mean_rank[j]) / se;
            p[i][j] = p[j][i] = normal_range_sf(q, static_cast<int>(k));
        }
    return p;
}

TestResult cochran_q(const std::vector<std::vector<bool>>& rows) {
    if (rows.empty()) throw Error("cochran_q: empty input");
    const std::size_t k = rows[0].size();
    if (k < 2) throw Error("cochran_q: need at least 2 models");

    std::vector<double> col(k, 0.0);
    double row_sum = 0.0, row_sq_sum = 0.0;
    for (const auto& row : rows) {
        if (row.size() != k) throw Error("cochran_q: ragged input");
        double u = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            if (row[j]) {
                col[j] += 1.0;
                u += 1.0;
            }
        row_sum += u;
        row_sq_sum += u * u;
    }

    const double kk = static_cast<double>(k);
    double col_sq_sum = 0.0;
    for (double t : col) col_sq_sum += t * t;

    TestResult res;
    res.df = static_cast<int>(k) - 1;
    res.method = "cochran_q";
    const double denom = kk * row_sum - row_sq_sum;
    if (denom == 0.0) {
        res.statistic = 0.0;
        res.p = 1.0;
        return res;
    }
    res.statistic = (kk - 1.0) * (kk * col_sq_sum - row_sum * row_sum) / denom;
    res.p = chi2_sf(res.statistic, res.df);
    return res;
}

TestResult mcnemar_exact(const std::vector<bool>& a, const std::vector<bool>& b) {
    if (a.size() != b.size()) throw Error("mcnemar_exact: column length mismatch");
    std::size_t disc_a = 0, disc_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) ++disc_a;
        if (!a[i] && b[i]) ++disc_b;
    }

    TestResult res;
    res.df = 0;
    res.method = "mcnemar_exact";
    const std::size_t n = disc_a + disc_b;
    res.statistic = static_cast<double>(std::min(disc_a, disc_b));
    if (n == 0) {
        res.p = 1.0;
        return res;
    }
    // Two-sided exact binomial: 2 * P(X <= min(b,c)) under Bin(n, 1/2).
    const std::size_t m = std::min(disc_a, disc_b);
    double term = std::pow(0.5, static_cast<double>(n));  // C(n,0) / 2^n
    double tail = term;
    for (std::size_t i = 1; i <= m; ++i) {
        term *= static_cast<double>(n - i + 1) / static_cast<double>(i);
        tail += term;
    }
    res.p = std::min(1.0, 2.0 * tail);
    return res;
}

double bonferroni(double p, int m) {
    if (m < 1) throw Error("bonferroni: m must be >= 1");
    return std::min(1.0, static_cast<double>(m) * p);
}

StudyResult run_study(const std::vector<CaseMetrics>& metrics) {
    // Model columns in order of first appearance.
    std::vector<std::string> models;
    std::map<std::string, std::size_t> model_idx;
    for (const auto& m : metrics)
        if (model_idx.emplace(m.model_id, models.size()).second)
            models.push_back(m.model_id);
    const std::size_t k = models.size();
    if (k < 2) throw Error("run_study: need at least 2 models");

    // Group rows by case, preserving first-appearance case order.
    std::vector<std::string> case_order;
    std::map<std::string, std::vector<const CaseMetrics*>> by_case;
    for (const auto& m : metrics) {
        auto [it, inserted] = by_case.try_emplace(m.case_id);
        if (inserted) {
            it->second.assign(k, nullptr);
            case_order.push_back(m.case_id);
        }
        it->second[model_idx.at(m.model_id)] = &m;
    }

    StudyResult study;
    std::vector<std::vector<double>> dsc_rows;
    std::vector<std::vector<double>> hd_rows;
    std::vector<std::vector<bool>> det_rows;
    for (const auto& case_id : case_order) {
        const auto& cols = by_case.at(case_id);
        const bool complete = std::all_of(cols.begin(), cols.end(),
                                          [](const CaseMetrics* p) { return p && p->dsc; });
        if (!complete) {
            ++study.n_dropped_incomplete;
            continue;
        }
        ++study.n_complete;
        std::vector<double> dsc(k), hd(k);
        std::vector<bool> det(k);
        bool hd_complete = true;
        for (std::size_t j = 0; j < k; ++j) {
            dsc[j] = *cols[j]->dsc;
            det[j] = cols[j]->detected;
            if (cols[j]->hd_mm) hd[j] = *cols[j]->hd_mm;
            else hd_complete = false;
        }
        dsc_rows.push_back(std::move(dsc));
        det_rows.push_back(std::move(det));
        if (hd_complete) hd_rows.push_back(std::move(hd));
        else ++study.n_dropped_missing_hd;
    }
    if (study.n_complete == 0) throw Error("run_study: zero complete cases");

    // Per-model summaries.
    for (std::size_t j = 0; j < k; ++j) {
        ModelSummary s;
        s.model_id = models[j];
        s.n_cases = dsc_rows.size();
        double sum = 0.0, sum2 = 0.0;
        for (const auto& r : dsc_rows) {
            sum += r[j];
            sum2 += r[j] * r[j];
        }
        const double n = static_cast<double>(dsc_rows.size());
        s.dsc_mean = sum / n;
        s.dsc_sd = n > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0))) : 0.0;
        sum = sum2 = 0.0;
        for (const auto& r : hd_rows) {
            sum += r[j];
            sum2 += r[j] * r[j];
        }
        const double nh = static_cast<double>(hd_rows.size());
        s.hd_mean = nh > 0 ? sum / nh : 0.0;
        s.hd_sd = nh > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / nh) / (nh - 1.0))) : 0.0;
        for (const auto& r : det_rows)
            if (!r[j]) ++s.detection_failures;
        study.models.push_back(std::move(s));
    }

    study.friedman_dsc = friedman(dsc_rows);
    study.friedman_hd = hd_rows.size() >= 2 ? friedman(hd_rows) : TestResult{0, 0, 1.0, "friedman"};
    study.cochran_detection = cochran_q(det_rows);
    study.nemenyi_dsc = nemenyi(dsc_rows);
    study.nemenyi_hd = hd_rows.size() >= 2
        ? nemenyi(hd_rows)
        : std::vector<std::vector<double>>(k, std::vector<double>(k, 1.0));

    const int m_comparisons = static_cast<int>(k * (k - 1) / 2);
    study.mcnemar_detection.assign(k, std::vector<double>(k, 1.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<bool> ci(det_rows.size()), cj(det_rows.size());
            for (std::size_t r = 0; r < det_rows.size(); ++r) {
                ci[r] = det_rows[r][i];
                cj[r] = det_rows[r][j];
            }
            const double p = bonferroni(mcnemar_exact(ci, cj).p, m_comparisons);
            study.mcnemar_detection[i][j] = study.mcnemar_detection[j][i] = p;
        }
    return study;
}

}  // namespace panceval
