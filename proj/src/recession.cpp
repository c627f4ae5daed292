#include "wdl/recession.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "wdl/csv.hpp"

namespace wdl {

namespace {

bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

QuarterlySeries load_usrecq(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error("empty data file: " + path);
    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2)
        throw std::runtime_error("expected a date column and an indicator column");

    std::vector<std::pair<std::string, double>> rows;
    std::set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::size_t rowno = i + 1;
        const auto cells = split_csv_line(lines[i]);
        if (cells.size() < 2)
            throw std::runtime_error("row " + std::to_string(rowno) + ": too few columns");
        if (!looks_like_iso_date(cells[0]))
            throw std::runtime_error("row " + std::to_string(rowno) + ": bad date '" +
                                     cells[0] + "'");
        if (!seen.insert(cells[0]).second)
            throw std::runtime_error("row " + std::to_string(rowno) + ": duplicate date " +
                                     cells[0]);
        double recoded;
        if (cells[1] == "0")
            recoded = -1.0;
        else if (cells[1] == "1")
            recoded = 1.0;
        else
            throw std::runtime_error("row " + std::to_string(rowno) +
                                     ": indicator must be 0 or 1, got '" + cells[1] + "'");
        rows.emplace_back(cells[0], recoded);
    }
    if (rows.empty()) throw std::runtime_error("no data rows in " + path);
    std::sort(rows.begin(), rows.end());  // ISO dates sort lexicographically

    QuarterlySeries series;
    series.dates.reserve(rows.size());
    series.values.reserve(rows.size());
    for (auto& [d, v] : rows) {
        series.dates.push_back(std::move(d));
        series.values.push_back(v);
    }
    return series;
}

double loglik_ar1(const QuarterlySeries& series, double alpha0, double alpha1) {
    if (!(std::fabs(alpha0) + std::fabs(alpha1) < 1.0))
        throw std::invalid_argument("parameters must satisfy |a0| + |a1| < 1");
    if (series.size() < 2) throw std::invalid_argument("series too short");
    double ll = 0.0;
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double p = (1.0 + alpha0 + alpha1 * series.values[t - 1]) * 0.5;
        ll += series.values[t] > 0.0 ? std::log(p) : std::log(1.0 - p);
    }
    return ll;
}

namespace {

constexpr double kBoundaryTol = 1e-3;

double penalized_loglik(const QuarterlySeries& s, double a0, double a1) {
    if (std::fabs(a0) + std::fabs(a1) >= 1.0 - 1e-9)
        return -std::numeric_limits<double>::infinity();
    return loglik_ar1(s, a0, a1);
}

}  // namespace

Ar1LogitFit fit_mle(const QuarterlySeries& series) {
    if (series.size() < 10) throw std::invalid_argument("series too short for the MLE");

    // coarse grid over the open diamond
    double best0 = 0.0, best1 = 0.0;
    double best = penalized_loglik(series, 0.0, 0.0);
    for (int i = -99; i <= 99; ++i) {
        for (int j = -99; j <= 99; ++j) {
            const double a0 = 0.01 * i, a1 = 0.01 * j;
            if (std::fabs(a0) + std::fabs(a1) >= 1.0) continue;
            const double ll = loglik_ar1(series, a0, a1);
            if (ll > best) {
                best = ll;
                best0 = a0;
                best1 = a1;
            }
        }
    }

    // Nelder-Mead refinement confined to the region
    struct Vertex {
        double a0, a1, f;
    };
    auto eval = [&](double a0, double a1) { return penalized_loglik(series, a0, a1); };
    std::array<Vertex, 3> sx{{{best0, best1, best},
                              {best0 + 0.02, best1, eval(best0 + 0.02, best1)},
                              {best0, best1 + 0.02, eval(best0, best1 + 0.02)}}};
    auto diameter = [&]() {
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                d = std::max(d, std::hypot(sx[i].a0 - sx[j].a0, sx[i].a1 - sx[j].a1));
        return d;
    };
    bool converged = false;
    for (int it = 0; it < 500; ++it) {
        std::sort(sx.begin(), sx.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
        if (diameter() < 1e-6) {
            converged = true;
            break;
        }
        const double c0 = (sx[0].a0 + sx[1].a0) / 2.0;
        const double c1 = (sx[0].a1 + sx[1].a1) / 2.0;
        const double r0 = c0 + (c0 - sx[2].a0), r1 = c1 + (c1 - sx[2].a1);
        const double fr = eval(r0, r1);
        if (fr > sx[0].f) {
            const double e0 = c0 + 2.0 * (c0 - sx[2].a0), e1 = c1 + 2.0 * (c1 - sx[2].a1);
            const double fe = eval(e0, e1);
            sx[2] = fe > fr ? Vertex{e0, e1, fe} : Vertex{r0, r1, fr};
        } else if (fr > sx[1].f) {
            sx[2] = {r0, r1, fr};
        } else {
            const double k0 = c0 + 0.5 * (sx[2].a0 - c0), k1 = c1 + 0.5 * (sx[2].a1 - c1);
            const double fk = eval(k0, k1);
            if (fk > sx[2].f) {
                sx[2] = {k0, k1, fk};
            } else {
                for (int i = 1; i < 3; ++i) {
                    sx[i].a0 = sx[0].a0 + 0.5 * (sx[i].a0 - sx[0].a0);
                    sx[i].a1 = sx[0].a1 + 0.5 * (sx[i].a1 - sx[0].a1);
                    sx[i].f = eval(sx[i].a0, sx[i].a1);
                }
            }
        }
    }
    std::sort(sx.begin(), sx.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });

    Ar1LogitFit fit;
    fit.alpha0 = sx[0].a0;
    fit.alpha1 = sx[0].a1;
    fit.log_likelihood = sx[0].f;
    fit.converged = converged;
    if (1.0 - (std::fabs(fit.alpha0) + std::fabs(fit.alpha1)) < kBoundaryTol) {
        fit.converged = false;
        fit.boundary_note = std::string("likelihood pushes toward the |a0|+|a1| = 1 boundary (a0 ") +
                            (fit.alpha0 >= 0 ? "+" : "-") + ", a1 " +
                            (fit.alpha1 >= 0 ? "+" : "-") + ")";
    }
    return fit;
}

RecessionResult run_recession_pipeline(const QuarterlySeries& series,
                                       const Architecture& arch,
                                       const TrainConfig& config) {
    const std::size_t T = series.size();
    if (T < 4) throw std::invalid_argument("series too short for the pipeline");
    if (arch.input_dim() != 1)
        throw std::invalid_argument("pipeline uses the single lag y_{t-1} as input");

    const std::size_t pairs = T - 1;
    const std::size_t n_train = (pairs + 1) / 2;

    Dataset train, test;
    train.dim = test.dim = 1;
    for (std::size_t t = 1; t < T; ++t) {
        Dataset& dst = t <= n_train ? train : test;
        dst.inputs.push_back(series.values[t - 1]);
        dst.labels.push_back(series.values[t]);
    }

    RecessionResult result;
    result.train_pairs = train.size();
    result.test_pairs = test.size();
    result.training = train_erm(train, arch, config);
    result.train_report = empirical_01_risk(arch, result.training.params, train);
    result.test_report = empirical_01_risk(arch, result.training.params, test);
    result.fit = fit_mle(series);
    return result;
}

void export_recession_report_csv(const RecessionResult& r, const std::string& path) {
    CsvWriter w(path);
    w.row({"name", "value"});
    w.row({"train_pairs", std::to_string(r.train_pairs)});
    w.row({"test_pairs", std::to_string(r.test_pairs)});
    w.row({"mle_alpha0", format_double(r.fit.alpha0)});
    w.row({"mle_alpha1", format_double(r.fit.alpha1)});
    w.row({"mle_loglik", format_double(r.fit.log_likelihood)});
    w.row({"mle_converged", r.fit.converged ? "1" : "0"});
    w.row({"test_hinge_risk", format_double(r.test_report.hinge_risk)});
    w.row({"test_accuracy", format_double(r.test_report.accuracy)});
    w.row({"test_confusion_mm", std::to_string(r.test_report.confusion[0][0])});
    w.row({"test_confusion_mp", std::to_string(r.test_report.confusion[0][1])});
    w.row({"test_confusion_pm", std::to_string(r.test_report.confusion[1][0])});
    w.row({"test_confusion_pp", std::to_string(r.test_report.confusion[1][1])});
    w.row({"recession_recall",
           format_double(static_cast<double>(r.test_report.confusion[1][1]) /
                         std::max<std::size_t>(1, r.test_report.confusion[1][0] +
                                                      r.test_report.confusion[1][1]))});
    w.row({"train_accuracy", format_double(r.train_report.accuracy)});
    w.row({"train_hinge_risk", format_double(r.train_report.hinge_risk)});
}

}  // namespace wdl
