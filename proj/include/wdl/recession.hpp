#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wdl/erm.hpp"
#include "wdl/neuralnet.hpp"

namespace wdl {

// Quarterly +-1 series; dates are ISO strings for the first day of the
// quarter, strictly increasing.
struct QuarterlySeries {
    std::vector<std::string> dates;
    std::vector<double> values;  // only -1 or +1

    std::size_t size() const { return values.size(); }
};

// Parses a CSV with a date column and a 0/1 indicator column, sorts by date,
// recodes 0 -> -1 and 1 -> +1. Malformed rows, non-0/1 values and duplicate
// dates are fatal, reported with their row number.
QuarterlySeries load_usrecq(const std::string& path);

// One-lag Bernoulli autoregression p_t = (1 + a0 + a1 y_{t-1}) / 2.
double loglik_ar1(const QuarterlySeries& series, double alpha0, double alpha1);

struct Ar1LogitFit {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double log_likelihood = 0.0;
    bool converged = false;
    std::string boundary_note;  // set when the optimum presses the |a0|+|a1| = 1 edge
};

// Coarse 0.01 grid over |a0| + |a1| < 1 followed by Nelder-Mead refinement
// confined to the region.
Ar1LogitFit fit_mle(const QuarterlySeries& series);

struct RecessionResult {
    EvalReport train_report;
    EvalReport test_report;
    Ar1LogitFit fit;
    std::size_t train_pairs = 0;
    std::size_t test_pairs = 0;
    TrainResult training;
};

// Lag-1 supervised pairs, chronological half split (first ceil((T-1)/2)
// pairs train, the rest test), network trained on the train half.
RecessionResult run_recession_pipeline(const QuarterlySeries& series,
                                       const Architecture& arch,
                                       const TrainConfig& config);

void export_recession_report_csv(const RecessionResult& result, const std::string& path);

}  // namespace wdl
