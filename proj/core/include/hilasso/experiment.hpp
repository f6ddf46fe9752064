#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hilasso/metrics.hpp"
#include "hilasso/model.hpp"
#include "hilasso/synth.hpp"

namespace hilasso {

enum class SweepAxis { sigma, k, groups };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

struct LambdaPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// A sweep over one synthetic parameter. Every (axis value, trial) instance is
/// solved by every model at every grid point; lasso ignores lambda2 and group
/// lasso ignores lambda1.
struct ExperimentSpec {
    SweepAxis axis = SweepAxis::sigma;
    std::vector<double> axis_values;
    int trials = 1;
    SynthSpec base;
    std::vector<LambdaPair> lambda_grid;
    std::vector<Model> models;
    double tau = kDefaultSupportTau;
    SolverConfig solver;

    void validate() const;
    /// `base` with the axis parameter set to `value`.
    SynthSpec at(double value) const;
};

/// JSON form:
///   {"axis": "sigma", "axis_values": [...], "trials": 10, "base": {SynthSpec},
///    "lambda_grid": [[l1, l2], ...]  or  "lambda1_values": [...], "lambda2_values": [...],
///    "models": ["lasso", ...], "tau": 1e-4,
///    "solver": {"tol", "max_outer_iter", "max_inner_iter", "admm_c", "inner_tol"}}
/// The two value lists expand to their Cartesian product (lambda1 major).
ExperimentSpec parse_experiment_spec(std::string_view text);

struct ExperimentRow {
    long long trial = 0;
    Model model = Model::lasso;
    std::size_t axis_index = 0;
    double axis_value = 0.0;
    LambdaPair lambda;
    std::optional<MetricReport> metrics; // empty when the solve failed
    bool converged = false;
    int outer_iterations = 0;
    std::string error;
};

struct SummaryRow {
    Model model = Model::lasso;
    double axis_value = 0.0;
    std::string metric;
    double best_mean = 0.0;
    LambdaPair lambda;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;    // ordered by trial, model, axis value, grid index
    std::vector<SummaryRow> summary;    // ordered by model, axis value, metric
};

/// Runs every solve on up to `threads` workers. Output does not depend on
/// the thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

/// Header: trial,model,axis,axis_value,lambda1,lambda2,mse_scaled,
/// mse_support_scaled,hamming,separation_error,group_hamming,converged,outer_iterations
/// A failed solve leaves the metric fields empty and writes "error" as converged.
std::string rows_csv(const ExperimentSpec& spec, const ExperimentResult& result);
/// Header: model,axis,axis_value,metric,best_mean,lambda1,lambda2
std::string summary_csv(const ExperimentSpec& spec, const ExperimentResult& result);

/// Mean over trials of one metric for (model, axis index, grid index); used by
/// the summary. Returns nullopt when any trial failed.
std::optional<double> mean_metric(const ExperimentSpec& spec, const ExperimentResult& result, Model model,
                                  std::size_t axis_index, std::size_t grid_index, std::string_view metric);

} // namespace hilasso
