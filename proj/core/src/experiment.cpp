#include "hilasso/experiment.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <thread>
#include <utility>

#include <json.hpp>

#include "hilasso/io.hpp"
#include "hilasso/solvers.hpp"

namespace hilasso {

using nlohmann::json;

namespace {

constexpr std::string_view kMetrics[] = {"mse_scaled", "mse_support_scaled", "hamming", "separation_error",
                                         "group_hamming"};

LambdaPair effective_lambda(Model model, LambdaPair grid) {
    switch (model) {
    case Model::lasso: return {grid.lambda1, 0.0};
    case Model::glasso: return {0.0, grid.lambda2};
    default: return grid;
    }
}

std::optional<double> metric_value(const MetricReport& m, std::string_view metric) {
    if (metric == "mse_scaled") return m.mse_scaled;
    if (metric == "mse_support_scaled") return m.mse_support_scaled;
    if (metric == "hamming") return m.hamming;
    if (metric == "separation_error") return m.separation_error;
    if (metric == "group_hamming") return m.group_hamming;
    throw InvalidArgument("unknown metric '" + std::string(metric) + "'");
}

std::size_t model_index(const ExperimentSpec& spec, Model model) {
    for (std::size_t i = 0; i < spec.models.size(); ++i)
        if (spec.models[i] == model) return i;
    throw InvalidArgument("model not part of the experiment");
}

std::size_t row_index(const ExperimentSpec& spec, long long trial, std::size_t mi, std::size_t ai, std::size_t gi) {
    const std::size_t M = spec.models.size();
    const std::size_t A = spec.axis_values.size();
    const std::size_t G = spec.lambda_grid.size();
    return ((static_cast<std::size_t>(trial) * M + mi) * A + ai) * G + gi;
}

// Runs `count` independent jobs on up to `threads` workers.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
}

} // namespace

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::sigma: return "sigma";
    case SweepAxis::k: return "k";
    case SweepAxis::groups: return "groups";
    }
    return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
    for (SweepAxis a : {SweepAxis::sigma, SweepAxis::k, SweepAxis::groups})
        if (to_string(a) == name) return a;
    throw InvalidArgument("unknown axis '" + std::string(name) + "' (expected sigma, k or groups)");
}

void ExperimentSpec::validate() const {
    if (axis_values.empty()) throw InvalidArgument("axis_values must not be empty");
    if (trials < 1) throw InvalidArgument("trials must be at least 1");
    if (lambda_grid.empty()) throw InvalidArgument("lambda_grid must not be empty");
    if (models.empty()) throw InvalidArgument("models must not be empty");
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (models[i] == models[j]) throw InvalidArgument("models lists '" + std::string(to_string(models[i])) + "' twice");
    for (const auto& l : lambda_grid)
        if (!(l.lambda1 >= 0.0) || !(l.lambda2 >= 0.0)) throw InvalidArgument("lambda_grid entries must be nonnegative");
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    solver.validate();
    for (double v : axis_values) at(v).validate();
}

SynthSpec ExperimentSpec::at(double value) const {
    SynthSpec s = base;
    const auto as_index = [&](std::string_view what) {
        if (value != std::floor(value) || value < 1.0)
            throw InvalidArgument(std::string(what) + " axis values must be positive integers");
        return static_cast<Index>(value);
    };
    switch (axis) {
    case SweepAxis::sigma: s.sigma = value; break;
    case SweepAxis::k: s.k = as_index("k"); break;
    case SweepAxis::groups: s.num_groups = as_index("groups"); break;
    }
    return s;
}

ExperimentSpec parse_experiment_spec(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("", "expected a JSON object");

    const auto require = [&](const char* key) -> const json& {
        if (!j.contains(key)) throw SchemaError(key, "missing required field");
        return j[key];
    };
    const auto number_list = [](const json& v, const std::string& path) {
        if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a non-empty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    };

    ExperimentSpec spec;
    const json& axis = require("axis");
    if (!axis.is_string()) throw SchemaError("axis", "expected a string");
    try {
        spec.axis = parse_axis(axis.get<std::string>());
    } catch (const InvalidArgument& e) {
        throw SchemaError("axis", e.what());
    }
    spec.axis_values = number_list(require("axis_values"), "axis_values");
    const json& trials = require("trials");
    if (!trials.is_number_integer() || trials.get<long long>() < 1) throw SchemaError("trials", "expected a positive integer");
    spec.trials = trials.get<int>();

    try {
        spec.base = parse_synth_spec(require("base").dump());
    } catch (const SchemaError& e) {
        throw SchemaError("base." + e.path(), e.what());
    } catch (const InvalidArgument& e) {
        throw SchemaError("base", e.what());
    }

    if (j.contains("lambda_grid")) {
        const json& grid = j["lambda_grid"];
        if (!grid.is_array() || grid.empty()) throw SchemaError("lambda_grid", "expected a non-empty array of pairs");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const std::string path = "lambda_grid[" + std::to_string(i) + "]";
            const auto pair = number_list(grid[i], path);
            if (pair.size() != 2) throw SchemaError(path, "expected [lambda1, lambda2]");
            spec.lambda_grid.push_back({pair[0], pair[1]});
        }
    } else {
        const auto l1 = number_list(require("lambda1_values"), "lambda1_values");
        const auto l2 = number_list(require("lambda2_values"), "lambda2_values");
        for (double a : l1)
            for (double b : l2) spec.lambda_grid.push_back({a, b});
    }

    const json& models = require("models");
    if (!models.is_array() || models.empty()) throw SchemaError("models", "expected a non-empty array");
    for (std::size_t i = 0; i < models.size(); ++i) {
        const std::string path = "models[" + std::to_string(i) + "]";
        if (!models[i].is_string()) throw SchemaError(path, "expected a model name");
        try {
            spec.models.push_back(parse_model(models[i].get<std::string>()));
        } catch (const InvalidArgument& e) {
            throw SchemaError(path, e.what());
        }
    }

    if (j.contains("tau")) {
        if (!j["tau"].is_number()) throw SchemaError("tau", "expected a number");
        spec.tau = j["tau"].get<double>();
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (!s.is_object()) throw SchemaError("solver", "expected an object");
        for (const auto& item : s.items()) {
            const std::string path = "solver." + item.key();
            const json& v = item.value();
            if (item.key() == "max_outer_iter" || item.key() == "max_inner_iter") {
                if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
                (item.key() == "max_outer_iter" ? spec.solver.max_outer_iter : spec.solver.max_inner_iter) = v.get<int>();
            } else if (item.key() == "tol" || item.key() == "admm_c" || item.key() == "inner_tol") {
                if (!v.is_number()) throw SchemaError(path, "expected a number");
                (item.key() == "tol" ? spec.solver.tol : item.key() == "admm_c" ? spec.solver.admm_c : spec.solver.inner_tol) =
                    v.get<double>();
            } else {
                throw SchemaError(path, "unknown solver option");
            }
        }
    }

    for (const auto& item : j.items()) {
        static const char* known[] = {"axis",   "axis_values", "trials", "base", "lambda_grid", "lambda1_values",
                                      "lambda2_values", "models", "tau", "solver"};
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw SchemaError(item.key(), "unknown field");
    }

    try {
        spec.validate();
    } catch (const InvalidArgument& e) {
        throw SchemaError("", e.what());
    }
    return spec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads) {
    spec.validate();
    const std::size_t A = spec.axis_values.size();
    const std::size_t T = static_cast<std::size_t>(spec.trials);
    const std::size_t M = spec.models.size();
    const std::size_t G = spec.lambda_grid.size();

    struct Instance {
        std::shared_ptr<const Dictionary> dictionary;
        std::shared_ptr<const GramMatrix> gram;
        std::vector<Trial> trials;
    };
    std::vector<Instance> instances(A);
    for (std::size_t a = 0; a < A; ++a) {
        const SynthSpec synth = spec.at(spec.axis_values[a]);
        auto& inst = instances[a];
        inst.dictionary = std::make_shared<const Dictionary>(gen_dictionary(synth));
        inst.gram = std::make_shared<const GramMatrix>(*inst.dictionary);
        inst.trials.reserve(T);
        for (std::size_t t = 0; t < T; ++t) inst.trials.push_back(gen_trial(synth, inst.dictionary, t));
    }

    // One solve per distinct effective lambda pair.
    struct Task {
        std::size_t axis, trial, model;
        LambdaPair lambda;
    };
    std::vector<Task> tasks;
    std::vector<std::size_t> task_of_row(T * M * A * G);
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t mi = 0; mi < M; ++mi)
            for (std::size_t a = 0; a < A; ++a) {
                std::map<std::pair<double, double>, std::size_t> seen;
                for (std::size_t g = 0; g < G; ++g) {
                    const LambdaPair eff = effective_lambda(spec.models[mi], spec.lambda_grid[g]);
                    auto [it, inserted] = seen.try_emplace({eff.lambda1, eff.lambda2}, tasks.size());
                    if (inserted) tasks.push_back({a, t, mi, eff});
                    task_of_row[row_index(spec, static_cast<long long>(t), mi, a, g)] = it->second;
                }
            }

    struct Outcome {
        std::optional<MetricReport> metrics;
        bool converged = false;
        int outer_iterations = 0;
        std::string error;
    };
    std::vector<Outcome> outcomes(tasks.size());

    parallel_for(tasks.size(), threads, [&](std::size_t i) {
        const Task& task = tasks[i];
        const Instance& inst = instances[task.axis];
        const Trial& trial = inst.trials[task.trial];
        Outcome& out = outcomes[i];
        try {
            const CodingProblem problem = trial.problem.with_lambdas(task.lambda.lambda1, task.lambda.lambda2);
            const SolverReport report = solve(problem, spec.models[task.model], spec.solver, inst.gram.get());
            out.metrics = evaluate_metrics(*inst.dictionary, report.coefficients, trial.truth, spec.tau);
            out.converged = report.converged;
            out.outer_iterations = report.outer_iterations;
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    ExperimentResult result;
    result.rows.reserve(task_of_row.size());
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t mi = 0; mi < M; ++mi)
            for (std::size_t a = 0; a < A; ++a)
                for (std::size_t g = 0; g < G; ++g) {
                    const Outcome& out = outcomes[task_of_row[row_index(spec, static_cast<long long>(t), mi, a, g)]];
                    ExperimentRow row;
                    row.trial = static_cast<long long>(t);
                    row.model = spec.models[mi];
                    row.axis_index = a;
                    row.axis_value = spec.axis_values[a];
                    row.lambda = spec.lambda_grid[g];
                    row.metrics = out.metrics;
                    row.converged = out.converged;
                    row.outer_iterations = out.outer_iterations;
                    row.error = out.error;
                    result.rows.push_back(std::move(row));
                }

    for (Model model : spec.models)
        for (std::size_t a = 0; a < A; ++a)
            for (std::string_view metric : kMetrics) {
                std::optional<SummaryRow> best;
                for (std::size_t g = 0; g < G; ++g) {
                    const auto mean = mean_metric(spec, result, model, a, g, metric);
                    if (mean && (!best || *mean < best->best_mean))
                        best = SummaryRow{model, spec.axis_values[a], std::string(metric), *mean, spec.lambda_grid[g]};
                }
                if (best) result.summary.push_back(std::move(*best));
            }
    return result;
}

std::optional<double> mean_metric(const ExperimentSpec& spec, const ExperimentResult& result, Model model,
                                  std::size_t axis_index, std::size_t grid_index, std::string_view metric) {
    const std::size_t mi = model_index(spec, model);
    double sum = 0.0;
    for (long long t = 0; t < spec.trials; ++t) {
        const ExperimentRow& row = result.rows.at(row_index(spec, t, mi, axis_index, grid_index));
        if (!row.metrics) return std::nullopt;
        const auto v = metric_value(*row.metrics, metric);
        if (!v) return std::nullopt;
        sum += *v;
    }
    return sum / static_cast<double>(spec.trials);
}

std::string rows_csv(const ExperimentSpec& spec, const ExperimentResult& result) {
    std::string out = "trial,model,axis,axis_value,lambda1,lambda2,mse_scaled,mse_support_scaled,hamming,"
                      "separation_error,group_hamming,converged,outer_iterations\n";
    const std::string axis(to_string(spec.axis));
    for (const ExperimentRow& row : result.rows) {
        out += std::to_string(row.trial) + ',' + std::string(to_string(row.model)) + ',' + axis + ',' +
               format_double(row.axis_value) + ',' + format_double(row.lambda.lambda1) + ',' +
               format_double(row.lambda.lambda2) + ',';
        if (row.metrics) {
            const MetricReport& m = *row.metrics;
            out += format_double(m.mse_scaled) + ',' + format_double(m.mse_support_scaled) + ',' +
                   format_double(m.hamming) + ',' + (m.separation_error ? format_double(*m.separation_error) : "") +
                   ',' + format_double(m.group_hamming) + ',' + (row.converged ? "true" : "false") + ',' +
                   std::to_string(row.outer_iterations);
        } else {
            out += ",,,,,error," + std::to_string(row.outer_iterations);
        }
        out += '\n';
    }
    return out;
}

std::string summary_csv(const ExperimentSpec& spec, const ExperimentResult& result) {
    std::string out = "model,axis,axis_value,metric,best_mean,lambda1,lambda2\n";
    const std::string axis(to_string(spec.axis));
    for (const SummaryRow& row : result.summary)
        out += std::string(to_string(row.model)) + ',' + axis + ',' + format_double(row.axis_value) + ',' + row.metric +
               ',' + format_double(row.best_mean) + ',' + format_double(row.lambda.lambda1) + ',' +
               format_double(row.lambda.lambda2) + '\n';
    return out;
}

} // namespace hilasso
