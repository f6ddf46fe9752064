#include "hilasso/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "hilasso/error.hpp"
#include "hilasso/experiment.hpp"
#include "hilasso/io.hpp"
#include "hilasso/metrics.hpp"
#include "hilasso/solvers.hpp"
#include "hilasso/synth.hpp"

namespace hilasso::cli {
namespace fs = std::filesystem;

namespace {

struct GenOptions {
    std::string spec;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::uint64_t trial = 0;
};

struct SolveOptions {
    std::string model;
    std::string dict;
    std::string signals;
    std::string out;
    std::optional<double> lambda1;
    std::optional<double> lambda2;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<int> max_inner_iter;
    std::optional<double> admm_c;
};

struct EvalOptions {
    std::string dict;
    std::string truth;
    std::string report;
    double tau = kDefaultSupportTau;
};

struct ExperimentOptions {
    std::string spec;
    std::string out;
    std::string summary;
    unsigned threads = 1;
};

struct CoherenceOptions {
    std::string dict;
    Index k1 = 1;
    Index k2 = 1;
    std::optional<Index> cross_k;
};

int cmd_gen(const GenOptions& opt, std::ostream& out) {
    SynthSpec spec = parse_synth_spec(read_text_file(opt.spec));
    if (opt.seed) spec.seed = *opt.seed;
    spec.validate();

    auto dictionary = std::make_shared<const Dictionary>(gen_dictionary(spec));
    const Trial trial = gen_trial(spec, dictionary, opt.trial);

    const fs::path dir(opt.out);
    const std::pair<fs::path, std::string> files[] = {
        {dir / "dictionary.json", to_json(*dictionary)},
        {dir / "problem.json", to_json(SignalSet::from(trial.problem))},
        {dir / "ground_truth.json", to_json(trial.truth)},
    };
    fs::create_directories(dir);
    for (const auto& [path, text] : files) {
        write_text_file_atomic(path, text);
        out << path.string() << '\n';
    }
    return kOk;
}

int cmd_solve(const SolveOptions& opt, std::ostream& out) {
    const Model model = parse_model(opt.model);
    SolverConfig config;
    if (opt.tol) config.tol = *opt.tol;
    if (opt.max_iter) config.max_outer_iter = *opt.max_iter;
    if (opt.max_inner_iter) config.max_inner_iter = *opt.max_inner_iter;
    if (opt.admm_c) config.admm_c = *opt.admm_c;
    config.validate();

    auto dictionary = std::make_shared<const Dictionary>(load_dictionary(opt.dict));
    SignalSet signals = load_signals(opt.signals);
    if (opt.lambda1) signals.lambda1 = *opt.lambda1;
    if (opt.lambda2) signals.lambda2 = *opt.lambda2;
    const CodingProblem problem = signals.bind(dictionary);

    StoredReport stored{model, solve(problem, model, config)};
    store(stored, opt.out);

    const SolverReport& r = stored.report;
    out << "model=" << to_string(model) << " converged=" << (r.converged ? "true" : "false")
        << " outer_iterations=" << r.outer_iterations << " objective="
        << format_double(r.objective_trace.empty() ? 0.0 : r.objective_trace.back()) << '\n';
    return r.converged ? kOk : kNotConverged;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
    const Dictionary dictionary = load_dictionary(opt.dict);
    const GroundTruth truth = load_ground_truth(opt.truth);
    const StoredReport stored = load_report(opt.report);
    const Matrix& est = stored.report.coefficients.values;
    if (est.rows() != truth.coefficients.values.rows() || est.cols() != truth.coefficients.values.cols() ||
        est.rows() != dictionary.atom_count())
        throw ShapeError("report is " + std::to_string(est.rows()) + "x" + std::to_string(est.cols()) +
                         ", ground truth is " + std::to_string(truth.coefficients.values.rows()) + "x" +
                         std::to_string(truth.coefficients.values.cols()) + ", dictionary has " +
                         std::to_string(dictionary.atom_count()) + " atoms");

    const MetricReport m = evaluate_metrics(dictionary, stored.report.coefficients, truth, opt.tau);
    out << "model,mse_scaled,mse_support_scaled,hamming,separation_error,group_hamming\n"
        << to_string(stored.model) << ',' << format_double(m.mse_scaled) << ','
        << format_double(m.mse_support_scaled) << ',' << format_double(m.hamming) << ','
        << (m.separation_error ? format_double(*m.separation_error) : std::string()) << ','
        << format_double(m.group_hamming) << '\n';
    return kOk;
}

fs::path default_summary_path(const fs::path& csv) {
    fs::path summary = csv;
    summary.replace_filename(csv.stem().string() + "_summary" + csv.extension().string());
    return summary;
}

int cmd_experiment(const ExperimentOptions& opt, std::ostream& out, std::ostream& err) {
    const ExperimentSpec spec = parse_experiment_spec(read_text_file(opt.spec));
    const fs::path rows_path(opt.out);
    const fs::path summary_path = opt.summary.empty() ? default_summary_path(rows_path) : fs::path(opt.summary);

    const ExperimentResult result = run_experiment(spec, std::max(1u, opt.threads));
    const auto failed = std::count_if(result.rows.begin(), result.rows.end(),
                                      [](const ExperimentRow& row) { return !row.metrics; });
    if (failed > 0) err << "warning: " << failed << " of " << result.rows.size() << " rows failed\n";

    write_text_file_atomic(rows_path, rows_csv(spec, result));
    write_text_file_atomic(summary_path, summary_csv(spec, result));
    out << rows_path.string() << '\n' << summary_path.string() << '\n';
    return kOk;
}

int cmd_coherence(const CoherenceOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.k1 < 1 || opt.k2 < 1 || (opt.cross_k && *opt.cross_k < 1))
        throw InvalidArgument("sparsity levels must be at least 1");
    Dictionary dictionary = load_dictionary(opt.dict);
    if (!dictionary.has_unit_columns(1e-9)) {
        err << "warning: dictionary columns are not unit norm; using a normalized copy\n";
        dictionary = dictionary.with_unit_columns();
    }

    const Index G = dictionary.groups().size();
    std::vector<Matrix> atoms;
    std::vector<double> mu;
    for (Index g = 0; g < G; ++g) {
        atoms.push_back(dictionary.group_atoms(g));
        mu.push_back(mutual_coherence(atoms.back()));
        out << "group " << g + 1 << " atoms=" << atoms.back().cols() << " mutual_coherence=" << format_double(mu.back())
            << '\n';
    }
    out << "uniqueness k1=" << opt.k1 << " k2=" << opt.k2;
    if (opt.cross_k) out << " cross_k=" << *opt.cross_k;
    out << '\n';
    for (Index g = 0; g < G; ++g)
        for (Index h = g + 1; h < G; ++h) {
            const double mu12 = cross_coherence(atoms[static_cast<std::size_t>(g)], atoms[static_cast<std::size_t>(h)]);
            const bool unique = uniqueness_check(opt.k1, opt.k2, mu[static_cast<std::size_t>(g)],
                                                 mu[static_cast<std::size_t>(h)], mu12, opt.cross_k);
            out << "pair " << g + 1 << ' ' << h + 1 << " cross_coherence=" << format_double(mu12)
                << " unique=" << (unique ? "yes" : "no") << '\n';
        }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Structured sparse coding: data generation, solvers, metrics and experiment sweeps", "hilasso"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dictionary, problem and ground truth");
    gen_cmd->add_option("--spec", gen.spec, "SynthSpec JSON file")->required();
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();
    gen_cmd->add_option("--seed", gen.seed, "Override the spec seed");
    gen_cmd->add_option("--trial", gen.trial, "Trial index")->capture_default_str();

    SolveOptions solve_opt;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a coding problem and write a report");
    solve_cmd->add_option("--model", solve_opt.model)
        ->required()
        ->check(CLI::IsMember({"lasso", "glasso", "hilasso", "chilasso"}));
    solve_cmd->add_option("--dict", solve_opt.dict, "Dictionary JSON")->required();
    solve_cmd->add_option("--signals", solve_opt.signals, "Problem JSON")->required();
    solve_cmd->add_option("--out", solve_opt.out, "Report JSON")->required();
    solve_cmd->add_option("--lambda1", solve_opt.lambda1, "Override lambda1");
    solve_cmd->add_option("--lambda2", solve_opt.lambda2, "Override lambda2");
    solve_cmd->add_option("--tol", solve_opt.tol);
    solve_cmd->add_option("--max-iter", solve_opt.max_iter, "Maximum outer iterations");
    solve_cmd->add_option("--max-inner-iter", solve_opt.max_inner_iter);
    solve_cmd->add_option("--admm-c", solve_opt.admm_c);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Score a report against a ground truth");
    eval_cmd->add_option("--dict", eval.dict)->required();
    eval_cmd->add_option("--truth", eval.truth)->required();
    eval_cmd->add_option("--report", eval.report)->required();
    eval_cmd->add_option("--tau", eval.tau, "Relative support threshold")->capture_default_str();

    ExperimentOptions experiment;
    auto* experiment_cmd = app.add_subcommand("experiment", "Run a parameter sweep and write CSV tables");
    experiment_cmd->add_option("--spec", experiment.spec, "ExperimentSpec JSON")->required();
    experiment_cmd->add_option("--out", experiment.out, "Per-row CSV")->required();
    experiment_cmd->add_option("--summary", experiment.summary, "Summary CSV (default: <out>_summary.csv)");
    experiment_cmd->add_option("--threads", experiment.threads)->capture_default_str()->check(CLI::PositiveNumber);

    CoherenceOptions coherence;
    auto* coherence_cmd = app.add_subcommand("coherence", "Group coherences and separation uniqueness verdicts");
    coherence_cmd->add_option("--dict", coherence.dict)->required();
    coherence_cmd->add_option("--k1", coherence.k1)->required();
    coherence_cmd->add_option("--k2", coherence.k2)->required();
    coherence_cmd->add_option("--cross-k", coherence.cross_k);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen, out);
        if (solve_cmd->parsed()) return cmd_solve(solve_opt, out);
        if (eval_cmd->parsed()) return cmd_eval(eval, out);
        if (experiment_cmd->parsed()) return cmd_experiment(experiment, out, err);
        if (coherence_cmd->parsed()) return cmd_coherence(coherence, out, err);
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

} // namespace hilasso::cli
