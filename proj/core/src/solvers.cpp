#include "hilasso/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "hilasso/prox.hpp"

namespace hilasso {

GramMatrix::GramMatrix(const Dictionary& dictionary)
    : gram_(dictionary.atoms().transpose() * dictionary.atoms()), source_(&dictionary) {}

ColumnDataTerm::ColumnDataTerm(const CodingProblem& problem, Index j, const GramMatrix* gram)
    : atoms_(&problem.dictionary().atoms()), gram_(nullptr), signal_(problem.signals().col(j)) {
    if (problem.masked()) mask_ = problem.masks()->col(j);
    if (gram && gram->source() == &problem.dictionary() && !mask_) {
        gram_ = &gram->values();
        correlation_ = atoms_->transpose() * signal_;
    }
}

double ColumnDataTerm::evaluate(const Vector& a, Vector& grad) const {
    Vector residual = -signal_;
    Index nonzeros = 0;
    for (Index i = 0; i < a.size(); ++i)
        if (a(i) != 0.0) {
            residual.noalias() += a(i) * atoms_->col(i);
            ++nonzeros;
        }
    if (mask_) residual = mask_->select(residual, 0.0);

    // p * nnz flops through the Gram matrix versus m * p through D^T.
    if (gram_ && nonzeros < atoms_->rows()) {
        grad = -correlation_;
        for (Index i = 0; i < a.size(); ++i)
            if (a(i) != 0.0) grad.noalias() += a(i) * gram_->col(i);
    } else {
        grad.noalias() = atoms_->transpose() * residual;
    }
    return 0.5 * residual.squaredNorm();
}

double admm_column_smooth(const ColumnDataTerm& data, const Vector& p, const Vector& b, double c, const Vector& a,
                          Vector& grad) {
    const double value = data.evaluate(a, grad);
    const Vector diff = a - b;
    grad.noalias() += p + c * diff;
    return value + p.dot(a) + 0.5 * c * diff.squaredNorm();
}

namespace {

const Matrix* usable_gram(const GramMatrix* gram, const CodingProblem& problem) {
    if (!gram || gram->source() != &problem.dictionary()) return nullptr;
    return &gram->values();
}

Vector gather(const Vector& v, std::span<const Index> idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
    return out;
}

void scatter(Vector& dst, std::span<const Index> idx, const Vector& src) {
    for (std::size_t k = 0; k < idx.size(); ++k) dst(idx[k]) = src(static_cast<Index>(k));
}

enum class Penalty { l1, group, hierarchical };

SolverReport solve_single(const CodingProblem& problem, const SolverConfig& config, const GramMatrix* gram,
                          Penalty kind) {
    config.validate();
    if (problem.signal_count() != 1)
        throw ShapeError("single-signal solver called with " + std::to_string(problem.signal_count()) + " signals");

    const auto& dict = problem.dictionary();
    const auto& groups = dict.groups();
    const double l1 = kind == Penalty::group ? 0.0 : problem.lambda1();
    const double l2 = kind == Penalty::l1 ? 0.0 : problem.lambda2();

    const ColumnDataTerm data(problem, 0, gram);

    long long inner_iterations = 0;
    std::vector<ProxState> prox_states(static_cast<std::size_t>(groups.size()));

    CompositeObjective objective;
    objective.smooth = [&](const Vector& a, Vector& grad) { return data.evaluate(a, grad); };
    objective.penalty = [&](const Vector& a) {
        double value = 0.0;
        if (l1 != 0.0) value += l1 * l1_norm(a);
        if (l2 != 0.0) value += l2 * group_norm_sum(a, groups);
        return value;
    };

    switch (kind) {
    case Penalty::l1:
        objective.prox = [&](const Vector& u, double alpha) { return soft_threshold(u, l1 / alpha); };
        break;
    case Penalty::group:
        objective.prox = [&](const Vector& u, double alpha) {
            Vector z(u.size());
            for (Index g = 0; g < groups.size(); ++g) scatter(z, groups[g], vector_shrink(gather(u, groups[g]), l2 / alpha));
            return z;
        };
        break;
    case Penalty::hierarchical:
        objective.prox = [&](const Vector& u, double alpha) {
            ProxParams params;
            params.lambda1_tilde = l1 / alpha;
            params.lambda2_tilde = l2 / alpha;
            params.c = config.admm_c;
            params.tol = std::min(config.inner_tol, 0.01 * config.tol);
            params.max_iter = config.max_inner_iter;

            Vector z = Vector::Zero(u.size());
            for (Index g = 0; g < groups.size(); ++g) {
                const Vector w = gather(u, groups[g]);
                if (group_is_inactive(w, params.lambda1_tilde, params.lambda2_tilde)) continue;
                auto& state = prox_states[static_cast<std::size_t>(g)];
                ProxResult res = prox_l1_l2(w, params, config.warm_start_prox ? &state : nullptr);
                inner_iterations += res.inner_iterations;
                scatter(z, groups[g], res.b);
                state = std::move(res.state);
            }
            return z;
        };
        break;
    }

    SolverReport report = sparsa_minimize(objective, Vector::Zero(dict.atom_count()), config);
    report.inner_iterations = inner_iterations;
    return report;
}

} // namespace

SolverReport solve_lasso(const CodingProblem& problem, const SolverConfig& config, const GramMatrix* gram) {
    return solve_single(problem, config, gram, Penalty::l1);
}

SolverReport solve_group_lasso(const CodingProblem& problem, const SolverConfig& config, const GramMatrix* gram) {
    return solve_single(problem, config, gram, Penalty::group);
}

SolverReport solve_hilasso(const CodingProblem& problem, const SolverConfig& config, const GramMatrix* gram) {
    return solve_single(problem, config, gram, Penalty::hierarchical);
}

SolverReport solve_chilasso(const CodingProblem& problem, const SolverConfig& config, const GramMatrix* gram) {
    config.validate();
    const auto& dict = problem.dictionary();
    const auto& groups = dict.groups();
    const Index p = dict.atom_count();
    const Index n = problem.signal_count();
    const double c = config.admm_c;
    const double l1 = problem.lambda1();
    const double l2 = problem.lambda2();

    std::optional<GramMatrix> own_gram;
    if (!usable_gram(gram, problem) && !problem.masked() && n > 1) {
        own_gram.emplace(dict);
        gram = &*own_gram;
    }

    std::vector<ColumnDataTerm> data;
    data.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) data.emplace_back(problem, j, gram);

    Matrix A = Matrix::Zero(p, n);
    Matrix B = Matrix::Zero(p, n);
    Matrix P = Matrix::Zero(p, n);
    Matrix B_prev(p, n);
    std::vector<SparsaState> column_states(static_cast<std::size_t>(n));

    // ADMM is not monotone in F; an outer step is accepted (logged, and kept
    // as the fallback result when max_outer_iter runs out) only when it does
    // not raise the objective.
    SolverReport report;
    report.objective_trace.push_back(evaluate_objective(problem, CoefficientMatrix{A}, Model::chilasso));
    Matrix accepted = A;

    const double inner_floor = 0.1 * config.tol;
    double inner_tol = 10.0 * config.tol;

    for (int t = 0; t < config.max_outer_iter; ++t) {
        ++report.outer_iterations;

        SolverConfig inner = config;
        inner.tol = inner_tol;
        inner.max_outer_iter = config.max_inner_iter;
        for (Index j = 0; j < n; ++j) {
            const ColumnDataTerm& term = data[static_cast<std::size_t>(j)];
            const Vector p_j = P.col(j);
            const Vector b_j = B.col(j);

            CompositeObjective objective;
            objective.smooth = [&](const Vector& a, Vector& grad) {
                return admm_column_smooth(term, p_j, b_j, c, a, grad);
            };
            objective.penalty = [&](const Vector& a) { return l1 * l1_norm(a); };
            objective.prox = [&](const Vector& u, double alpha) { return soft_threshold(u, l1 / alpha); };

            SolverReport column = sparsa_minimize(objective, A.col(j), inner,
                                                  &column_states[static_cast<std::size_t>(j)]);
            A.col(j) = column.coefficients.values.col(0);
            report.inner_iterations += column.outer_iterations;
        }

        B_prev = B;
        for (Index g = 0; g < groups.size(); ++g) {
            const auto rows = groups[g];
            double sq = 0.0;
            for (Index i : rows) sq += (P.row(i) + c * A.row(i)).squaredNorm();
            const double norm = std::sqrt(sq);
            const double scale = norm > l2 ? (1.0 - l2 / norm) / c : 0.0;
            for (Index i : rows) B.row(i) = scale * (P.row(i) + c * A.row(i));
        }
        P.noalias() += c * (A - B);

        report.primal_residual = (A - B).norm();
        report.dual_residual = c * (B - B_prev).norm();
        report.primal_residual_trace.push_back(report.primal_residual);
        const double value = evaluate_objective(problem, CoefficientMatrix{A}, Model::chilasso);
        if (value <= report.objective_trace.back()) {
            report.objective_trace.push_back(value);
            accepted = A;
        }

        const double threshold = config.tol * std::max(1.0, A.norm());
        if (inner_tol <= config.tol && report.primal_residual <= threshold && report.dual_residual <= threshold) {
            report.converged = true;
            accepted = A;
            break;
        }
        inner_tol = std::max(inner_floor, 0.5 * inner_tol);
    }

    report.coefficients.values = std::move(accepted);
    return report;
}

SolverReport solve(const CodingProblem& problem, Model model, const SolverConfig& config, const GramMatrix* gram) {
    if (model == Model::chilasso) return solve_chilasso(problem, config, gram);

    const Index n = problem.signal_count();
    std::optional<GramMatrix> own_gram;
    if (!usable_gram(gram, problem) && !problem.masked() && n > 1) {
        own_gram.emplace(problem.dictionary());
        gram = &*own_gram;
    }

    SolverReport total;
    total.coefficients.values = Matrix::Zero(problem.atom_count(), n);
    total.converged = true;
    std::vector<std::vector<double>> traces;
    traces.reserve(static_cast<std::size_t>(n));

    for (Index j = 0; j < n; ++j) {
        const CodingProblem single = problem.column(j);
        SolverReport r;
        switch (model) {
        case Model::lasso: r = solve_lasso(single, config, gram); break;
        case Model::glasso: r = solve_group_lasso(single, config, gram); break;
        case Model::hilasso: r = solve_hilasso(single, config, gram); break;
        case Model::chilasso: break;
        }
        total.coefficients.values.col(j) = r.coefficients.values.col(0);
        total.outer_iterations = std::max(total.outer_iterations, r.outer_iterations);
        total.inner_iterations += r.inner_iterations;
        total.converged = total.converged && r.converged;
        traces.push_back(std::move(r.objective_trace));
    }

    std::size_t length = 0;
    for (const auto& tr : traces) length = std::max(length, tr.size());
    total.objective_trace.assign(length, 0.0);
    for (const auto& tr : traces)
        for (std::size_t k = 0; k < length; ++k) total.objective_trace[k] += tr[std::min(k, tr.size() - 1)];
    return total;
}

} // namespace hilasso
