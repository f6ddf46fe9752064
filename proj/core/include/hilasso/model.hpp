#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hilasso/error.hpp"

namespace hilasso {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// true = observed entry.
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Ordered list of disjoint atom index sets covering {0, ..., p-1}.
///
/// Indexes are zero-based in memory. The JSON artifacts store them one-based
/// (see io.hpp). Construction does not validate; a partition is checked
/// against an atom count with validate_partition(), which Dictionary does on
/// construction.
class GroupPartition {
public:
    GroupPartition() = default;
    explicit GroupPartition(std::vector<std::vector<Index>> groups) : groups_(std::move(groups)) {}

    /// `num_groups` consecutive blocks of `group_size` atoms.
    static GroupPartition contiguous(Index num_groups, Index group_size);
    /// One group per atom; the group penalty then degenerates to the l1 norm.
    static GroupPartition singletons(Index p);

    Index size() const noexcept { return static_cast<Index>(groups_.size()); }
    std::span<const Index> operator[](Index g) const { return groups_[static_cast<std::size_t>(g)]; }
    const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }

    /// Group id of every atom; requires a valid partition of {0..p-1}.
    std::vector<Index> membership(Index p) const;

    friend bool operator==(const GroupPartition&, const GroupPartition&) = default;

private:
    std::vector<std::vector<Index>> groups_;
};

enum class PartitionViolationKind { empty_group, out_of_range, unsorted, overlap, gap };

struct PartitionViolation {
    PartitionViolationKind kind;
    Index group; // offending group, or -1 for a gap
    Index atom;  // offending atom index, or -1 for an empty group
    std::string message() const;
};

/// Returns the first violation found, scanning groups in order and reporting
/// gaps last; std::nullopt when `groups` is a partition of {0..p-1}.
std::optional<PartitionViolation> validate_partition(const GroupPartition& groups, Index p);

/// Atom matrix (m x p) with its group partition.
class Dictionary {
public:
    /// Throws InvalidArgument on empty or non-finite atoms, an invalid
    /// partition, or (when `normalized` is set) a column whose norm is not 1.
    Dictionary(Matrix atoms, GroupPartition groups, bool normalized = false);

    const Matrix& atoms() const noexcept { return atoms_; }
    const GroupPartition& groups() const noexcept { return groups_; }
    Index signal_dim() const noexcept { return atoms_.rows(); }
    Index atom_count() const noexcept { return atoms_.cols(); }
    bool normalized() const noexcept { return normalized_; }

    /// True when every column has unit Euclidean norm within `tol`.
    bool has_unit_columns(double tol = 1e-12) const;
    /// Copy with each column scaled to unit norm. Throws on a zero column.
    Dictionary with_unit_columns() const;

    /// Columns of group g, in partition order.
    Matrix group_atoms(Index g) const;

    friend bool operator==(const Dictionary& a, const Dictionary& b);

private:
    Matrix atoms_;
    GroupPartition groups_;
    bool normalized_ = false;
};

struct CoefficientMatrix {
    Matrix values; // p x n, column j codes signal j

    Index atom_count() const noexcept { return values.rows(); }
    Index signal_count() const noexcept { return values.cols(); }

    static CoefficientMatrix zeros(Index p, Index n) { return {Matrix::Zero(p, n)}; }

    friend bool operator==(const CoefficientMatrix& a, const CoefficientMatrix& b);
};

/// Signals to be coded against a shared dictionary.
class CodingProblem {
public:
    CodingProblem(Matrix signals, std::shared_ptr<const Dictionary> dictionary, double lambda1,
                  double lambda2, std::optional<MaskMatrix> masks = std::nullopt);

    const Matrix& signals() const noexcept { return signals_; }
    const Dictionary& dictionary() const noexcept { return *dictionary_; }
    const std::shared_ptr<const Dictionary>& dictionary_ptr() const noexcept { return dictionary_; }
    double lambda1() const noexcept { return lambda1_; }
    double lambda2() const noexcept { return lambda2_; }
    const std::optional<MaskMatrix>& masks() const noexcept { return masks_; }
    bool masked() const noexcept { return masks_.has_value(); }

    Index signal_dim() const noexcept { return signals_.rows(); }
    Index signal_count() const noexcept { return signals_.cols(); }
    Index atom_count() const noexcept { return dictionary_->atom_count(); }

    /// Single-signal problem for column j (mask column carried along).
    CodingProblem column(Index j) const;
    CodingProblem with_lambdas(double lambda1, double lambda2) const;

private:
    Matrix signals_;
    std::shared_ptr<const Dictionary> dictionary_;
    double lambda1_;
    double lambda2_;
    std::optional<MaskMatrix> masks_;
};

struct SolverConfig {
    double tol = 1e-6;          // relative iterate change
    int max_outer_iter = 1000;
    int max_inner_iter = 200;   // ADMM iterations per group prox; SpaRSA steps per collaborative A-update
    double admm_c = 1.0;
    double alpha_min = 1e-30;
    double alpha_max = 1e30;
    double eta = 2.0;
    double inner_tol = 1e-8;    // ADMM primal/dual stopping threshold
    bool warm_start_prox = true;

    /// Throws InvalidArgument when a bound is violated.
    void validate() const;
};

struct SolverReport {
    CoefficientMatrix coefficients;
    std::vector<double> objective_trace;
    int outer_iterations = 0;
    bool converged = false;
    /// Total inner iterations (ADMM prox steps, or SpaRSA steps of the
    /// collaborative A-update).
    long long inner_iterations = 0;
    /// Collaborative solver only: final ||A - B||_F and c ||B - B_prev||_F.
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    /// Collaborative solver only: ||A - B||_F after every outer iteration.
    std::vector<double> primal_residual_trace;
};

enum class Model { lasso, glasso, hilasso, chilasso };

inline constexpr Model kAllModels[] = {Model::lasso, Model::glasso, Model::hilasso, Model::chilasso};

std::string_view to_string(Model model);
/// Throws InvalidArgument on an unknown name.
Model parse_model(std::string_view name);

/// l1 norm of a vector.
double l1_norm(const Eigen::Ref<const Vector>& a);
/// Sum over groups of ||a_g||_2.
double group_norm_sum(const Eigen::Ref<const Vector>& a, const GroupPartition& groups);
/// Sum over groups of ||A_g||_F (rows of A restricted to g).
double group_frobenius_sum(const Eigen::Ref<const Matrix>& A, const GroupPartition& groups);

/// D A - X with unobserved entries set to zero.
Matrix masked_residual(const CodingProblem& problem, const Eigen::Ref<const Matrix>& A);

/// Exact (bitwise) equality including shape.
bool same_matrix(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);

/// Cost of `A` under `model`:
///   lasso    1/2 ||X - DA||_F^2 + l1 sum_j ||a_j||_1
///   glasso   1/2 ||X - DA||_F^2 + l2 sum_j sum_g ||a_{j,g}||_2
///   hilasso  1/2 ||X - DA||_F^2 + l2 sum_j sum_g ||a_{j,g}||_2 + l1 sum_j ||a_j||_1
///   chilasso 1/2 ||X - DA||_F^2 + l2 sum_g ||A_g||_F + l1 sum_j ||a_j||_1
/// The single-signal models treat the columns as independent problems. Masked
/// entries are left out of the data term.
double evaluate_objective(const CodingProblem& problem, const CoefficientMatrix& A, Model model);

} // namespace hilasso
