#include "hilasso/model.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace hilasso {

GroupPartition GroupPartition::contiguous(Index num_groups, Index group_size) {
    std::vector<std::vector<Index>> groups(static_cast<std::size_t>(num_groups));
    for (Index g = 0; g < num_groups; ++g) {
        auto& set = groups[static_cast<std::size_t>(g)];
        set.reserve(static_cast<std::size_t>(group_size));
        for (Index i = 0; i < group_size; ++i) set.push_back(g * group_size + i);
    }
    return GroupPartition(std::move(groups));
}

GroupPartition GroupPartition::singletons(Index p) {
    std::vector<std::vector<Index>> groups;
    groups.reserve(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) groups.push_back({i});
    return GroupPartition(std::move(groups));
}

std::vector<Index> GroupPartition::membership(Index p) const {
    std::vector<Index> owner(static_cast<std::size_t>(p), -1);
    for (Index g = 0; g < size(); ++g)
        for (Index i : (*this)[g]) owner[static_cast<std::size_t>(i)] = g;
    return owner;
}

std::string PartitionViolation::message() const {
    std::ostringstream os;
    switch (kind) {
    case PartitionViolationKind::empty_group:
        os << "group " << group << " is empty";
        break;
    case PartitionViolationKind::out_of_range:
        os << "group " << group << " contains out-of-range atom index " << atom;
        break;
    case PartitionViolationKind::unsorted:
        os << "group " << group << " is not sorted ascending at atom index " << atom;
        break;
    case PartitionViolationKind::overlap:
        os << "group " << group << " overlaps an earlier group at atom index " << atom;
        break;
    case PartitionViolationKind::gap:
        os << "atom index " << atom << " is not assigned to any group";
        break;
    }
    return os.str();
}

std::optional<PartitionViolation> validate_partition(const GroupPartition& groups, Index p) {
    std::vector<char> seen(static_cast<std::size_t>(std::max<Index>(p, 0)), 0);
    for (Index g = 0; g < groups.size(); ++g) {
        const auto set = groups[g];
        if (set.empty()) return PartitionViolation{PartitionViolationKind::empty_group, g, -1};
        for (std::size_t k = 0; k < set.size(); ++k) {
            const Index i = set[k];
            if (i < 0 || i >= p) return PartitionViolation{PartitionViolationKind::out_of_range, g, i};
            if (k > 0 && set[k - 1] == i) return PartitionViolation{PartitionViolationKind::overlap, g, i};
            if (k > 0 && set[k - 1] > i) return PartitionViolation{PartitionViolationKind::unsorted, g, i};
            auto& mark = seen[static_cast<std::size_t>(i)];
            if (mark) return PartitionViolation{PartitionViolationKind::overlap, g, i};
            mark = 1;
        }
    }
    for (Index i = 0; i < p; ++i)
        if (!seen[static_cast<std::size_t>(i)]) return PartitionViolation{PartitionViolationKind::gap, -1, i};
    return std::nullopt;
}

bool same_matrix(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            if (std::bit_cast<std::uint64_t>(a(i, j)) != std::bit_cast<std::uint64_t>(b(i, j))) return false;
    return true;
}

Dictionary::Dictionary(Matrix atoms, GroupPartition groups, bool normalized)
    : atoms_(std::move(atoms)), groups_(std::move(groups)), normalized_(normalized) {
    if (atoms_.rows() < 1 || atoms_.cols() < 1)
        throw InvalidArgument("dictionary must have at least one row and one column");
    if (!atoms_.allFinite()) throw InvalidArgument("dictionary atoms must be finite");
    if (auto violation = validate_partition(groups_, atoms_.cols()))
        throw InvalidArgument("invalid group partition: " + violation->message());
    if (normalized_ && !has_unit_columns())
        throw InvalidArgument("dictionary flagged normalized but a column norm differs from 1");
}

bool Dictionary::has_unit_columns(double tol) const {
    for (Index j = 0; j < atoms_.cols(); ++j)
        if (std::abs(atoms_.col(j).norm() - 1.0) > tol) return false;
    return true;
}

Dictionary Dictionary::with_unit_columns() const {
    Matrix scaled = atoms_;
    for (Index j = 0; j < scaled.cols(); ++j) {
        const double norm = scaled.col(j).norm();
        if (norm == 0.0) throw InvalidArgument("cannot normalize a zero atom (column " + std::to_string(j) + ")");
        scaled.col(j) /= norm;
    }
    return Dictionary(std::move(scaled), groups_, true);
}

Matrix Dictionary::group_atoms(Index g) const {
    const auto set = groups_[g];
    Matrix out(atoms_.rows(), static_cast<Index>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) out.col(static_cast<Index>(k)) = atoms_.col(set[k]);
    return out;
}

bool operator==(const Dictionary& a, const Dictionary& b) {
    return a.normalized_ == b.normalized_ && a.groups_ == b.groups_ && same_matrix(a.atoms_, b.atoms_);
}

bool operator==(const CoefficientMatrix& a, const CoefficientMatrix& b) { return same_matrix(a.values, b.values); }

CodingProblem::CodingProblem(Matrix signals, std::shared_ptr<const Dictionary> dictionary, double lambda1,
                             double lambda2, std::optional<MaskMatrix> masks)
    : signals_(std::move(signals)), dictionary_(std::move(dictionary)), lambda1_(lambda1), lambda2_(lambda2),
      masks_(std::move(masks)) {
    if (!dictionary_) throw InvalidArgument("coding problem requires a dictionary");
    if (signals_.rows() != dictionary_->signal_dim())
        throw ShapeError("signal dimension " + std::to_string(signals_.rows()) + " does not match dictionary rows " +
                         std::to_string(dictionary_->signal_dim()));
    if (signals_.cols() < 1) throw ShapeError("coding problem needs at least one signal");
    if (!(lambda1_ >= 0.0) || !(lambda2_ >= 0.0) || !std::isfinite(lambda1_) || !std::isfinite(lambda2_))
        throw InvalidArgument("regularization weights must be finite and nonnegative");
    if (masks_) {
        if (masks_->rows() != signals_.rows() || masks_->cols() != signals_.cols())
            throw ShapeError("mask shape does not match signals");
        for (Index j = 0; j < masks_->cols(); ++j)
            if (!masks_->col(j).any())
                throw InvalidArgument("mask column " + std::to_string(j) + " has no observed entry");
    }
}

CodingProblem CodingProblem::column(Index j) const {
    std::optional<MaskMatrix> mask;
    if (masks_) mask = MaskMatrix(masks_->col(j));
    return CodingProblem(Matrix(signals_.col(j)), dictionary_, lambda1_, lambda2_, std::move(mask));
}

CodingProblem CodingProblem::with_lambdas(double lambda1, double lambda2) const {
    return CodingProblem(signals_, dictionary_, lambda1, lambda2, masks_);
}

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (max_outer_iter < 1) throw InvalidArgument("max_outer_iter must be positive");
    if (max_inner_iter < 1) throw InvalidArgument("max_inner_iter must be positive");
    if (!(admm_c > 0.0)) throw InvalidArgument("admm_c must be positive");
    if (!(alpha_min > 0.0) || !(alpha_min < alpha_max)) throw InvalidArgument("need 0 < alpha_min < alpha_max");
    if (!(eta > 1.0)) throw InvalidArgument("eta must exceed 1");
    if (!(inner_tol > 0.0)) throw InvalidArgument("inner_tol must be positive");
}

std::string_view to_string(Model model) {
    switch (model) {
    case Model::lasso: return "lasso";
    case Model::glasso: return "glasso";
    case Model::hilasso: return "hilasso";
    case Model::chilasso: return "chilasso";
    }
    return "unknown";
}

Model parse_model(std::string_view name) {
    for (Model m : kAllModels)
        if (to_string(m) == name) return m;
    throw InvalidArgument("unknown model '" + std::string(name) + "' (expected lasso, glasso, hilasso or chilasso)");
}

double l1_norm(const Eigen::Ref<const Vector>& a) { return a.lpNorm<1>(); }

double group_norm_sum(const Eigen::Ref<const Vector>& a, const GroupPartition& groups) {
    double total = 0.0;
    for (Index g = 0; g < groups.size(); ++g) {
        double sq = 0.0;
        for (Index i : groups[g]) sq += a(i) * a(i);
        total += std::sqrt(sq);
    }
    return total;
}

double group_frobenius_sum(const Eigen::Ref<const Matrix>& A, const GroupPartition& groups) {
    double total = 0.0;
    for (Index g = 0; g < groups.size(); ++g) {
        double sq = 0.0;
        for (Index i : groups[g]) sq += A.row(i).squaredNorm();
        total += std::sqrt(sq);
    }
    return total;
}

Matrix masked_residual(const CodingProblem& problem, const Eigen::Ref<const Matrix>& A) {
    Matrix r = problem.dictionary().atoms() * A - problem.signals();
    if (problem.masks()) r = problem.masks()->select(r, 0.0);
    return r;
}

double evaluate_objective(const CodingProblem& problem, const CoefficientMatrix& A, Model model) {
    if (A.atom_count() != problem.atom_count() || A.signal_count() != problem.signal_count())
        throw ShapeError("coefficient matrix is " + std::to_string(A.atom_count()) + "x" +
                         std::to_string(A.signal_count()) + ", problem expects " +
                         std::to_string(problem.atom_count()) + "x" + std::to_string(problem.signal_count()));

    const double data = 0.5 * masked_residual(problem, A.values).squaredNorm();
    const auto& groups = problem.dictionary().groups();

    double l1 = 0.0;
    if (model != Model::glasso && problem.lambda1() != 0.0)
        for (Index j = 0; j < A.signal_count(); ++j) l1 += l1_norm(A.values.col(j));

    double group = 0.0;
    if (model == Model::chilasso && problem.lambda2() != 0.0) {
        group = group_frobenius_sum(A.values, groups);
    } else if ((model == Model::glasso || model == Model::hilasso) && problem.lambda2() != 0.0) {
        for (Index j = 0; j < A.signal_count(); ++j) group += group_norm_sum(A.values.col(j), groups);
    }

    double value = data;
    if (model != Model::glasso) value += problem.lambda1() * l1;
    if (model != Model::lasso) value += problem.lambda2() * group;
    return value;
}

} // namespace hilasso
