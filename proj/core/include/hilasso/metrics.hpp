#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hilasso/model.hpp"
#include "hilasso/synth.hpp"

namespace hilasso {

/// Default relative support threshold: |a_ij| > tau * max_i |a_ij|.
inline constexpr double kDefaultSupportTau = 1e-4;

/// 10^3 * ||est - truth||_F^2 / (p n).
double coeff_mse(const CoefficientMatrix& est, const CoefficientMatrix& truth);

/// 10^3 * mean squared error over the entries where `truth` is nonzero
/// (0 when truth has no nonzero entry).
double coeff_mse_on_support(const CoefficientMatrix& est, const CoefficientMatrix& truth);

/// Indexes i of column j with |a_ij| > tau * max_i |a_ij|; empty for a zero column.
std::vector<Index> column_support(const Eigen::Ref<const Vector>& column, double tau);

/// Mean over signals of |supp(est_j) symmetric-difference supp(truth_j)|.
double support_hamming(const CoefficientMatrix& est, const CoefficientMatrix& truth, double tau = kDefaultSupportTau);

/// Groups holding at least one support coefficient of column j.
std::vector<Index> active_groups_of_column(const Eigen::Ref<const Vector>& column, const GroupPartition& groups,
                                           double tau);

/// Mean over signals of the symmetric difference between active group sets,
/// divided by the number of groups.
double group_hamming(const CoefficientMatrix& est, const CoefficientMatrix& truth, const GroupPartition& groups,
                     double tau = kDefaultSupportTau);

/// Union over signals of the active groups, ascending.
std::vector<Index> active_groups(const CoefficientMatrix& coefficients, const GroupPartition& groups,
                                 double tau = kDefaultSupportTau);

/// Per-source reconstructions x_j^i = D_{g_i} a_{j, g_i} for each group in
/// `source_groups`.
std::vector<Matrix> estimate_components(const Dictionary& dictionary, const CoefficientMatrix& coefficients,
                                        const std::vector<Index>& source_groups);

/// (1 / (N R)) sum_i sum_j ||x_j^i - xhat_j^i||^2 over R sources and N signals.
double separation_error(const std::vector<Matrix>& components_true, const std::vector<Matrix>& components_est);

/// max_{i != j} |d_i . d_j| for unit-norm columns; 0 for fewer than two columns.
double mutual_coherence(const Eigen::Ref<const Matrix>& atoms);

/// max |d_i . e_j| over columns d_i of `first` and e_j of `second`.
double cross_coherence(const Eigen::Ref<const Matrix>& first, const Eigen::Ref<const Matrix>& second);

/// Sufficient condition for a unique separation of a k1 + k2 sparse mixture:
///
///   (2 k1 - 1) mu1 + 2 cross_k mu12 < 1   and   (2 k2 - 1) mu2 + 2 k1 mu12 < 1
///
/// `cross_k` is the multiplier of the cross term in the first inequality; it
/// defaults to k2, the reading symmetric with the second inequality.
bool uniqueness_check(Index k1, Index k2, double mu1, double mu2, double mu12,
                      std::optional<Index> cross_k = std::nullopt);

struct MetricReport {
    double mse_scaled = 0.0;
    double mse_support_scaled = 0.0;
    double hamming = 0.0;
    std::optional<double> separation_error;
    double group_hamming = 0.0;
};

/// Every metric of `estimate` against a ground truth generated over `dictionary`.
MetricReport evaluate_metrics(const Dictionary& dictionary, const CoefficientMatrix& estimate, const GroundTruth& truth,
                              double tau = kDefaultSupportTau);

/// `trial,model,sigma,k,groups,mse_scaled,hamming,separation_error,group_hamming`
std::string metric_report_csv_header();
std::string metric_report_csv_row(const MetricReport& report, long long trial, Model model, double sigma, Index k,
                                   Index groups);

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);

} // namespace hilasso
