#include "hilasso/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>

namespace hilasso {

namespace {

void require_same_shape(const CoefficientMatrix& a, const CoefficientMatrix& b) {
    if (a.atom_count() != b.atom_count() || a.signal_count() != b.signal_count())
        throw ShapeError("coefficient matrices differ in shape");
}

Index symmetric_difference_size(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::vector<Index> diff;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
    return static_cast<Index>(diff.size());
}

} // namespace

double coeff_mse(const CoefficientMatrix& est, const CoefficientMatrix& truth) {
    require_same_shape(est, truth);
    const double count = static_cast<double>(est.values.size());
    return count == 0.0 ? 0.0 : 1e3 * (est.values - truth.values).squaredNorm() / count;
}

double coeff_mse_on_support(const CoefficientMatrix& est, const CoefficientMatrix& truth) {
    require_same_shape(est, truth);
    double sum = 0.0;
    long long count = 0;
    for (Index j = 0; j < truth.values.cols(); ++j)
        for (Index i = 0; i < truth.values.rows(); ++i)
            if (truth.values(i, j) != 0.0) {
                const double d = est.values(i, j) - truth.values(i, j);
                sum += d * d;
                ++count;
            }
    return count == 0 ? 0.0 : 1e3 * sum / static_cast<double>(count);
}

std::vector<Index> column_support(const Eigen::Ref<const Vector>& column, double tau) {
    std::vector<Index> support;
    const double peak = column.size() ? column.cwiseAbs().maxCoeff() : 0.0;
    if (peak == 0.0) return support;
    const double threshold = tau * peak;
    for (Index i = 0; i < column.size(); ++i)
        if (std::abs(column(i)) > threshold) support.push_back(i);
    return support;
}

double support_hamming(const CoefficientMatrix& est, const CoefficientMatrix& truth, double tau) {
    require_same_shape(est, truth);
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    const Index n = est.signal_count();
    if (n == 0) return 0.0;
    double total = 0.0;
    for (Index j = 0; j < n; ++j)
        total += static_cast<double>(
            symmetric_difference_size(column_support(est.values.col(j), tau), column_support(truth.values.col(j), tau)));
    return total / static_cast<double>(n);
}

std::vector<Index> active_groups_of_column(const Eigen::Ref<const Vector>& column, const GroupPartition& groups,
                                           double tau) {
    std::vector<char> hit(static_cast<std::size_t>(groups.size()), 0);
    const auto owner = groups.membership(column.size());
    for (Index i : column_support(column, tau)) hit[static_cast<std::size_t>(owner[static_cast<std::size_t>(i)])] = 1;
    std::vector<Index> out;
    for (Index g = 0; g < groups.size(); ++g)
        if (hit[static_cast<std::size_t>(g)]) out.push_back(g);
    return out;
}

double group_hamming(const CoefficientMatrix& est, const CoefficientMatrix& truth, const GroupPartition& groups,
                     double tau) {
    require_same_shape(est, truth);
    if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
    const Index n = est.signal_count();
    if (n == 0 || groups.size() == 0) return 0.0;
    double total = 0.0;
    for (Index j = 0; j < n; ++j)
        total += static_cast<double>(symmetric_difference_size(active_groups_of_column(est.values.col(j), groups, tau),
                                                               active_groups_of_column(truth.values.col(j), groups, tau)));
    return total / static_cast<double>(n) / static_cast<double>(groups.size());
}

std::vector<Index> active_groups(const CoefficientMatrix& coefficients, const GroupPartition& groups, double tau) {
    std::vector<char> hit(static_cast<std::size_t>(groups.size()), 0);
    for (Index j = 0; j < coefficients.signal_count(); ++j)
        for (Index g : active_groups_of_column(coefficients.values.col(j), groups, tau))
            hit[static_cast<std::size_t>(g)] = 1;
    std::vector<Index> out;
    for (Index g = 0; g < groups.size(); ++g)
        if (hit[static_cast<std::size_t>(g)]) out.push_back(g);
    return out;
}

std::vector<Matrix> estimate_components(const Dictionary& dictionary, const CoefficientMatrix& coefficients,
                                        const std::vector<Index>& source_groups) {
    if (coefficients.atom_count() != dictionary.atom_count())
        throw ShapeError("coefficient rows do not match dictionary atoms");
    std::vector<Matrix> out;
    out.reserve(source_groups.size());
    for (Index g : source_groups) {
        if (g < 0 || g >= dictionary.groups().size()) throw InvalidArgument("source group out of range");
        Matrix component = Matrix::Zero(dictionary.signal_dim(), coefficients.signal_count());
        for (Index i : dictionary.groups()[g]) component.noalias() += dictionary.atoms().col(i) * coefficients.values.row(i);
        out.push_back(std::move(component));
    }
    return out;
}

double separation_error(const std::vector<Matrix>& components_true, const std::vector<Matrix>& components_est) {
    if (components_true.size() != components_est.size()) throw ShapeError("source counts differ");
    if (components_true.empty()) return 0.0;
    const Index n = components_true.front().cols();
    double total = 0.0;
    for (std::size_t i = 0; i < components_true.size(); ++i) {
        const Matrix& t = components_true[i];
        const Matrix& e = components_est[i];
        if (t.rows() != e.rows() || t.cols() != e.cols() || t.cols() != n)
            throw ShapeError("component " + std::to_string(i) + " shapes differ");
        total += (t - e).squaredNorm();
    }
    return n == 0 ? 0.0 : total / (static_cast<double>(n) * static_cast<double>(components_true.size()));
}

namespace {
// Sequential accumulation so results do not depend on the BLAS kernel.
double abs_dot(const Eigen::Ref<const Matrix>& a, Index i, const Eigen::Ref<const Matrix>& b, Index j) {
    double s = 0.0;
    for (Index r = 0; r < a.rows(); ++r) s += a(r, i) * b(r, j);
    return std::abs(s);
}
} // namespace

double mutual_coherence(const Eigen::Ref<const Matrix>& atoms) {
    double best = 0.0;
    for (Index j = 1; j < atoms.cols(); ++j)
        for (Index i = 0; i < j; ++i) best = std::max(best, abs_dot(atoms, i, atoms, j));
    return best;
}

double cross_coherence(const Eigen::Ref<const Matrix>& first, const Eigen::Ref<const Matrix>& second) {
    if (first.rows() != second.rows()) throw ShapeError("blocks differ in signal dimension");
    double best = 0.0;
    for (Index i = 0; i < first.cols(); ++i)
        for (Index j = 0; j < second.cols(); ++j) best = std::max(best, abs_dot(first, i, second, j));
    return best;
}

bool uniqueness_check(Index k1, Index k2, double mu1, double mu2, double mu12, std::optional<Index> cross_k) {
    if (k1 < 1 || k2 < 1) throw InvalidArgument("sparsity levels must be at least 1");
    if (mu1 < 0.0 || mu2 < 0.0 || mu12 < 0.0) throw InvalidArgument("coherences must be nonnegative");
    const double kc = static_cast<double>(cross_k.value_or(k2));
    const bool first = (2.0 * static_cast<double>(k1) - 1.0) * mu1 + 2.0 * kc * mu12 < 1.0;
    const bool second = (2.0 * static_cast<double>(k2) - 1.0) * mu2 + 2.0 * static_cast<double>(k1) * mu12 < 1.0;
    return first && second;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string metric_report_csv_header() {
    return "trial,model,sigma,k,groups,mse_scaled,hamming,separation_error,group_hamming";
}

std::string metric_report_csv_row(const MetricReport& report, long long trial, Model model, double sigma, Index k,
                                  Index groups) {
    std::string row = std::to_string(trial);
    row += ',';
    row += to_string(model);
    row += ',' + format_double(sigma) + ',' + std::to_string(k) + ',' + std::to_string(groups);
    row += ',' + format_double(report.mse_scaled) + ',' + format_double(report.hamming) + ',';
    if (report.separation_error) row += format_double(*report.separation_error);
    row += ',' + format_double(report.group_hamming);
    return row;
}

MetricReport evaluate_metrics(const Dictionary& dictionary, const CoefficientMatrix& estimate, const GroundTruth& truth,
                              double tau) {
    MetricReport m;
    m.mse_scaled = coeff_mse(estimate, truth.coefficients);
    m.mse_support_scaled = coeff_mse_on_support(estimate, truth.coefficients);
    m.hamming = support_hamming(estimate, truth.coefficients, tau);
    m.separation_error =
        separation_error(truth.components, estimate_components(dictionary, estimate, truth.active_groups));
    m.group_hamming = group_hamming(estimate, truth.coefficients, dictionary.groups(), tau);
    return m;
}

} // namespace hilasso
