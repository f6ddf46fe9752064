#include "hilasso/synth.hpp"

#include <algorithm>
#include <cmath>

#include "hilasso/rng.hpp"

namespace hilasso {

namespace {
constexpr std::uint64_t kSupportStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kMaskStream = 3;
} // namespace

void SynthSpec::validate() const {
    if (num_groups < 2) throw InvalidArgument("num_groups must be at least 2");
    if (atoms_per_group < 1) throw InvalidArgument("atoms_per_group must be positive");
    if (signal_dim < 1) throw InvalidArgument("signal_dim must be positive");
    if (k < 1) throw InvalidArgument("k must be positive");
    if (k > atoms_per_group) throw InvalidArgument("k exceeds atoms_per_group");
    if (num_active_groups < 1) throw InvalidArgument("num_active_groups must be positive");
    if (num_active_groups > num_groups) throw InvalidArgument("num_active_groups exceeds num_groups");
    if (n < 1) throw InvalidArgument("n must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be finite and nonnegative");
    if (!(missing_fraction >= 0.0 && missing_fraction < 1.0))
        throw InvalidArgument("missing_fraction must lie in [0, 1)");
}

std::uint64_t dictionary_seed(std::uint64_t seed) noexcept { return splitmix64(seed); }

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept { return splitmix64(seed ^ (trial + 1)); }

Dictionary gen_dictionary(const SynthSpec& spec) {
    spec.validate();
    Rng rng(dictionary_seed(spec.seed));
    const Index p = spec.num_groups * spec.atoms_per_group;
    Matrix atoms(spec.signal_dim, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < spec.signal_dim; ++i) atoms(i, j) = rng.normal();
        atoms.col(j) /= atoms.col(j).norm();
    }
    return Dictionary(std::move(atoms), GroupPartition::contiguous(spec.num_groups, spec.atoms_per_group), true);
}

Trial gen_trial(const SynthSpec& spec, std::shared_ptr<const Dictionary> dictionary, std::uint64_t trial) {
    spec.validate();
    if (!dictionary) throw InvalidArgument("gen_trial requires a dictionary");
    const Dictionary& dict = *dictionary;
    if (dict.signal_dim() != spec.signal_dim || dict.groups().size() != spec.num_groups)
        throw ShapeError("dictionary does not match the synthetic spec");
    for (Index g = 0; g < dict.groups().size(); ++g)
        if (static_cast<Index>(dict.groups()[g].size()) < spec.k)
            throw ShapeError("dictionary group " + std::to_string(g) + " has fewer than k atoms");

    const std::uint64_t base = trial_seed(spec.seed, trial);
    Rng support_rng(splitmix64(base ^ kSupportStream));

    const Index m = spec.signal_dim;
    const Index n = spec.n;
    const Index R = spec.num_active_groups;

    GroundTruth truth;
    for (auto g : support_rng.sample_without_replacement(static_cast<std::uint64_t>(spec.num_groups),
                                                         static_cast<std::uint64_t>(R)))
        truth.active_groups.push_back(static_cast<Index>(g));
    std::sort(truth.active_groups.begin(), truth.active_groups.end());

    truth.coefficients = CoefficientMatrix::zeros(dict.atom_count(), n);
    truth.components.assign(static_cast<std::size_t>(R), Matrix::Zero(m, n));

    for (Index j = 0; j < n; ++j) {
        for (Index r = 0; r < R; ++r) {
            const auto group = dict.groups()[truth.active_groups[static_cast<std::size_t>(r)]];
            const auto picks = support_rng.sample_without_replacement(group.size(), static_cast<std::uint64_t>(spec.k));
            Vector weights(spec.k);
            for (Index s = 0; s < spec.k; ++s) weights(s) = support_rng.normal();

            Vector component = Vector::Zero(m);
            for (Index s = 0; s < spec.k; ++s) component += weights(s) * dict.atoms().col(group[picks[static_cast<std::size_t>(s)]]);
            const double norm = component.norm();
            if (norm > 0.0) {
                component /= norm;
                weights /= norm;
            }
            for (Index s = 0; s < spec.k; ++s)
                truth.coefficients.values(group[picks[static_cast<std::size_t>(s)]], j) = weights(s);
            truth.components[static_cast<std::size_t>(r)].col(j) = component;
        }
    }

    Matrix signals = Matrix::Zero(m, n);
    for (const Matrix& component : truth.components) signals += component;

    if (spec.sigma > 0.0) {
        Rng noise_rng(splitmix64(base ^ kNoiseStream));
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < m; ++i) signals(i, j) += spec.sigma * noise_rng.normal();
    }

    std::optional<MaskMatrix> masks;
    if (spec.missing_fraction > 0.0) {
        Rng mask_rng(splitmix64(base ^ kMaskStream));
        MaskMatrix mask(m, n);
        for (Index j = 0; j < n; ++j) {
            do {
                for (Index i = 0; i < m; ++i) mask(i, j) = mask_rng.uniform() >= spec.missing_fraction;
            } while (!mask.col(j).any());
        }
        masks = std::move(mask);
    }

    return Trial{CodingProblem(std::move(signals), std::move(dictionary), 0.0, 0.0, std::move(masks)),
                 std::move(truth)};
}

} // namespace hilasso
