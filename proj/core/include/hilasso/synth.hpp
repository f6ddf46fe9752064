#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "hilasso/model.hpp"

namespace hilasso {

/// Synthetic mixture experiment: `num_groups` Gaussian sub-dictionaries,
/// `num_active_groups` of them active on every signal, `k` atoms per active
/// group and signal.
struct SynthSpec {
    Index num_groups = 8;
    Index atoms_per_group = 64;
    Index signal_dim = 64;
    Index k = 8;
    Index num_active_groups = 2;
    Index n = 200;
    double sigma = 0.0;
    double missing_fraction = 0.0;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument naming the offending field.
    void validate() const;
};

struct GroundTruth {
    CoefficientMatrix coefficients;
    std::vector<Index> active_groups;   // ascending
    std::vector<Matrix> components;     // components[i] is the m x n source of active_groups[i]
};

struct Trial {
    CodingProblem problem; // lambdas are zero; callers set them with with_lambdas()
    GroundTruth truth;
};

/// Seed streams. Dictionary: splitmix64(seed). Trial t:
/// splitmix64(seed ^ (t + 1)), split further into the support/coefficient,
/// noise and mask streams via splitmix64(trial_seed ^ tag) with tags 1, 2, 3.
std::uint64_t dictionary_seed(std::uint64_t seed) noexcept;
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

/// signal_dim x (num_groups * atoms_per_group) standard normal matrix, drawn
/// column by column, each column scaled to unit norm. Groups are contiguous
/// blocks of atoms_per_group.
Dictionary gen_dictionary(const SynthSpec& spec);

/// One trial against `dictionary`. Draws the active groups, then for every
/// signal j and active group i a support of k distinct atoms with standard
/// normal weights; each component D_i a_j^i is scaled to unit norm together
/// with its weights. The mixture adds N(0, sigma^2) noise. With
/// missing_fraction > 0 every entry is observed with probability
/// 1 - missing_fraction (columns without any observed entry are redrawn);
/// unobserved entries keep their values in the signal matrix.
Trial gen_trial(const SynthSpec& spec, std::shared_ptr<const Dictionary> dictionary, std::uint64_t trial = 0);

} // namespace hilasso
