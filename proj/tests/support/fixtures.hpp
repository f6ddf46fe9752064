#pragma once

#include <memory>

#include "hilasso/model.hpp"
#include "hilasso/rng.hpp"

namespace fixtures {

using hilasso::Index;
using hilasso::Matrix;
using hilasso::Vector;

inline Matrix gaussian(hilasso::Rng& rng, Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
    return out;
}

/// Unit-column Gaussian dictionary with `groups` contiguous groups.
inline std::shared_ptr<const hilasso::Dictionary> random_dictionary(hilasso::Rng& rng, Index m, Index groups,
                                                                    Index group_size) {
    Matrix atoms = gaussian(rng, m, groups * group_size);
    atoms.colwise().normalize();
    return std::make_shared<const hilasso::Dictionary>(std::move(atoms),
                                                       hilasso::GroupPartition::contiguous(groups, group_size), true);
}

inline std::shared_ptr<const hilasso::Dictionary> identity_dictionary(Index p, hilasso::GroupPartition groups) {
    return std::make_shared<const hilasso::Dictionary>(Matrix::Identity(p, p), std::move(groups), true);
}

inline double relative_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

} // namespace fixtures
