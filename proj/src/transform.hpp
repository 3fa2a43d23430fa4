#pragma once

#include <vector>

#include "field.hpp"

namespace bsq {

/// Real grid samples of a field at x_j = (L/N) j, row-major j-order.
using PhysicalField = std::vector<double>;

/// Inverse transform to physical samples. Throws ErrorCode::symmetry_violation
/// when the input is not Hermitian-symmetric (relative tolerance 1e-10).
PhysicalField transform_to_physical(const ScalarField& f);

/// Same, without the symmetry check (hot paths that provably preserve it).
PhysicalField transform_to_physical_unchecked(const ScalarField& f);

/// Forward transform of real samples; includes the 1/N^3 normalization so a
/// round trip is the identity.
ScalarField transform_to_spectral(const PhysicalField& samples, const BoxSpec& box);

std::array<PhysicalField, 3> transform_to_physical_unchecked(const VectorField& v);

} // namespace bsq
