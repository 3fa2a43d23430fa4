#pragma once

#include <string>
#include <variant>

#include "field.hpp"

namespace bsq {

/// Container format "BSQFIELD 1": ASCII header (convention tag
/// "c-exp-parseval-L3", box parameters, field kind) followed by raw
/// little-endian complex128 coefficients in row-major wrapped-k order
/// (FFTW storage layout). Stable across versions; see README for the layout.
void save_field(const ScalarField& f, const std::string& path);
void save_field(const VectorField& v, const std::string& path);

using AnyField = std::variant<ScalarField, VectorField>;

AnyField load_field(const std::string& path);
ScalarField load_scalar_field(const std::string& path);
VectorField load_vector_field(const std::string& path);

} // namespace bsq
