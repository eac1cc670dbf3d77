#pragma once

#include <json.hpp>

#include "mcd/asymptotics.hpp"
#include "mcd/distributions.hpp"
#include "mcd/model.hpp"

namespace mcd {

using Json = nlohmann::json;

// Matrices serialize as row-major flat arrays; the vech convention (lower
// triangle, column-major) is recorded alongside every theta-indexed object.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, int rows, int cols);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const CertificateReport& rep);
Json to_json(const McdFit& fit);
McdFit fit_from_json(const Json& j);

Json to_json(const Theta& theta);
Json to_json(const CltReport& rep);

Json to_json(const PopulationSpec& spec);
PopulationSpec spec_from_json(const Json& j);

}  // namespace mcd
