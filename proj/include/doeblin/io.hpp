#pragma once

#include <string>

#include "json.hpp"

#include "doeblin/applications.hpp"
#include "doeblin/channels.hpp"
#include "doeblin/doeblin.hpp"
#include "doeblin/oracles.hpp"

namespace doeblin::io {

using json = nlohmann::ordered_json;

// Parse helpers throw InputError on malformed documents.
json parse(const std::string& text);
json read_file(const std::string& path);

ComplexMatrix matrix_from_json(const json& j);
HermitianOperator hermitian_from_json(const json& j);
QuantumState state_from_json(const json& j);
Channel channel_from_json(const json& j);
Ensemble ensemble_from_json(const json& j);
NoisyCircuitSpec circuit_from_json(const json& j);

// Reals are rounded to 12 significant digits; non-finite values become null.
json number(double v);
json matrix_to_json(const ComplexMatrix& m);
json to_json(const CoefficientReport& r);
json to_json(const ContractionBoundReport& r);
json to_json(const BoundReport& r);
json to_json(const ExclusionResult& r);

std::string dump(const json& j);

}  // namespace doeblin::io
