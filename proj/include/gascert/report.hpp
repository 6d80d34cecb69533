#pragma once

#include "json.hpp"

#include "gascert/envelope2d.hpp"
#include "gascert/orbit.hpp"

namespace gascert {

using Json = nlohmann::json;

Json to_json(const MapSpec& m);
Json to_json(const NormalizedMap& nm);
Json to_json(const GradientVector& v);
Json to_json(const SlasReport& r);
Json to_json(const MonotonicityProfile& p);
Json to_json(const Slopes& s);
Json to_json(const CheckOutcome& c);
Json to_json(const EnvelopeReport& r);
Json to_json(const TwoCycleReport& r);
Json to_json(const PseudoFixedReport& r);
Json to_json(const EmbeddingVerdict& v);
Json to_json(const Verdict& v);
Json to_json(const OrbitResult& r, double xbar);
Json to_json(const BasinReport& b);

// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_number(double v);

}  // namespace gascert
