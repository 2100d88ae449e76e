#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "supremal/existence.hpp"
#include "supremal/inclusion.hpp"
#include "supremal/oracle.hpp"

namespace supremal::io {

using json = nlohmann::json;

std::string double_str(double v);

json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const json& j);

json field_to_json(const ScalarField& f);
ScalarField field_from_json(const json& j);

json domain_to_json(const Domain& d);
Domain domain_from_json(const json& j);

json body_to_json(const ConvexBody& b);
ConvexBody body_from_json(const json& j);

json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const json& j);

/// Envelope as two files: a CSV of node coordinates, f, and envelope
/// columns, and a JSON sidecar with the grid, method, and certificates.
std::string envelope_to_csv(const EnvelopeResult& env, const ScalarField& field);
json envelope_meta_to_json(const EnvelopeResult& env);
EnvelopeResult envelope_from_files(const std::string& csv, const json& meta);

json strictness_to_json(const StrictnessReport& r);
json verdict_to_json(const ExistenceVerdict& v);
ExistenceVerdict verdict_from_json(const json& j);

json mesh_to_json(const PiecewiseAffineFunction& u);
PiecewiseAffineFunction mesh_from_json(const json& j);
std::string gradient_csv(const PiecewiseAffineFunction& u, const ScalarField& field);

json audit_to_json(const AuditReport& r);
json jensen_to_json(const JensenReport& r);
json minimax_to_json(const MinimaxResult& r);
json flatness_to_json(const FlatnessReport& r);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace supremal::io
