#pragma once

// JSON encoding of gain sets and audit reports. Matrices are lists of rows.

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "poscon/metrics.hpp"
#include "poscon/synthesis.hpp"

namespace poscon {

using Json = nlohmann::json;

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

Json certificate_to_json(const FeasibilityCertificate& cert);
FeasibilityCertificate certificate_from_json(const Json& j);

/// `labels` and `minimal_gamma` are optional per-agent annotations.
Json gains_to_json(const GainSet& gains, const std::vector<std::string>& labels = {},
                   const std::vector<std::optional<double>>& minimal_gamma = {});
/// Throws Error(ParseError) on malformed input.
GainSet gains_from_json(const Json& j);

void write_gains(const std::filesystem::path& path, const GainSet& gains,
                 const std::vector<std::string>& labels = {},
                 const std::vector<std::optional<double>>& minimal_gamma = {});
GainSet read_gains(const std::filesystem::path& path);

Json audit_to_json(const AuditReport& report);

}  // namespace poscon
