#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmms/examples.hpp"
#include "qmms/space.hpp"

namespace qmms::io {

using nlohmann::json;

/// Serializes a space as {"points", "dist", "mu"}; when a reference card is
/// present the generator name, parameters, and closed-form reference bounds
/// are attached under "generator".
json space_to_json(const FiniteQMMSpace& space, const ReferenceCard* card = nullptr);

/// Builds a validated space from the layout produced by space_to_json.
FiniteQMMSpace space_from_json(const json& j);

/// Accepts either a bare array of values or an object with a "u" array.
std::vector<double> function_from_json(const json& j);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);

/// Deterministic formatting used by every CSV emitted by the tools: shortest
/// representation that round-trips a double.
std::string format_double(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// The run manifest is the only artifact that may carry wall-clock timings;
/// every other output is a pure function of inputs and seed.
void write_manifest(const std::string& path, const std::string& command, unsigned long long seed,
                    const json& params, const std::map<std::string, double>& timings_ms);

}  // namespace qmms::io
