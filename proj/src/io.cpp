#include "qmms/io.hpp"

#include <charconv>
#include <fstream>

namespace qmms::io {

json space_to_json(const FiniteQMMSpace& space, const ReferenceCard* card) {
  json j;
  j["points"] = space.point_ids();
  const std::size_t n = space.size();
  json dist = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < n; ++k) row.push_back(space.dist(i, k));
    dist.push_back(std::move(row));
  }
  j["dist"] = std::move(dist);
  j["mu"] = space.weights();
  if (card && !card->generator.empty()) {
    json gen;
    gen["name"] = card->generator;
    gen["params"] = card->params;
    json bounds = json::array();
    for (const ReferenceBound& b : card->bounds) {
      bounds.push_back(
          {{"key", b.key}, {"formula", b.formula}, {"description", b.description}});
    }
    gen["reference_bounds"] = std::move(bounds);
    j["generator"] = std::move(gen);
  }
  return j;
}

FiniteQMMSpace space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dist") || !j.contains("mu"))
    fail(ValidationError::Kind::BadShape, "space JSON requires 'dist' and 'mu'");
  const json& jd = j.at("dist");
  if (!jd.is_array()) fail(ValidationError::Kind::BadShape, "'dist' must be an array of rows");
  const std::size_t n = jd.size();
  std::vector<double> dist;
  dist.reserve(n * n);
  for (const json& row : jd) {
    if (!row.is_array() || row.size() != n)
      fail(ValidationError::Kind::BadShape, "'dist' must be square");
    for (const json& v : row) {
      if (!v.is_number()) fail(ValidationError::Kind::NonfiniteEntry, "non-numeric distance");
      dist.push_back(v.get<double>());
    }
  }
  const json& jm = j.at("mu");
  if (!jm.is_array() || jm.size() != n)
    fail(ValidationError::Kind::BadShape, "'mu' must list one weight per point");
  std::vector<double> mu;
  for (const json& v : jm) {
    if (!v.is_number()) fail(ValidationError::Kind::NonfiniteEntry, "non-numeric weight");
    mu.push_back(v.get<double>());
  }
  std::vector<std::string> ids;
  if (j.contains("points")) {
    for (const json& v : j.at("points"))
      ids.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    if (ids.size() != n)
      fail(ValidationError::Kind::BadShape, "'points' must list one id per point");
  } else {
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  return validate_space(std::move(ids), std::move(dist), std::move(mu));
}

std::vector<double> function_from_json(const json& j) {
  const json* arr = nullptr;
  if (j.is_array()) {
    arr = &j;
  } else if (j.is_object() && j.contains("u") && j.at("u").is_array()) {
    arr = &j.at("u");
  } else {
    fail(ValidationError::Kind::BadShape,
         "function JSON must be an array or an object with a 'u' array");
  }
  std::vector<double> u;
  for (const json& v : *arr) {
    if (!v.is_number()) fail(ValidationError::Kind::NonfiniteEntry, "non-numeric value");
    u.push_back(v.get<double>());
  }
  return u;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ValidationError::Kind::InvalidParams, "cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ValidationError::Kind::InvalidParams, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) fail(ValidationError::Kind::InvalidParams, "cannot open " + path + " for writing");
  for (std::size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? "," : "\n");
  for (const std::vector<double>& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
}

void write_manifest(const std::string& path, const std::string& command, unsigned long long seed,
                    const json& params, const std::map<std::string, double>& timings_ms) {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["params"] = params;
  j["timings_ms"] = timings_ms;
  write_json(path, j);
}

}  // namespace qmms::io
