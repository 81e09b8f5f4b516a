#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gcr/estimator.hpp"
#include "gcr/exposure.hpp"

namespace gcr {

inline nlohmann::json to_json(const ProbabilityTable& pt) {
  nlohmann::json j;
  j["method"] = pt.method == ProbMethod::Exact ? "exact" : "monte-carlo";
  if (pt.method == ProbMethod::MonteCarlo) j["replicates"] = pt.mc_replicates;
  nlohmann::json verts = nlohmann::json::array();
  for (std::size_t i = 0; i < pt.pi1.size(); ++i) {
    nlohmann::json v;
    v["pi1"] = pt.pi1[i];
    v["pi0"] = pt.pi0[i];
    if (pt.method == ProbMethod::MonteCarlo) {
      v["stderr1"] = pt.stderr1[i];
      v["stderr0"] = pt.stderr0[i];
    }
    verts.push_back(std::move(v));
  }
  j["vertices"] = std::move(verts);
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& [key, value] : pt.joint)
    joints.push_back({key.i, key.j, key.x, key.y, value});
  j["joint"] = std::move(joints);
  return j;
}

inline ProbabilityTable probability_table_from_json(const nlohmann::json& j) {
  ProbabilityTable pt;
  std::string method = j.at("method").get<std::string>();
  if (method == "exact") pt.method = ProbMethod::Exact;
  else if (method == "monte-carlo") pt.method = ProbMethod::MonteCarlo;
  else throw std::runtime_error("unknown probability method: " + method);
  if (pt.method == ProbMethod::MonteCarlo)
    pt.mc_replicates = j.at("replicates").get<long long>();
  for (const auto& v : j.at("vertices")) {
    pt.pi1.push_back(v.at("pi1").get<double>());
    pt.pi0.push_back(v.at("pi0").get<double>());
    if (pt.method == ProbMethod::MonteCarlo) {
      pt.stderr1.push_back(v.at("stderr1").get<double>());
      pt.stderr0.push_back(v.at("stderr0").get<double>());
    }
  }
  if (j.contains("joint"))
    for (const auto& e : j.at("joint"))
      pt.joint[{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(),
                e.at(3).get<int>()}] = e.at(4).get<double>();
  return pt;
}

inline void save_probability_table(const ProbabilityTable& pt,
                                   std::ostream& out) {
  out << to_json(pt).dump(2) << "\n";
}

inline void save_probability_table(const ProbabilityTable& pt,
                                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  save_probability_table(pt, out);
}

inline ProbabilityTable load_probability_table(std::istream& in) {
  nlohmann::json j;
  in >> j;
  return probability_table_from_json(j);
}

inline ProbabilityTable load_probability_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open probability file: " + path);
  return load_probability_table(in);
}

// Assignment file: lines "vertex z", one per vertex.
inline void save_assignment(const Assignment& a, std::ostream& out) {
  for (std::size_t v = 0; v < a.z.size(); ++v)
    out << v << " " << static_cast<int>(a.z[v]) << "\n";
}

inline void save_assignment(const Assignment& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  save_assignment(a, out);
}

inline std::vector<char> load_assignment_bits(std::istream& in,
                                              const std::string& name = "<stream>") {
  std::vector<char> z;
  long long v;
  int bit;
  while (in >> v >> bit) {
    if (v != static_cast<long long>(z.size()))
      throw std::runtime_error(name + ": assignment lines must be dense from 0");
    if (bit != 0 && bit != 1)
      throw std::runtime_error(name + ": assignment bit must be 0 or 1");
    z.push_back(static_cast<char>(bit));
  }
  return z;
}

inline std::vector<char> load_assignment_bits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open assignment file: " + path);
  return load_assignment_bits(in, path);
}

}  // namespace gcr
