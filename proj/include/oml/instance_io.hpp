#pragma once

// Instance JSON:
//   {"servers": [{"id": int, "pos": "num/den"}],
//    "requests": [{"id": int, "pos": "num/den"}],
//    "meta": {...}}

#include "oml/line_core.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace oml {

inline nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["servers"] = nlohmann::json::array();
  for (const auto& s : inst.servers) j["servers"].push_back({{"id", s.id}, {"pos", to_string(s.pos)}});
  j["requests"] = nlohmann::json::array();
  for (const auto& r : inst.requests) j["requests"].push_back({{"id", r.id}, {"pos", to_string(r.pos)}});
  j["meta"] = inst.meta;
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  Instance inst;
  try {
    for (const auto& s : j.at("servers")) {
      inst.servers.push_back({s.at("id").get<int>(), parse_rational(s.at("pos").get<std::string>())});
    }
    for (const auto& r : j.at("requests")) {
      inst.requests.push_back({r.at("id").get<int>(), parse_rational(r.at("pos").get<std::string>())});
    }
    if (j.contains("meta")) inst.meta = j.at("meta");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad instance json: ") + e.what());
  }
  inst.validate();
  return inst;
}

inline std::string dump_instance(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

inline Instance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad instance json: ") + e.what());
  }
  return instance_from_json(j);
}

inline void write_instance(const std::string& path, const Instance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << dump_instance(inst);
}

inline Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

}  // namespace oml
