#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "modliar/kripke.hpp"

namespace modliar {

/// {"worlds": n, "access": [[i,j],...], "valuation": {"0": ["q"], ...}}.
/// Every world gets a valuation entry, possibly empty.
inline nlohmann::json model_to_json(const KripkeModel& m) {
  nlohmann::json access = nlohmann::json::array();
  for (const auto& [from, to] : m.access()) access.push_back({from, to});
  nlohmann::json valuation = nlohmann::json::object();
  for (World w = 0; w < m.size(); ++w) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : m.valuation()[w]) atoms.push_back(a);
    valuation[std::to_string(w)] = std::move(atoms);
  }
  return {{"worlds", m.size()}, {"access", std::move(access)}, {"valuation", std::move(valuation)}};
}

/// Throws std::invalid_argument on schema violations.
inline KripkeModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("worlds") || !j["worlds"].is_number_integer())
    throw std::invalid_argument("model JSON needs an integer \"worlds\" field");
  long long n = j["worlds"].get<long long>();
  if (n <= 0) throw std::invalid_argument("\"worlds\" must be positive");

  std::set<Edge> access;
  if (j.contains("access")) {
    if (!j["access"].is_array()) throw std::invalid_argument("\"access\" must be an array of pairs");
    for (const auto& pair : j["access"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer())
        throw std::invalid_argument("access entries must be [i, j] integer pairs");
      long long a = pair[0].get<long long>(), b = pair[1].get<long long>();
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("access pair [" + std::to_string(a) + "," + std::to_string(b) + "] out of range");
      access.insert({static_cast<World>(a), static_cast<World>(b)});
    }
  }

  std::vector<std::set<std::string>> valuation(static_cast<std::size_t>(n));
  if (j.contains("valuation")) {
    if (!j["valuation"].is_object()) throw std::invalid_argument("\"valuation\" must be an object");
    for (const auto& [key, atoms] : j["valuation"].items()) {
      std::size_t pos = 0;
      long long w = -1;
      try {
        w = std::stoll(key, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != key.size() || w < 0 || w >= n)
        throw std::invalid_argument("valuation key \"" + key + "\" is not a world id");
      if (!atoms.is_array()) throw std::invalid_argument("valuation entries must be arrays of atom names");
      for (const auto& a : atoms) {
        if (!a.is_string() || !is_valid_atom_name(a.get<std::string>()))
          throw std::invalid_argument("invalid atom name in valuation");
        valuation[static_cast<std::size_t>(w)].insert(a.get<std::string>());
      }
    }
  }
  return KripkeModel(static_cast<std::size_t>(n), std::move(access), std::move(valuation));
}

/// Graphviz rendering. Nodes in world order, edges in (from, to) order.
/// `designated`, when given, is drawn with a double circle.
inline std::string model_to_dot(const KripkeModel& m, std::optional<World> designated = std::nullopt) {
  std::ostringstream os;
  os << "digraph kripke {\n";
  os << "  node [shape=circle];\n";
  for (World w = 0; w < m.size(); ++w) {
    std::string label = "w" + std::to_string(w);
    std::string atoms;
    for (const auto& a : m.valuation()[w]) atoms += (atoms.empty() ? "" : ",") + a;
    label += "\\n{" + atoms + "}";
    os << "  " << w << " [label=\"" << label << "\"";
    if (designated && *designated == w) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& [from, to] : m.access()) os << "  " << from << " -> " << to << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace modliar
