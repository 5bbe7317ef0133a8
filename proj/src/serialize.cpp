#include "invar/serialize.hpp"

#include <map>

namespace invar {

using nlohmann::json;

namespace {

std::string kind_name(FactorKind k) { return kind_token(k); }

FactorKind kind_from_name(const std::string& s) {
  static const std::map<std::string, FactorKind> table = {
      {"R", FactorKind::Riemann},   {"W", FactorKind::Weyl},
      {"P", FactorKind::Schouten},  {"Ric", FactorKind::Ricci},
      {"Scal", FactorKind::ScalarCurv}, {"phi", FactorKind::Phi},
      {"Sphi", FactorKind::SymPhi}, {"g", FactorKind::Metric},
      {"gi", FactorKind::InverseMetric}};
  auto it = table.find(s);
  if (it == table.end()) throw SerializeError("unknown factor kind '" + s + "'");
  return it->second;
}

}  // namespace

json to_json(const Contraction& c) {
  json jt;
  jt["coeff"] = rational_to_string(c.coeff);
  json jfacs = json::array();
  for (const auto& f : c.factors) {
    json jf;
    jf["kind"] = kind_name(f.kind);
    jf["deriv"] = f.deriv_order;
    if (f.flavor != 0) jf["flavor"] = f.flavor;
    jfacs.push_back(std::move(jf));
  }
  jt["factors"] = std::move(jfacs);
  // Slot labels: shared non-negative id per contracted pair; free slots are
  // encoded as -(label+1).
  std::map<std::pair<int, int>, int> pair_id;
  int next = 0;
  json jslots = json::array();
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    json row = json::array();
    for (std::size_t p = 0; p < c.part[f].size(); ++p) {
      SlotRef o = c.part[f][p];
      if (o.is_free()) {
        row.push_back(-(static_cast<int>(o.p) + 1));
        continue;
      }
      auto here = std::make_pair(static_cast<int>(f), static_cast<int>(p));
      auto there = std::make_pair(static_cast<int>(o.f), static_cast<int>(o.p));
      auto it = pair_id.find(here);
      int id;
      if (it != pair_id.end()) {
        id = it->second;
      } else {
        id = next++;
        pair_id[there] = id;
      }
      row.push_back(id);
    }
    jslots.push_back(std::move(row));
  }
  jt["slots"] = std::move(jslots);
  return jt;
}

json to_json(const LinearCombination& lc) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["type"] = "linear_combination";
  json terms = json::array();
  for (const auto& t : lc.terms) terms.push_back(to_json(t));
  j["terms"] = std::move(terms);
  return j;
}

Contraction contraction_from_json(const json& jt) {
  if (!jt.contains("coeff") || !jt.contains("factors") || !jt.contains("slots")) {
    throw SerializeError("term document missing coeff/factors/slots");
  }
  auto coeff = rational_from_string(jt["coeff"].get<std::string>());
  if (!coeff) throw SerializeError("malformed coefficient");
  std::vector<Factor> facs;
  for (const auto& jf : jt["factors"]) {
    Factor f;
    f.kind = kind_from_name(jf.at("kind").get<std::string>());
    f.deriv_order = jf.at("deriv").get<int>();
    f.flavor = jf.contains("flavor") ? jf["flavor"].get<int>() : 0;
    facs.push_back(f);
  }
  std::vector<std::vector<int>> labels;
  constexpr int kFreeShift = 20000;  // separates free labels from pair ids
  for (const auto& row : jt["slots"]) {
    std::vector<int> ls;
    for (const auto& v : row) {
      int x = v.get<int>();
      if (x >= kFreeShift || x < -kFreeShift) throw SerializeError("slot label out of range");
      ls.push_back(x >= 0 ? x : kFreeShift + (-x - 1));
    }
    labels.push_back(std::move(ls));
  }
  Contraction c = from_labels(*coeff, std::move(facs), labels);
  for (auto& ps : c.part) {
    for (auto& s : ps) {
      if (s.is_free() && s.p >= kFreeShift) s.p -= kFreeShift;
    }
  }
  auto rep = validate(c);
  if (!rep.ok) throw SerializeError("document fails validation: " + rep.issues.front());
  return c;
}

LinearCombination combination_from_json(const json& j) {
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != kSchemaVersion) {
    throw SerializeError("schema mismatch: expected schema_version " +
                         std::to_string(kSchemaVersion));
  }
  if (!j.contains("type") || j["type"].get<std::string>() != "linear_combination") {
    throw SerializeError("document is not a linear_combination");
  }
  LinearCombination lc;
  for (const auto& jt : j.at("terms")) lc.terms.push_back(contraction_from_json(jt));
  return lc;
}

std::string serialize(const LinearCombination& lc) { return to_json(lc).dump(2); }

LinearCombination deserialize(const std::string& doc) {
  json j;
  try {
    j = json::parse(doc);
  } catch (const json::exception& e) {
    throw SerializeError(std::string("malformed document: ") + e.what());
  }
  try {
    return combination_from_json(j);
  } catch (const json::exception& e) {
    throw SerializeError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace invar
