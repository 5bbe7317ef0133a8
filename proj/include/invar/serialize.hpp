#pragma once

#include "invar/term.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace invar {

struct SerializeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const Contraction& c);
nlohmann::json to_json(const LinearCombination& lc);

Contraction contraction_from_json(const nlohmann::json& j);
LinearCombination combination_from_json(const nlohmann::json& j);

std::string serialize(const LinearCombination& lc);
LinearCombination deserialize(const std::string& doc);

}  // namespace invar
