#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace abm::serve {

/// Validator for the JSON Schema subset used by the protocol file: $ref (local), type, const,
/// enum, properties, required, additionalProperties, items, minItems, oneOf, anyOf, minimum,
/// maximum, exclusiveMinimum, minLength, pattern.
class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema) : root_(std::move(schema)) {}

  /// nullopt when valid, else a description of the first violation with its instance path.
  /// `ref` selects the subschema, e.g. "#/definitions/snapshot"; "#" is the whole schema.
  [[nodiscard]] std::optional<std::string> check(const nlohmann::json& instance, std::string_view ref = "#") const;
  [[nodiscard]] bool valid(const nlohmann::json& instance, std::string_view ref = "#") const {
    return !check(instance, ref).has_value();
  }

 private:
  const nlohmann::json& resolve(std::string_view ref) const;
  std::optional<std::string> check(const nlohmann::json& schema, const nlohmann::json& x, const std::string& path) const;

  nlohmann::json root_;
};

/// The protocol schema shipped in schemas/protocol.schema.json.
const SchemaValidator& protocol_validator();

}  // namespace abm::serve
