#pragma once

#include <string>

#include "ssctm/model.hpp"

namespace ssctm {

// Parses a model from JSON text of the form
//   {"cells": {"l", "v", "w", "n_max"}, "beta": [...],
//    "modes": [[...], ...], "lambda": [[...], ...]}.
// Throws Error on malformed JSON or a schema mismatch.  Parsing does not
// run semantic validation; call validate() on the result.
FreewayModel parse_model(const std::string& json_text);

// Reads and parses a model file.  Throws Error when unreadable.
FreewayModel load_model(const std::string& path);

// Serializes with round-trip-safe float formatting; parse(serialize(m))
// reproduces every semantic field exactly.
std::string serialize_model(const FreewayModel& model);

}  // namespace ssctm
