#pragma once

#include <string>

#include <json.hpp>

namespace substrat {

using Json = nlohmann::ordered_json;

/// Serializes with two-space indentation, keys in insertion order and every
/// floating-point number as %.17g, so equal inputs give equal bytes.
/// Throws InvalidInput on NaN or infinity anywhere in the document.
std::string dump_report(const Json& doc);

/// Inserts a real number, rejecting non-finite values.
Json finite(double value, const char* what);

}  // namespace substrat
