#pragma once

#include <string>
#include <string_view>

#include "substrat/group.hpp"

namespace substrat {

/// Parses "heisenberg:n", "htype:d1,d2", "free2step:d1" or "rotfam:f1,f2,...".
/// Throws InvalidInput on unknown names or malformed parameters.
StratifiedGroup builtin_group(std::string_view name);

/// Parses a JSON document {"d1": int, "d2": int, "c": [[[...]]]} in raw
/// coordinates. Non-finite entries are rejected.
StratifiedGroup parse_group_json(std::string_view text);

StratifiedGroup read_group_file(const std::string& path);

/// Builtin name if it has one of the builtin prefixes, otherwise a file path.
StratifiedGroup load_group(const std::string& spec);

}  // namespace substrat
