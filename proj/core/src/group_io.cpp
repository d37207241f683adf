#include "substrat/group_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "substrat/error.hpp"

namespace substrat {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& s) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::InvalidInput, "expected an integer, got '" + s + "'");
  }
  return value;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(value)) {
    fail(ErrorKind::InvalidInput, "expected a finite number, got '" + s + "'");
  }
  return value;
}

}  // namespace

StratifiedGroup builtin_group(std::string_view name) {
  const std::size_t colon = name.find(':');
  if (colon == std::string_view::npos) {
    fail(ErrorKind::InvalidInput, "builtin group needs parameters, e.g. heisenberg:1");
  }
  const std::string_view kind = name.substr(0, colon);
  const std::vector<std::string> args = split(name.substr(colon + 1), ',');
  if (kind == "heisenberg" && args.size() == 1) return heisenberg(parse_int(args[0]));
  if (kind == "htype" && args.size() == 2) return htype(parse_int(args[0]), parse_int(args[1]));
  if (kind == "free2step" && args.size() == 1) return free2step(parse_int(args[0]));
  if (kind == "rotfam") {
    std::vector<double> freqs;
    for (const auto& a : args) freqs.push_back(parse_double(a));
    return rotation_family(freqs);
  }
  fail(ErrorKind::InvalidInput, "unknown builtin group '" + std::string(name) + "'");
}

StratifiedGroup parse_group_json(std::string_view text) {
  nlohmann::json doc;
  try {
    // allow_exceptions, no comments; NaN/Infinity are not JSON and fail here.
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("group file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("d1") || !doc.contains("d2") || !doc.contains("c")) {
    fail(ErrorKind::InvalidInput, "group file needs fields d1, d2, c");
  }
  if (!doc["d1"].is_number_integer() || !doc["d2"].is_number_integer()) {
    fail(ErrorKind::InvalidInput, "d1 and d2 must be integers");
  }
  const int d1 = doc["d1"].get<int>();
  const int d2 = doc["d2"].get<int>();
  if (d1 < 1 || d2 < 1) fail(ErrorKind::InvalidInput, "d1 and d2 must be positive");
  const auto& c = doc["c"];
  if (!c.is_array() || static_cast<int>(c.size()) != d2) {
    fail(ErrorKind::InvalidInput, "c must have d2 entries");
  }
  StructureTensor tensor(d2, Mat::Zero(d1, d1));
  for (int l = 0; l < d2; ++l) {
    if (!c[l].is_array() || static_cast<int>(c[l].size()) != d1) {
      fail(ErrorKind::InvalidInput, "c[l] must have d1 rows");
    }
    for (int i = 0; i < d1; ++i) {
      const auto& row = c[l][i];
      if (!row.is_array() || static_cast<int>(row.size()) != d1) {
        fail(ErrorKind::InvalidInput, "c[l][i] must have d1 entries");
      }
      for (int j = 0; j < d1; ++j) {
        if (!row[j].is_number()) fail(ErrorKind::InvalidInput, "c entries must be numbers");
        const double v = row[j].get<double>();
        if (!std::isfinite(v)) fail(ErrorKind::InvalidInput, "c entries must be finite");
        tensor[l](i, j) = v;
      }
    }
  }
  return StratifiedGroup::build(std::move(tensor), "file");
}

StratifiedGroup read_group_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open group file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_group_json(buf.str());
}

StratifiedGroup load_group(const std::string& spec) {
  for (const char* prefix : {"heisenberg:", "htype:", "free2step:", "rotfam:"}) {
    if (spec.rfind(prefix, 0) == 0) return builtin_group(spec);
  }
  return read_group_file(spec);
}

}  // namespace substrat
