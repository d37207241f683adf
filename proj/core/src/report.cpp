#include "substrat/report.hpp"

#include <cmath>
#include <cstdio>

#include "substrat/error.hpp"

namespace substrat {
namespace {

void write(const Json& v, std::string& out, int depth) {
  const std::string pad(2 * depth, ' ');
  const std::string inner(2 * (depth + 1), ' ');
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        write(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write(v[i], out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = v.get<double>();
      if (!std::isfinite(x)) fail(ErrorKind::InvalidInput, "non-finite number in report");
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string s(buf);
      // Keep floats recognisable as floats.
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_report(const Json& doc) {
  std::string out;
  write(doc, out, 0);
  out += "\n";
  return out;
}

Json finite(double value, const char* what) {
  if (!std::isfinite(value)) {
    fail(ErrorKind::InvalidInput, std::string("non-finite value for ") + what);
  }
  return Json(value);
}

}  // namespace substrat
