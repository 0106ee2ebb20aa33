#include "circumnav/scenario.hpp"

#include <cstdlib>

#include "circumnav/errors.hpp"

namespace circumnav {

std::string family_name(Scenario::Family family) {
  switch (family) {
    case Scenario::Family::kConstant: return "constant";
    case Scenario::Family::kCircle: return "circle";
    case Scenario::Family::kNonholonomic: return "nonholonomic";
    case Scenario::Family::kFixedSpeedNonholonomic: return "fixed-speed";
  }
  return "?";
}

namespace {

double parse_number(const std::string& text, const std::string& whole) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw ValidationError("bad number '" + text + "' in scenario '" + whole + "'");
  }
  return v;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t colon = text.find(':', pos);
    if (colon == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, colon - pos));
    pos = colon + 1;
  }

  Scenario sc;
  const std::string& kind = parts[0];
  if (kind == "constant") {
    sc.family = Scenario::Family::kConstant;
    if (parts.size() != 2) throw ValidationError("expected constant:<speed>, got '" + text + "'");
    sc.v = parse_number(parts[1], text);
  } else if (kind == "circle") {
    sc.family = Scenario::Family::kCircle;
    if (parts.size() < 2 || parts.size() > 3) {
      throw ValidationError("expected circle:<omega>[:<radius>], got '" + text + "'");
    }
    sc.omega = parse_number(parts[1], text);
    sc.r = parts.size() == 3 ? parse_number(parts[2], text) : 20.0;
    if (sc.r <= 0.0) throw ValidationError("circle radius must be positive");
  } else if (kind == "nonholonomic") {
    sc.family = Scenario::Family::kNonholonomic;
    if (parts.size() != 1) throw ValidationError("nonholonomic takes no parameters");
  } else if (kind == "fixed") {
    sc.family = Scenario::Family::kFixedSpeedNonholonomic;
    if (parts.size() != 2) throw ValidationError("expected fixed:<speed>, got '" + text + "'");
    sc.fixed_speed = parse_number(parts[1], text);
  } else {
    throw ValidationError("unknown scenario '" + text +
                          "' (expected constant:<v>, circle:<omega>[:<r>], nonholonomic, "
                          "fixed:<speed>)");
  }
  return sc;
}

}  // namespace circumnav
