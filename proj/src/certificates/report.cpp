#include <algorithm>
#include <iomanip>
#include <sstream>

#include "rsg/certificates.hpp"

namespace rsg {

bool Region::contains(double v) const {
  switch (kind) {
    case RegionKind::all: return true;
    case RegionKind::sublevel: return v <= M;
    case RegionKind::superlevel: return v >= M;
  }
  return false;
}

std::string Region::describe() const {
  switch (kind) {
    case RegionKind::all: return "all";
    case RegionKind::sublevel: return "V <= " + format_number(M);
    case RegionKind::superlevel: return "V >= " + format_number(M);
  }
  return "?";
}

bool CheckReport::passed() const {
  if (violation_count != 0 || !violations.empty()) return false;
  return std::all_of(parts.begin(), parts.end(),
                     [](const CheckReport& p) { return p.informational || p.passed(); });
}

Json to_json(const CheckReport& r) {
  Json j;
  j["id"] = r.id;
  j["passed"] = r.passed();
  if (r.informational) j["informational"] = true;
  if (!r.region.empty()) j["region"] = r.region;
  if (r.samples > 0) j["samples"] = r.samples;
  if (r.min_margin) j["min_margin"] = number_to_json(*r.min_margin);
  if (r.argmin) j["argmin"] = number_to_json(*r.argmin);
  j["violation_count"] = r.violation_count;
  Json v = Json::array();
  for (const auto& e : r.violations) {
    Json s = Json::array();
    for (double c : e.state) s.push_back(number_to_json(c));
    v.push_back({{"state", s}, {"margin", number_to_json(e.margin)}});
  }
  j["violations"] = v;
  if (!r.witness_runs.empty()) {
    Json w = Json::array();
    for (const auto& [a, b] : r.witness_runs) w.push_back({number_to_json(a), number_to_json(b)});
    j["witness_runs"] = w;
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  if (!r.parts.empty()) {
    Json parts = Json::array();
    for (const auto& p : r.parts) parts.push_back(to_json(p));
    j["parts"] = parts;
  }
  return j;
}

void print_table(std::ostream& os, const CheckReport& r, int depth) {
  std::ostringstream name;
  name << std::string(static_cast<std::size_t>(2 * depth), ' ') << r.id;
  const char* status = r.passed() ? "PASS" : (r.informational ? "info" : "FAIL");
  os << std::left << std::setw(4) << status << "  " << std::setw(40) << name.str();
  if (r.min_margin) os << "  margin " << std::setw(14) << format_number(*r.min_margin);
  if (r.argmin) os << "  at " << format_number(*r.argmin);
  if (r.violation_count > 0) os << "  violations " << r.violation_count;
  if (!r.region.empty()) os << "  [" << r.region << "]";
  os << '\n';
  if (!r.witness_runs.empty()) {
    os << std::string(static_cast<std::size_t>(2 * depth + 6), ' ') << "witness runs:";
    for (const auto& [a, b] : r.witness_runs) {
      os << " [" << format_number(a) << ", " << format_number(b) << "]";
    }
    os << '\n';
  }
  for (const auto& n : r.notes) {
    os << std::string(static_cast<std::size_t>(2 * depth + 6), ' ') << "note: " << n << '\n';
  }
  for (const auto& p : r.parts) print_table(os, p, depth + 1);
}

}  // namespace rsg
