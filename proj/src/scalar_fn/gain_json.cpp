#include "rsg/gain_json.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "rsg/errors.hpp"

namespace rsg {

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError("expected a number, got " + j.dump());
  const auto s = j.get<std::string>();
  if (s == "inf" || s == "infinity" || s == "+inf") return kInf;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError("not a decimal number: \"" + s + "\"");
  return v;
}

Json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field \"") + key + "\" in " + j.dump());
  }
  return j.at(key);
}

void only_keys(const Json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* a : keys) known = known || k == a;
    if (!known) throw ConfigError("unknown key \"" + k + "\" in gain definition");
  }
}

std::vector<double> numbers(const Json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(number_from_json(e));
  return v;
}

Json numbers_to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_to_json(x));
  return a;
}

FnPtr shared(const Json& j) { return std::make_shared<const ComparisonFunction>(function_from_json(j)); }

Segment segment_from_json(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "affine") {
    only_keys(j, {"kind", "slope", "intercept"});
    const double b = j.contains("intercept") ? number_from_json(j["intercept"]) : 0.0;
    return seg::Affine{b, number_from_json(field(j, "slope"))};
  }
  if (kind == "cubic") {
    only_keys(j, {"kind", "c"});
    const auto c = numbers(field(j, "c"));
    if (c.size() != 4) throw ConfigError("cubic needs four coefficients c0..c3");
    return seg::Cubic{{c[0], c[1], c[2], c[3]}};
  }
  if (kind == "spline") {
    only_keys(j, {"kind", "x", "y", "d"});
    seg::Hermite h;
    h.x = numbers(field(j, "x"));
    h.y = numbers(field(j, "y"));
    h.d = numbers(field(j, "d"));
    return h;
  }
  if (kind == "branch-inverse") {
    only_keys(j, {"kind", "of", "lo", "hi", "scale"});
    const double scale = j.contains("scale") ? number_from_json(j["scale"]) : 1.0;
    return seg::BranchInverse{shared(field(j, "of")), number_from_json(field(j, "lo")),
                              number_from_json(field(j, "hi")), scale};
  }
  if (kind == "compose") {
    only_keys(j, {"kind", "outer", "inner"});
    return seg::Compose{shared(field(j, "outer")), shared(field(j, "inner"))};
  }
  if (kind == "sum") {
    only_keys(j, {"kind", "terms"});
    seg::Sum s;
    for (const auto& t : field(j, "terms")) {
      only_keys(t, {"w", "f"});
      s.terms.emplace_back(number_from_json(field(t, "w")), shared(field(t, "f")));
    }
    return s;
  }
  if (kind == "min") {
    only_keys(j, {"kind", "of"});
    seg::Min m;
    for (const auto& f : field(j, "of")) m.of.push_back(shared(f));
    return m;
  }
  throw ConfigError("unknown gain kind \"" + kind + "\"");
}

Json segment_to_json(const Segment& s) {
  if (const auto* a = std::get_if<seg::Affine>(&s)) {
    return {{"kind", "affine"}, {"slope", number_to_json(a->slope)}, {"intercept", number_to_json(a->v0)}};
  }
  if (const auto* c = std::get_if<seg::Cubic>(&s)) {
    return {{"kind", "cubic"}, {"c", numbers_to_json({c->c.begin(), c->c.end()})}};
  }
  if (const auto* h = std::get_if<seg::Hermite>(&s)) {
    return {{"kind", "spline"}, {"x", numbers_to_json(h->x)}, {"y", numbers_to_json(h->y)},
            {"d", numbers_to_json(h->d)}};
  }
  if (const auto* b = std::get_if<seg::BranchInverse>(&s)) {
    return {{"kind", "branch-inverse"}, {"of", function_to_json(*b->of)},
            {"lo", number_to_json(b->lo)}, {"hi", number_to_json(b->hi)},
            {"scale", number_to_json(b->input_scale)}};
  }
  if (const auto* c = std::get_if<seg::Compose>(&s)) {
    return {{"kind", "compose"}, {"outer", function_to_json(*c->outer)},
            {"inner", function_to_json(*c->inner)}};
  }
  if (const auto* sum = std::get_if<seg::Sum>(&s)) {
    Json terms = Json::array();
    for (const auto& [w, f] : sum->terms) {
      terms.push_back({{"w", number_to_json(w)}, {"f", function_to_json(*f)}});
    }
    return {{"kind", "sum"}, {"terms", terms}};
  }
  const auto& m = std::get<seg::Min>(s);
  Json of = Json::array();
  for (const auto& f : m.of) of.push_back(function_to_json(*f));
  return {{"kind", "min"}, {"of", of}};
}

}  // namespace

ComparisonFunction function_from_json(const Json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "piecewise") {
    only_keys(j, {"kind", "pieces"});
    std::vector<Piece> pieces;
    for (const auto& p : field(j, "pieces")) {
      only_keys(p, {"start", "segment"});
      pieces.push_back({number_from_json(field(p, "start")), segment_from_json(field(p, "segment"))});
    }
    return ComparisonFunction(std::move(pieces));
  }
  if (kind == "linear") {
    only_keys(j, {"kind", "x", "y", "tail_slope"});
    const auto x = numbers(field(j, "x"));
    const auto y = numbers(field(j, "y"));
    return ComparisonFunction::piecewise_linear(x, y, number_from_json(field(j, "tail_slope")));
  }
  return ComparisonFunction({Piece{0.0, segment_from_json(j)}});
}

Json function_to_json(const ComparisonFunction& f) {
  const auto& ps = f.pieces();
  if (ps.size() == 1) return segment_to_json(ps[0].segment);
  Json pieces = Json::array();
  for (const auto& p : ps) {
    pieces.push_back({{"start", number_to_json(p.start)}, {"segment", segment_to_json(p.segment)}});
  }
  return {{"kind", "piecewise"}, {"pieces", pieces}};
}

Gain gain_from_json(const Json& j) {
  if (j.is_object() && j.contains("branches")) {
    only_keys(j, {"kind", "branches"});
    if (field(j, "kind") != "piecewise") throw ConfigError("branches are only allowed on piecewise gains");
    std::vector<GainBranch> branches;
    for (const auto& b : j["branches"]) {
      only_keys(b, {"start", "fn"});
      branches.push_back({number_from_json(field(b, "start")), function_from_json(field(b, "fn"))});
    }
    return PiecewiseGain(std::move(branches));
  }
  return function_from_json(j);
}

Json gain_to_json(const Gain& g) {
  if (const auto* f = g.function()) return function_to_json(*f);
  Json branches = Json::array();
  for (const auto& b : g.piecewise()->branches()) {
    branches.push_back({{"start", number_to_json(b.start)}, {"fn", function_to_json(b.fn)}});
  }
  return {{"kind", "piecewise"}, {"branches", branches}};
}

}  // namespace rsg
