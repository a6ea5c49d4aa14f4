#include "rsg/comparison_function.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bisection.hpp"
#include "rsg/detail/formulas.hpp"
#include "rsg/errors.hpp"
#include "rsg/kernels.hpp"

namespace rsg {
namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

std::size_t hermite_interval(const seg::Hermite& h, double s) {
  const auto it = std::upper_bound(h.x.begin(), h.x.end(), s);
  const auto k = static_cast<std::ptrdiff_t>(it - h.x.begin()) - 1;
  const auto last = static_cast<std::ptrdiff_t>(h.x.size()) - 2;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, last));
}

double eval_segment(const Piece& p, double s) {
  return std::visit(
      Overload{
          [&](const seg::Affine& a) { return detail::affine_at(s, p.start, a.v0, a.slope); },
          [&](const seg::Cubic& c) { return detail::cubic_at(s, c.c.data()); },
          [&](const seg::Hermite& h) {
            const auto k = hermite_interval(h, s);
            return detail::hermite_at(s, h.x[k], h.h[k], h.y[k], h.a1[k], h.a2[k], h.a3[k]);
          },
          [&](const seg::BranchInverse& b) {
            try {
              return detail::bisect(*b.of, b.input_scale * s, b.lo, b.hi);
            } catch (const BracketError& e) {
              throw NonConvergence(std::string("branch inverse: ") + e.what());
            }
          },
          [&](const seg::Compose& c) { return (*c.outer)((*c.inner)(s)); },
          [&](const seg::Sum& sum) {
            double acc = 0.0;
            for (const auto& [w, f] : sum.terms) acc = acc + w * (*f)(s);
            return acc;
          },
          [&](const seg::Min& m) {
            double best = (*m.of[0])(s);
            for (std::size_t k = 1; k < m.of.size(); ++k) {
              const double v = (*m.of[k])(s);
              best = v < best ? v : best;
            }
            return best;
          },
      },
      p.segment);
}

void eval_segment_many(const Piece& p, std::span<const double> s, std::span<double> out) {
  const auto& k = kernels::active();
  const std::size_t n = s.size();
  std::visit(
      Overload{
          [&](const seg::Affine& a) { k.affine(s.data(), out.data(), n, p.start, a.v0, a.slope); },
          [&](const seg::Cubic& c) { k.cubic(s.data(), out.data(), n, c.c.data()); },
          [&](const seg::Hermite& h) {
            std::vector<std::int32_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) {
              idx[i] = static_cast<std::int32_t>(hermite_interval(h, s[i]));
            }
            k.hermite(s.data(), idx.data(), out.data(), n, h.x.data(), h.h.data(), h.y.data(),
                      h.a1.data(), h.a2.data(), h.a3.data());
          },
          [&](const seg::BranchInverse& b) {
            std::vector<double> y(n);
            k.scale(b.input_scale, s.data(), y.data(), n);
            try {
              detail::bisect_many(*b.of, y, b.lo, b.hi, out);
            } catch (const BracketError& e) {
              throw NonConvergence(std::string("branch inverse: ") + e.what());
            }
          },
          [&](const seg::Compose& c) {
            std::vector<double> mid(n);
            c.inner->eval_many(s, mid);
            c.outer->eval_many(mid, out);
          },
          [&](const seg::Sum& sum) {
            std::fill(out.begin(), out.end(), 0.0);
            std::vector<double> tmp(n);
            for (const auto& [w, f] : sum.terms) {
              f->eval_many(s, tmp);
              k.axpy(w, tmp.data(), out.data(), n);
            }
          },
          [&](const seg::Min& m) {
            m.of[0]->eval_many(s, out);
            std::vector<double> tmp(n);
            for (std::size_t j = 1; j < m.of.size(); ++j) {
              m.of[j]->eval_many(s, tmp);
              k.vmin(tmp.data(), out.data(), n);
            }
          },
      },
      p.segment);
}

double derivative_segment(const Piece& p, double s) {
  return std::visit(
      Overload{
          [&](const seg::Affine& a) { return a.slope; },
          [&](const seg::Cubic& c) { return c.c[1] + s * (2.0 * c.c[2] + 3.0 * c.c[3] * s); },
          [&](const seg::Hermite& h) {
            const auto k = hermite_interval(h, s);
            const double t = (s - h.x[k]) / h.h[k];
            return (h.a1[k] + t * (2.0 * h.a2[k] + 3.0 * h.a3[k] * t)) / h.h[k];
          },
          [&](const seg::BranchInverse& b) {
            const double x = eval_segment(p, s);
            return b.input_scale / b.of->derivative(x);
          },
          [&](const seg::Compose& c) {
            return c.outer->derivative((*c.inner)(s)) * c.inner->derivative(s);
          },
          [&](const seg::Sum& sum) {
            double acc = 0.0;
            for (const auto& [w, f] : sum.terms) acc += w * f->derivative(s);
            return acc;
          },
          [&](const seg::Min& m) {
            std::size_t arg = 0;
            double best = (*m.of[0])(s);
            for (std::size_t k = 1; k < m.of.size(); ++k) {
              const double v = (*m.of[k])(s);
              if (v < best) {
                best = v;
                arg = k;
              }
            }
            return m.of[arg]->derivative(s);
          },
      },
      p.segment);
}

double tail_limit(const Piece& p) {
  return std::visit(
      Overload{
          [&](const seg::Affine& a) {
            if (a.slope > 0.0) return kInf;
            return a.slope < 0.0 ? -kInf : a.v0;
          },
          [&](const seg::Cubic& c) {
            for (int k = 3; k >= 1; --k) {
              if (c.c[k] > 0.0) return kInf;
              if (c.c[k] < 0.0) return -kInf;
            }
            return c.c[0];
          },
          [&](const seg::Hermite& h) { return h.y.back(); },
          [&](const seg::BranchInverse& b) { return b.hi; },
          [&](const seg::Compose& c) {
            const double inner = c.inner->limit_at_infinity();
            return std::isinf(inner) ? c.outer->limit_at_infinity() : (*c.outer)(inner);
          },
          [&](const seg::Sum& sum) {
            double acc = 0.0;
            for (const auto& [w, f] : sum.terms) acc += w * f->limit_at_infinity();
            return acc;
          },
          [&](const seg::Min& m) {
            double best = kInf;
            for (const auto& f : m.of) best = std::min(best, f->limit_at_infinity());
            return best;
          },
      },
      p.segment);
}

void validate_hermite(const seg::Hermite& h) {
  if (h.x.size() < 2 || h.y.size() != h.x.size() || h.d.size() != h.x.size()) {
    throw DomainError("hermite segment needs at least two knots with matching y and d");
  }
  for (std::size_t i = 1; i < h.x.size(); ++i) {
    if (!(h.x[i] > h.x[i - 1])) throw DomainError("hermite knots must be strictly increasing");
  }
}

seg::Hermite make_hermite(std::vector<double> x, std::vector<double> y, std::vector<double> d) {
  seg::Hermite h;
  h.x = std::move(x);
  h.y = std::move(y);
  h.d = std::move(d);
  validate_hermite(h);
  const std::size_t m = h.x.size() - 1;
  h.h.resize(m);
  h.a1.resize(m);
  h.a2.resize(m);
  h.a3.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double hk = h.x[k + 1] - h.x[k];
    const double dy = h.y[k + 1] - h.y[k];
    const double m0 = hk * h.d[k];
    const double m1 = hk * h.d[k + 1];
    h.h[k] = hk;
    h.a1[k] = m0;
    h.a2[k] = 3.0 * dy - 2.0 * m0 - m1;
    h.a3[k] = -2.0 * dy + m0 + m1;
  }
  return h;
}

FnPtr share(const ComparisonFunction& f) { return std::make_shared<const ComparisonFunction>(f); }

}  // namespace

ComparisonFunction::ComparisonFunction(std::vector<Piece> pieces) {
  if (pieces.empty()) throw DomainError("comparison function needs at least one piece");
  if (pieces.front().start != 0.0) throw DomainError("first piece must start at 0");
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    if (!(pieces[i].start > pieces[i - 1].start)) {
      throw DomainError("piece breakpoints must be strictly increasing");
    }
  }
  for (auto& p : pieces) {
    if (auto* h = std::get_if<seg::Hermite>(&p.segment)) {
      if (h->h.size() + 1 != h->x.size()) *h = make_hermite(h->x, h->y, h->d);
    }
    if (auto* m = std::get_if<seg::Min>(&p.segment); m != nullptr && m->of.empty()) {
      throw DomainError("min segment needs at least one function");
    }
  }
  limit_ = tail_limit(pieces.back());
  pieces_ = std::make_shared<const std::vector<Piece>>(std::move(pieces));
}

ComparisonFunction ComparisonFunction::identity() { return affine(1.0, 0.0); }

ComparisonFunction ComparisonFunction::affine(double slope, double intercept) {
  return ComparisonFunction({Piece{0.0, seg::Affine{intercept, slope}}});
}

ComparisonFunction ComparisonFunction::cubic(std::array<double, 4> c) {
  return ComparisonFunction({Piece{0.0, seg::Cubic{c}}});
}

ComparisonFunction ComparisonFunction::piecewise_linear(std::span<const double> x,
                                                        std::span<const double> y,
                                                        double tail_slope) {
  if (x.size() < 1 || x.size() != y.size()) throw DomainError("piecewise_linear: bad knots");
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    pieces.push_back({x[k], seg::Affine{y[k], (y[k + 1] - y[k]) / (x[k + 1] - x[k])}});
  }
  pieces.push_back({x.back(), seg::Affine{y.back(), tail_slope}});
  return ComparisonFunction(std::move(pieces));
}

ComparisonFunction ComparisonFunction::hermite(std::vector<double> x, std::vector<double> y,
                                               std::vector<double> d) {
  const double xe = x.back();
  const double ye = y.back();
  const double de = d.back();
  std::vector<Piece> pieces;
  pieces.push_back({0.0, make_hermite(std::move(x), std::move(y), std::move(d))});
  if (std::get<seg::Hermite>(pieces[0].segment).x.front() != 0.0) {
    throw DomainError("hermite function must have its first knot at 0");
  }
  pieces.push_back({xe, seg::Affine{ye, de}});
  return ComparisonFunction(std::move(pieces));
}

ComparisonFunction ComparisonFunction::branch_inverse(const ComparisonFunction& of, double lo,
                                                      double hi, double input_scale) {
  if (!(hi > lo) || lo < 0.0) throw DomainError("branch_inverse: bracket must satisfy 0 <= lo < hi");
  if (!(input_scale > 0.0)) throw DomainError("branch_inverse: input scale must be positive");
  return ComparisonFunction({Piece{0.0, seg::BranchInverse{share(of), lo, hi, input_scale}}});
}

ComparisonFunction ComparisonFunction::compose(const ComparisonFunction& outer,
                                               const ComparisonFunction& inner) {
  return ComparisonFunction({Piece{0.0, seg::Compose{share(outer), share(inner)}}});
}

ComparisonFunction ComparisonFunction::sum(
    std::vector<std::pair<double, ComparisonFunction>> terms) {
  seg::Sum s;
  for (auto& [w, f] : terms) s.terms.emplace_back(w, share(f));
  return ComparisonFunction({Piece{0.0, std::move(s)}});
}

ComparisonFunction ComparisonFunction::minimum(std::vector<ComparisonFunction> fs) {
  seg::Min m;
  for (auto& f : fs) m.of.push_back(share(f));
  return ComparisonFunction({Piece{0.0, std::move(m)}});
}

ComparisonFunction ComparisonFunction::scaled(double w, const ComparisonFunction& f) {
  return sum({{w, f}});
}

std::size_t ComparisonFunction::piece_index(double s) const {
  const auto& p = *pieces_;
  const auto it = std::upper_bound(p.begin(), p.end(), s,
                                   [](double v, const Piece& q) { return v < q.start; });
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - p.begin() - 1, 0));
}

double ComparisonFunction::operator()(double s) const {
  if (s < 0.0 || std::isnan(s)) throw DomainError("comparison function evaluated at negative argument");
  return eval_segment((*pieces_)[piece_index(s)], s);
}

void ComparisonFunction::eval_many(std::span<const double> s, std::span<double> out) const {
  if (out.size() != s.size()) throw DomainError("eval_many: output size mismatch");
  for (double v : s) {
    if (v < 0.0 || std::isnan(v)) throw DomainError("comparison function evaluated at negative argument");
  }
  const auto& p = *pieces_;
  if (p.size() == 1) {
    eval_segment_many(p[0], s, out);
    return;
  }
  std::vector<std::vector<std::size_t>> groups(p.size());
  for (std::size_t i = 0; i < s.size(); ++i) groups[piece_index(s[i])].push_back(i);
  std::vector<double> gs, gout;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto& g = groups[k];
    if (g.empty()) continue;
    gs.resize(g.size());
    gout.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) gs[j] = s[g[j]];
    eval_segment_many(p[k], gs, gout);
    for (std::size_t j = 0; j < g.size(); ++j) out[g[j]] = gout[j];
  }
}

std::vector<double> ComparisonFunction::eval_many(std::span<const double> s) const {
  std::vector<double> out(s.size());
  eval_many(s, out);
  return out;
}

double ComparisonFunction::left_limit(double s) const {
  const auto k = piece_index(s);
  const auto& p = *pieces_;
  if (k > 0 && p[k].start == s) return eval_segment(p[k - 1], s);
  return eval_segment(p[k], s);
}

double ComparisonFunction::derivative(double s) const {
  return derivative_segment((*pieces_)[piece_index(s)], s);
}

double ComparisonFunction::max_seam_gap() const {
  double gap = 0.0;
  const auto& p = *pieces_;
  for (std::size_t k = 1; k < p.size(); ++k) {
    gap = std::max(gap, std::fabs(eval_segment(p[k - 1], p[k].start) - eval_segment(p[k], p[k].start)));
  }
  return gap;
}

ClassKReport check_class_k(const ComparisonFunction& f, std::span<const double> grid) {
  if (std::fabs(f(0.0)) > 1e-12) return {false, 0.0, "f(0) != 0"};
  if (grid.empty()) return {true, std::nan(""), ""};
  const auto v = f.eval_many(grid);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(v[i] > v[i - 1])) return {false, grid[i], "not strictly increasing"};
  }
  return {true, std::nan(""), ""};
}

PiecewiseGain::PiecewiseGain(std::vector<GainBranch> branches) : branches_(std::move(branches)) {
  if (branches_.empty() || branches_.front().start != 0.0) {
    throw DomainError("piecewise gain must start with a branch at 0");
  }
  for (std::size_t k = 1; k < branches_.size(); ++k) {
    const double s = branches_[k].start;
    if (!(s > branches_[k - 1].start)) throw DomainError("gain branches must be strictly ordered");
    const double left = branches_[k - 1].fn(s);
    const double right = branches_[k].fn(s);
    if (left - right > 1e-9) {
      std::ostringstream os;
      os << "downward jump at " << s << " (" << left << " -> " << right << ")";
      throw DomainError(os.str());
    }
    if (right - left > 1e-9) jumps_.push_back({s, left, right});
  }
}

std::size_t PiecewiseGain::branch_index(double s) const {
  const auto it = std::upper_bound(branches_.begin(), branches_.end(), s,
                                   [](double v, const GainBranch& b) { return v < b.start; });
  return static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - branches_.begin() - 1, 0));
}

double PiecewiseGain::operator()(double s) const {
  if (s < 0.0 || std::isnan(s)) throw DomainError("gain evaluated at negative argument");
  return branches_[branch_index(s)].fn(s);
}

double PiecewiseGain::left_limit(double s) const {
  const auto k = branch_index(s);
  if (k > 0 && branches_[k].start == s) return branches_[k - 1].fn(s);
  return branches_[k].fn.left_limit(s);
}

void PiecewiseGain::eval_many(std::span<const double> s, std::span<double> out) const {
  std::vector<std::vector<std::size_t>> groups(branches_.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] < 0.0 || std::isnan(s[i])) throw DomainError("gain evaluated at negative argument");
    groups[branch_index(s[i])].push_back(i);
  }
  std::vector<double> gs, gout;
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const auto& g = groups[k];
    if (g.empty()) continue;
    gs.resize(g.size());
    gout.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) gs[j] = s[g[j]];
    branches_[k].fn.eval_many(gs, gout);
    for (std::size_t j = 0; j < g.size(); ++j) out[g[j]] = gout[j];
  }
}

double PiecewiseGain::limit_at_infinity() const { return branches_.back().fn.limit_at_infinity(); }

double Gain::operator()(double s) const {
  return std::visit([s](const auto& g) { return g(s); }, v_);
}

double Gain::left_limit(double s) const {
  return std::visit([s](const auto& g) { return g.left_limit(s); }, v_);
}

void Gain::eval_many(std::span<const double> s, std::span<double> out) const {
  std::visit([&](const auto& g) { g.eval_many(s, out); }, v_);
}

std::vector<double> Gain::eval_many(std::span<const double> s) const {
  std::vector<double> out(s.size());
  eval_many(s, out);
  return out;
}

double Gain::limit_at_infinity() const {
  return std::visit([](const auto& g) { return g.limit_at_infinity(); }, v_);
}

}  // namespace rsg
