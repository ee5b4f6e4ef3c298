#include "semproc/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "semproc/error.hpp"

namespace semproc {

HolderFunction::HolderFunction(std::vector<double> xs, std::vector<double> ys, double cusp_amp, double cusp_center,
                               double cusp_exponent)
    : xs_(std::move(xs)), ys_(std::move(ys)), amp_(cusp_amp), center_(cusp_center), exponent_(cusp_exponent) {
  if (xs_.size() < 2 || xs_.size() != ys_.size())
    throw Error(Errc::invalid_argument, "holder function needs >= 2 matching knots");
  if (xs_.front() != 0.0 || xs_.back() != 1.0)
    throw Error(Errc::invalid_argument, "holder function knots must span [0,1]");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i - 1] < xs_[i])) throw Error(Errc::invalid_argument, "holder function knots must increase");
  if (!(exponent_ > 0.0 && exponent_ <= 1.0))
    throw Error(Errc::invalid_argument, "cusp exponent must lie in (0,1]");
}

double HolderFunction::operator()(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) throw Error(Errc::invalid_argument, "holder function evaluated outside [0,1]");
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), s);
  std::size_t k = (it == xs_.end()) ? xs_.size() - 2 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  double v;
  if (s == xs_[k]) {
    v = ys_[k];
  } else {
    const double w = (s - xs_[k]) / (xs_[k + 1] - xs_[k]);
    v = ys_[k] + w * (ys_[k + 1] - ys_[k]);
  }
  if (amp_ != 0.0) v += amp_ * std::pow(std::abs(s - center_), exponent_);
  return v;
}

double HolderFunction::integral() const {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs_.size(); ++k) total += 0.5 * (xs_[k + 1] - xs_[k]) * (ys_[k] + ys_[k + 1]);
  if (amp_ != 0.0) {
    const double e = exponent_ + 1.0;
    total += amp_ * (std::pow(center_, e) + std::pow(1.0 - center_, e)) / e;
  }
  return total;
}

std::vector<double> HolderFunction::breakpoints() const {
  std::vector<double> out(xs_.begin() + 1, xs_.end() - 1);
  if (amp_ != 0.0 && center_ > 0.0 && center_ < 1.0) out.push_back(center_);
  std::sort(out.begin(), out.end());
  return out;
}

double HolderFunction::sup_abs() const {
  double m = 0.0;
  for (double y : ys_) m = std::max(m, std::abs(y));
  if (amp_ != 0.0) m += std::abs(amp_) * std::pow(std::max(center_, 1.0 - center_), exponent_);
  return m;
}

double pl_l2_sq_distance(const HolderFunction& f1, const HolderFunction& f2) {
  if (!f1.piecewise_linear() || !f2.piecewise_linear())
    throw Error(Errc::invalid_argument, "exact L2 distance needs piecewise-linear functions");
  std::vector<double> knots = f1.xs();
  knots.insert(knots.end(), f2.xs().begin(), f2.xs().end());
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  double total = 0.0;
  double d0 = f1(knots[0]) - f2(knots[0]);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double d1 = f1(knots[k + 1]) - f2(knots[k + 1]);
    total += (knots[k + 1] - knots[k]) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
    d0 = d1;
  }
  return total;
}

// ---------------------------------------------------------------- HFunc

HFunc HFunc::constant(double c) {
  HFunc h;
  h.kind_ = Kind::constant;
  h.c_ = c;
  h.sup_ = std::abs(c);
  return h;
}

HFunc HFunc::indicator(IntervalUnion set) {
  HFunc h;
  h.kind_ = Kind::indicator;
  h.sup_ = set.empty() ? 0.0 : 1.0;
  h.set_ = std::move(set);
  return h;
}

HFunc HFunc::holder(HolderFunction f) {
  HFunc h;
  h.kind_ = Kind::holder;
  h.sup_ = f.sup_abs();
  h.holder_ = std::move(f);
  return h;
}

HFunc HFunc::custom(std::function<double(double)> f, std::vector<double> breaks, double sup_abs, std::string label) {
  HFunc h;
  h.kind_ = Kind::custom;
  h.fn_ = std::make_shared<const std::function<double(double)>>(std::move(f));
  h.breaks_ = std::move(breaks);
  h.sup_ = sup_abs;
  h.label_ = std::move(label);
  return h;
}

double HFunc::operator()(double s) const {
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::indicator: return set_.contains(s) ? 1.0 : 0.0;
    case Kind::holder: return (*holder_)(s);
    case Kind::custom: return (*fn_)(s);
  }
  return 0.0;
}

double HFunc::at_grid(std::size_t i, std::size_t n) const {
  if (kind_ == Kind::indicator)
    return set_.contains_grid(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n)) ? 1.0 : 0.0;
  return (*this)(static_cast<double>(i) / static_cast<double>(n));
}

std::vector<double> HFunc::breakpoints() const {
  switch (kind_) {
    case Kind::constant: return {};
    case Kind::indicator: return set_.breakpoints();
    case Kind::holder: return holder_->breakpoints();
    case Kind::custom: return breaks_;
  }
  return {};
}

std::optional<double> HFunc::lambda_exact() const {
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::indicator: return set_.lebesgue().to_double();
    case Kind::holder: return holder_->integral();
    case Kind::custom: return std::nullopt;
  }
  return std::nullopt;
}

std::string HFunc::label() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::constant: os << "const(" << c_ << ")"; break;
    case Kind::indicator: os << "1" << set_.str(); break;
    case Kind::holder: os << "holder[" << holder_->xs().size() << " knots]"; break;
    case Kind::custom: os << label_; break;
  }
  return os.str();
}

// ---------------------------------------------------------------- GFunc

double poly_eval(const std::vector<double>& coefs, double x) {
  double v = 0.0;
  for (auto it = coefs.rbegin(); it != coefs.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

GFunc GFunc::constant(double c) { return restricted_polynomial({c}, -inf, inf, 0.0); }
GFunc GFunc::half_line(double w) { return restricted_polynomial({1.0}, -inf, w, 0.0); }
GFunc GFunc::initial_interval(double w) { return restricted_polynomial({1.0}, 0.0, w, 0.0); }
GFunc GFunc::polynomial(std::vector<double> coefs) { return restricted_polynomial(std::move(coefs), -inf, inf, 0.0); }

GFunc GFunc::restricted_polynomial(std::vector<double> coefs, double lo, double hi, double shift) {
  if (coefs.empty()) coefs.push_back(0.0);
  GFunc g;
  g.coefs_ = std::move(coefs);
  g.lo_ = lo;
  g.hi_ = hi;
  g.shift_ = shift;
  return g;
}

GFunc GFunc::custom(std::function<double(double)> f, std::vector<double> breaks, std::string label, double sup_abs) {
  GFunc g;
  g.fn_ = std::make_shared<const std::function<double(double)>>(std::move(f));
  g.breaks_ = std::move(breaks);
  g.label_ = std::move(label);
  g.sup_ = sup_abs;
  return g;
}

double GFunc::operator()(double x) const {
  if (fn_) return (*fn_)(x);
  const double body = (x >= lo_ && x <= hi_) ? poly_eval(coefs_, x) : 0.0;
  return body + shift_;
}

GFunc GFunc::shifted(double c) const {
  if (fn_) {
    auto f = fn_;
    return custom([f, c](double x) { return (*f)(x) + c; }, breaks_, label_ + "+c", sup_ + std::abs(c));
  }
  GFunc g = *this;
  g.shift_ += c;
  return g;
}

GFunc GFunc::scaled(double a) const {
  if (fn_) {
    auto f = fn_;
    return custom([f, a](double x) { return a * (*f)(x); }, breaks_, label_ + "*a", sup_ * std::abs(a));
  }
  GFunc g = *this;
  for (double& c : g.coefs_) c *= a;
  g.shift_ *= a;
  return g;
}

std::vector<double> GFunc::breakpoints() const {
  if (fn_) return breaks_;
  std::vector<double> out;
  if (std::isfinite(lo_)) out.push_back(lo_);
  if (std::isfinite(hi_)) out.push_back(hi_);
  return out;
}

double GFunc::sup_abs() const {
  if (fn_) return sup_;
  bool constant_body = true;
  for (std::size_t k = 1; k < coefs_.size(); ++k)
    if (coefs_[k] != 0.0) constant_body = false;
  if (constant_body) {
    const double c = coefs_[0];
    const bool full = !std::isfinite(lo_) && !std::isfinite(hi_) && lo_ < 0 && hi_ > 0;
    if (full) return std::abs(c + shift_);
    return std::max(std::abs(c + shift_), std::abs(shift_));
  }
  if (std::isfinite(lo_) && std::isfinite(hi_)) {
    double bound = 0.0;
    const double r = std::max(std::abs(lo_), std::abs(hi_));
    for (std::size_t k = 0; k < coefs_.size(); ++k) bound += std::abs(coefs_[k]) * std::pow(r, static_cast<double>(k));
    return std::max(bound + std::abs(shift_), std::abs(shift_));
  }
  return inf;
}

std::string GFunc::label() const {
  if (fn_) return label_;
  std::ostringstream os;
  os.precision(17);
  const bool indicator = coefs_.size() == 1 && coefs_[0] == 1.0;
  if (indicator && lo_ == -inf && std::isfinite(hi_)) {
    os << "1{x<=" << hi_ << "}";
  } else if (indicator && lo_ == 0.0 && std::isfinite(hi_)) {
    os << "1{0<=x<=" << hi_ << "}";
  } else {
    os << "poly[";
    for (std::size_t k = 0; k < coefs_.size(); ++k) os << (k ? "," : "") << coefs_[k];
    os << "]";
    if (std::isfinite(lo_) || std::isfinite(hi_)) os << "*1[" << lo_ << "," << hi_ << "]";
  }
  if (shift_ != 0.0) os << (shift_ > 0 ? "+" : "") << shift_;
  return os.str();
}

// ---------------------------------------------------------------- QFunction

struct QFunction::Impl {
  Kind kind;
  std::optional<HFunc> h;
  std::optional<GFunc> g;
  std::vector<double> coefs;
  std::vector<QFunction> terms;
  std::function<double(double, double)> f;
  GFunc dominating;
  std::vector<double> s_breaks, x_breaks;
  bool s_continuous = true;
  std::string label;
};

QFunction QFunction::product(HFunc h, GFunc g) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::product;
  const double hs = h.sup_abs();
  if (g.closed_form() && std::isfinite(g.sup_abs())) {
    impl->dominating = GFunc::constant(hs * g.sup_abs());
  } else {
    const GFunc gc = g;
    impl->dominating = GFunc::custom([gc, hs](double x) { return hs * std::abs(gc(x)); }, g.breakpoints(),
                                     "|" + g.label() + "|*" + std::to_string(hs));
  }
  impl->s_breaks = h.breakpoints();
  impl->x_breaks = g.breakpoints();
  impl->s_continuous = true;  // finitely many breakpoints: λ-a.e. continuous
  impl->label = h.label() + "*" + g.label();
  impl->h = std::move(h);
  impl->g = std::move(g);
  QFunction q;
  q.impl_ = std::move(impl);
  return q;
}

QFunction QFunction::combination(std::vector<double> coefs, std::vector<QFunction> terms) {
  if (coefs.size() != terms.size() || terms.empty())
    throw Error(Errc::invalid_argument, "combination needs matching nonempty coefficient and term lists");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::combination;
  std::vector<GFunc> doms;
  double const_bound = 0.0;
  bool all_const = true;
  std::vector<double> sb, xb;
  std::string label;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const GFunc& d = terms[k].dominating();
    doms.push_back(d);
    if (d.closed_form() && std::isfinite(d.sup_abs()) && d.coefs().size() == 1) {
      const_bound += std::abs(coefs[k]) * d.sup_abs();
    } else {
      all_const = false;
    }
    auto s = terms[k].s_breaks();
    sb.insert(sb.end(), s.begin(), s.end());
    auto x = terms[k].x_breaks();
    xb.insert(xb.end(), x.begin(), x.end());
    impl->s_continuous = impl->s_continuous && terms[k].s_continuous();
    label += (k ? " + " : "") + std::to_string(coefs[k]) + "*(" + terms[k].label() + ")";
  }
  std::sort(sb.begin(), sb.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  std::sort(xb.begin(), xb.end());
  xb.erase(std::unique(xb.begin(), xb.end()), xb.end());
  if (all_const) {
    impl->dominating = GFunc::constant(const_bound);
  } else {
    const auto cs = coefs;
    impl->dominating = GFunc::custom(
        [doms, cs](double x) {
          double v = 0.0;
          for (std::size_t k = 0; k < doms.size(); ++k) v += std::abs(cs[k]) * doms[k](x);
          return v;
        },
        xb, "dominating(" + label + ")");
  }
  impl->s_breaks = std::move(sb);
  impl->x_breaks = std::move(xb);
  impl->label = std::move(label);
  impl->coefs = std::move(coefs);
  impl->terms = std::move(terms);
  QFunction q;
  q.impl_ = std::move(impl);
  return q;
}

QFunction QFunction::generic(std::function<double(double, double)> f, GFunc dominating, std::vector<double> s_breaks,
                             std::vector<double> x_breaks, bool s_continuous, std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::generic;
  impl->f = std::move(f);
  impl->dominating = std::move(dominating);
  impl->s_breaks = std::move(s_breaks);
  impl->x_breaks = std::move(x_breaks);
  impl->s_continuous = s_continuous;
  impl->label = std::move(label);
  QFunction q;
  q.impl_ = std::move(impl);
  return q;
}

QFunction::Kind QFunction::kind() const { return impl_->kind; }

double QFunction::operator()(double s, double x) const {
  switch (impl_->kind) {
    case Kind::product: return (*impl_->h)(s) * (*impl_->g)(x);
    case Kind::combination: {
      double v = 0.0;
      for (std::size_t k = 0; k < impl_->terms.size(); ++k) v += impl_->coefs[k] * impl_->terms[k](s, x);
      return v;
    }
    case Kind::generic: return impl_->f(s, x);
  }
  return 0.0;
}

double QFunction::at_grid(std::size_t i, std::size_t n, double x) const {
  switch (impl_->kind) {
    case Kind::product: return impl_->h->at_grid(i, n) * (*impl_->g)(x);
    case Kind::combination: {
      double v = 0.0;
      for (std::size_t k = 0; k < impl_->terms.size(); ++k) v += impl_->coefs[k] * impl_->terms[k].at_grid(i, n, x);
      return v;
    }
    case Kind::generic: return impl_->f(static_cast<double>(i) / static_cast<double>(n), x);
  }
  return 0.0;
}

const GFunc& QFunction::dominating() const { return impl_->dominating; }
bool QFunction::s_continuous() const { return impl_->s_continuous; }
std::vector<double> QFunction::s_breaks() const { return impl_->s_breaks; }
std::vector<double> QFunction::x_breaks() const { return impl_->x_breaks; }
std::string QFunction::label() const { return impl_->label; }

const HFunc& QFunction::h() const {
  if (impl_->kind != Kind::product) throw Error(Errc::invalid_argument, "not a product q");
  return *impl_->h;
}
const GFunc& QFunction::g() const {
  if (impl_->kind != Kind::product) throw Error(Errc::invalid_argument, "not a product q");
  return *impl_->g;
}
const std::vector<double>& QFunction::coefs() const { return impl_->coefs; }
const std::vector<QFunction>& QFunction::terms() const { return impl_->terms; }

std::optional<std::vector<QFunction::ProductTerm>> QFunction::product_terms() const {
  std::vector<ProductTerm> out;
  switch (impl_->kind) {
    case Kind::product: out.push_back({1.0, &*impl_->h, &*impl_->g}); return out;
    case Kind::generic: return std::nullopt;
    case Kind::combination:
      for (std::size_t k = 0; k < impl_->terms.size(); ++k) {
        auto sub = impl_->terms[k].product_terms();
        if (!sub) return std::nullopt;
        for (auto t : *sub) {
          t.coef *= impl_->coefs[k];
          out.push_back(t);
        }
      }
      return out;
  }
  return std::nullopt;
}

}  // namespace semproc
