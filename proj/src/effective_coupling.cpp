#include "qgraph/effective_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qgraph {

NearPole::NearPole(Complex k, double condition)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "effective coupling evaluated near a pole at k = " << k << " (condition " << condition << ")";
        return os.str();
      }()),
      k_(k),
      condition_(condition) {}

namespace {

CMatrix inner_matrix(const CMatrix& u4, Complex k) {
  return (1.0 - k) * u4 - (k + 1.0) * CMatrix::Identity(u4.rows(), u4.cols());
}

double condition_number(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double hadamard_bound(const CMatrix& a) {
  double bound = 1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) bound *= a.row(i).norm();
  return bound;
}

Complex determinant(const CMatrix& a) {
  if (a.rows() == 0) return 1.0;
  return a.partialPivLu().determinant();
}

// Sample points on |k| = radius, kept away from `avoid`.
std::vector<Complex> circle_samples(std::size_t count, const IdentityTestOptions& opt,
                                    const std::vector<Complex>& avoid) {
  std::mt19937_64 rng(opt.seed.value_or(0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double spacing = 2.0 * kPi / static_cast<double>(count);
  std::vector<Complex> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    double frac = opt.seed ? unit(rng) : opt.angle_offset;
    Complex k = std::polar(opt.radius, spacing * (static_cast<double>(j) + frac));
    for (int retry = 0; retry < 64; ++retry) {
      const bool clash = std::any_of(avoid.begin(), avoid.end(), [&](Complex p) { return std::abs(p - k) < 1e-6; });
      if (!clash) break;
      frac = unit(rng);
      k = std::polar(opt.radius, spacing * (static_cast<double>(j) + frac));
    }
    out.push_back(k);
  }
  return out;
}

// Top block row of the cleared determinant for the eigenvalue branch
// lambda = num(k)/den(k):  [[den U1 - num I, den (1-k) U2], [U3, Q]].
CMatrix branch_matrix(const GlobalCoupling& c, Complex num, Complex den, Complex k) {
  const auto a = static_cast<Eigen::Index>(c.internal_dim());
  const auto b = static_cast<Eigen::Index>(c.lead_count());
  CMatrix out(a + b, a + b);
  out.topLeftCorner(a, a) = den * c.u1() - num * CMatrix::Identity(a, a);
  out.topRightCorner(a, b) = den * (1.0 - k) * c.u2();
  out.bottomLeftCorner(b, a) = c.u3();
  out.bottomRightCorner(b, b) = inner_matrix(c.u4(), k);
  return out;
}

struct IdentityResidual {
  double max_value = 0.0;
  double max_scale = 0.0;
  double relative() const { return max_scale > 0.0 ? max_value / max_scale : 0.0; }
};

}  // namespace

EffectiveCoupling::EffectiveCoupling(GlobalCoupling source)
    : source_(std::move(source)), u1_(source_.u1()), u2_(source_.u2()), u3_(source_.u3()), u4_(source_.u4()) {
  Eigen::ComplexEigenSolver<CMatrix> es(u4_, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Complex mu = es.eigenvalues()(i);
    if (std::abs(mu + 1.0) > 1e-12) poles_.push_back((mu - 1.0) / (mu + 1.0));
  }
}

CMatrix EffectiveCoupling::evaluate(Complex k) const {
  if (u4_.rows() == 0) return u1_;
  const CMatrix q = inner_matrix(u4_, k);
  const double cond = condition_number(q);
  if (!(cond <= kConditionCap)) throw NearPole(k, cond);
  return u1_ - (1.0 - k) * u2_ * q.partialPivLu().solve(u3_);
}

std::vector<Complex> EffectiveCoupling::pole_set() const { return poles_; }

double EffectiveCoupling::distance_to_poles(Complex k) const {
  double d = std::numeric_limits<double>::infinity();
  for (Complex p : poles_) d = std::min(d, std::abs(p - k));
  return d;
}

CMatrix effective_at(const GlobalCoupling& coupling, Complex k) { return EffectiveCoupling(coupling).evaluate(k); }

std::string to_string(AsymptoticsFlag flag) { return flag == AsymptoticsFlag::kWeyl ? "weyl" : "non-weyl"; }

std::string to_string(Branch branch) {
  switch (branch) {
    case Branch::kOneMinusOverOnePlus: return "(1-k)/(1+k)";
    case Branch::kOnePlusOverOneMinus: return "(1+k)/(1-k)";
    case Branch::kNone: break;
  }
  return "none";
}

std::string to_string(KillFluxStatus status) {
  switch (status) {
    case KillFluxStatus::kOk: return "ok";
    case KillFluxStatus::kWeyl: return "weyl";
    case KillFluxStatus::kModulusMismatch: return "modulus-mismatch";
    case KillFluxStatus::kAlreadyDecoupled: return "decoupled";
  }
  return "unknown";
}

AsymptoticsClass classify_weyl(const GlobalCoupling& coupling, const IdentityTestOptions& options) {
  const std::size_t degree = 2 * coupling.internal_count() * (coupling.lead_count() + 2);
  const auto samples = circle_samples(2 * degree + 5, options, EffectiveCoupling(coupling).pole_set());

  IdentityResidual minus, plus;
  for (Complex k : samples) {
    const CMatrix a = branch_matrix(coupling, 1.0 - k, 1.0 + k, k);  // lambda = (1-k)/(1+k)
    const CMatrix b = branch_matrix(coupling, 1.0 + k, 1.0 - k, k);  // lambda = (1+k)/(1-k)
    minus.max_value = std::max(minus.max_value, std::abs(determinant(a)));
    minus.max_scale = std::max(minus.max_scale, hadamard_bound(a));
    plus.max_value = std::max(plus.max_value, std::abs(determinant(b)));
    plus.max_scale = std::max(plus.max_scale, hadamard_bound(b));
  }

  AsymptoticsClass out;
  out.residual_minus = minus.relative();
  out.residual_plus = plus.relative();
  if (out.residual_minus < options.tolerance) {
    out.flag = AsymptoticsFlag::kNonWeyl;
    out.witness = Branch::kOneMinusOverOnePlus;
  } else if (out.residual_plus < options.tolerance) {
    out.flag = AsymptoticsFlag::kNonWeyl;
    out.witness = Branch::kOnePlusOverOneMinus;
  }
  return out;
}

GlobalCoupling conjugate(const GlobalCoupling& coupling, const CMatrix& v1, const CMatrix& v2) {
  const auto a = static_cast<Eigen::Index>(coupling.internal_dim());
  const auto b = static_cast<Eigen::Index>(coupling.lead_count());
  if (v1.rows() != a || v1.cols() != a || v2.rows() != b || v2.cols() != b)
    throw std::invalid_argument("conjugate: V1 must be 2N x 2N and V2 must be M x M");
  if (unitarity_defect(v1) >= kUnitaryTolerance || unitarity_defect(v2) >= kUnitaryTolerance)
    throw std::invalid_argument("conjugate: V1 and V2 must be unitary");
  CMatrix v = CMatrix::Zero(a + b, a + b);
  v.topLeftCorner(a, a) = v1;
  v.bottomRightCorner(b, b) = v2;
  return GlobalCoupling(v.adjoint() * coupling.matrix() * v, coupling.internal_count(), coupling.lead_count());
}

namespace {

void require_one_edge(const GlobalCoupling& coupling, const char* what) {
  if (coupling.internal_count() != 1)
    throw PreconditionError(std::string(what) + " requires exactly one internal edge (N = 1)");
}

// det Q * u~_{ij}(k) as the bordered determinant [[U1_ij, (1-k) U2_i.], [U3_.j, Q]].
CMatrix bordered(const GlobalCoupling& c, Eigen::Index i, Eigen::Index j, Complex k) {
  const auto b = static_cast<Eigen::Index>(c.lead_count());
  CMatrix out(1 + b, 1 + b);
  out(0, 0) = c.matrix()(i, j);
  out.block(0, 1, 1, b) = (1.0 - k) * c.u2().row(i);
  out.block(1, 0, b, 1) = c.u3().col(j);
  out.bottomRightCorner(b, b) = inner_matrix(c.u4(), k);
  return out;
}

}  // namespace

bool off_diagonal_sum_vanishes(const GlobalCoupling& coupling, const IdentityTestOptions& options) {
  require_one_edge(coupling, "off_diagonal_sum_vanishes");
  const std::size_t degree = coupling.lead_count() + 2;
  const auto samples = circle_samples(2 * degree + 5, options, EffectiveCoupling(coupling).pole_set());
  IdentityResidual sum;
  for (Complex k : samples) {
    const CMatrix a = bordered(coupling, 0, 1, k);
    const CMatrix b = bordered(coupling, 1, 0, k);
    sum.max_value = std::max(sum.max_value, std::abs(determinant(a) + determinant(b)));
    sum.max_scale = std::max({sum.max_scale, hadamard_bound(a), hadamard_bound(b)});
  }
  return sum.relative() < options.tolerance;
}

bool one_edge_zero_size(const GlobalCoupling& coupling, const IdentityTestOptions& options) {
  require_one_edge(coupling, "one_edge_zero_size");
  return classify_weyl(coupling, options).non_weyl() && off_diagonal_sum_vanishes(coupling, options);
}

KillFluxResult resonance_killing_flux(const GlobalCoupling& coupling, const IdentityTestOptions& options) {
  require_one_edge(coupling, "resonance_killing_flux");
  if (!classify_weyl(coupling, options).non_weyl()) return {KillFluxStatus::kWeyl, std::nullopt};

  const EffectiveCoupling eff(coupling);
  const auto samples = circle_samples(5, options, eff.pole_set());
  double largest = 0.0;
  Complex best_ratio = 1.0;
  for (Complex k : samples) {
    const CMatrix u = eff.evaluate(k);
    const double a = std::abs(u(0, 1));
    const double b = std::abs(u(1, 0));
    const double scale = std::max(a, b);
    if (std::abs(a - b) > 1e-9 * scale) return {KillFluxStatus::kModulusMismatch, std::nullopt};
    if (a > largest) {
      largest = a;
      best_ratio = -u(1, 0) / u(0, 1);
    }
  }
  if (largest < 1e-12) return {KillFluxStatus::kAlreadyDecoupled, std::nullopt};
  // The flux is fixed modulo pi; report the representative in (-pi/2, pi/2].
  double phi = 0.5 * std::arg(best_ratio);
  if (phi <= -0.5 * kPi + 1e-12) phi += kPi;
  return {KillFluxStatus::kOk, normalize_angle(phi)};
}

}  // namespace qgraph
