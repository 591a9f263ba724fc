#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qgraph/graph_model.hpp"

namespace qgraph {

/// Raised when (1-k) U4 - (k+1) I is too ill-conditioned to invert.
class NearPole : public std::runtime_error {
 public:
  NearPole(Complex k, double condition);
  Complex k() const { return k_; }
  double condition() const { return condition_; }

 private:
  Complex k_;
  double condition_;
};

/// Raised when an operation's structural precondition fails (e.g. N != 1).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Energy-dependent coupling on the compact part obtained by eliminating the
/// leads:
///
///   U~(k) = U1 - (1-k) U2 [(1-k) U4 - (k+1) I]^{-1} U3.
class EffectiveCoupling {
 public:
  static constexpr double kConditionCap = 1e12;

  explicit EffectiveCoupling(GlobalCoupling source);

  const GlobalCoupling& source() const { return source_; }

  /// 2N x 2N value at k. Throws NearPole when the inner matrix has condition
  /// number above kConditionCap.
  CMatrix evaluate(Complex k) const;

  /// Points where the inner matrix is singular: k = (mu - 1)/(mu + 1) for each
  /// eigenvalue mu != -1 of U4.
  std::vector<Complex> pole_set() const;

  double distance_to_poles(Complex k) const;

 private:
  GlobalCoupling source_;
  CMatrix u1_, u2_, u3_, u4_;
  std::vector<Complex> poles_;
};

CMatrix effective_at(const GlobalCoupling& coupling, Complex k);

enum class AsymptoticsFlag { kWeyl, kNonWeyl };

/// Which rational function the effective coupling carries as an eigenvalue.
enum class Branch {
  kNone,
  kOneMinusOverOnePlus,  // (1-k)/(1+k)
  kOnePlusOverOneMinus,  // (1+k)/(1-k)
};

std::string to_string(AsymptoticsFlag flag);
std::string to_string(Branch branch);

struct AsymptoticsClass {
  AsymptoticsFlag flag = AsymptoticsFlag::kWeyl;
  Branch witness = Branch::kNone;
  /// Relative size of the cleared determinants on the sample circle; a branch
  /// is present when its residual is below the identity tolerance.
  double residual_minus = 0.0;  // branch (1-k)/(1+k)
  double residual_plus = 0.0;   // branch (1+k)/(1-k)

  bool non_weyl() const { return flag == AsymptoticsFlag::kNonWeyl; }
};

/// Controls the sampling used to decide rational-function identities in k.
struct IdentityTestOptions {
  double tolerance = 1e-9;
  double radius = 2.0;
  /// Rotation of the sample set, as a fraction of the angular spacing.
  double angle_offset = 0.5;
  /// When set, sample angles are jittered pseudo-randomly from this seed.
  std::optional<std::uint64_t> seed;
};

/// Decides whether det[U~(k) - lambda(k) I] vanishes identically for
/// lambda = (1+k)/(1-k) or (1-k)/(1+k). Denominators are cleared with the
/// block (Schur) determinant, giving polynomials of degree <= 2N(M+2) that are
/// sampled at 2D+5 points on |k| = radius.
AsymptoticsClass classify_weyl(const GlobalCoupling& coupling, const IdentityTestOptions& options = {});

/// Coupling with blocks V1^-1 U1 V1, V1^-1 U2 V2, V2^-1 U3 V1, V2^-1 U4 V2.
/// Throws std::invalid_argument unless V1 (2N x 2N) and V2 (M x M) are unitary.
GlobalCoupling conjugate(const GlobalCoupling& coupling, const CMatrix& v1, const CMatrix& v2);

/// True when u~12(k) + u~21(k) vanishes identically. Requires N = 1.
bool off_diagonal_sum_vanishes(const GlobalCoupling& coupling, const IdentityTestOptions& options = {});

/// One-edge criterion for zero effective size: non-Weyl and u~12 + u~21 == 0.
/// Throws PreconditionError unless N = 1.
bool one_edge_zero_size(const GlobalCoupling& coupling, const IdentityTestOptions& options = {});

enum class KillFluxStatus { kOk, kWeyl, kModulusMismatch, kAlreadyDecoupled };
std::string to_string(KillFluxStatus status);

struct KillFluxResult {
  KillFluxStatus status = KillFluxStatus::kOk;
  /// Extra flux to add on the edge, set when status is kOk. Determined modulo
  /// pi; the representative in (-pi/2, pi/2] is returned.
  std::optional<double> flux;
};

/// Flux Phi making e^{i Phi} u~12 + e^{-i Phi} u~21 vanish, which leaves a
/// non-Weyl one-edge graph with finitely many resonances. Throws
/// PreconditionError unless N = 1.
KillFluxResult resonance_killing_flux(const GlobalCoupling& coupling, const IdentityTestOptions& options = {});

}  // namespace qgraph
