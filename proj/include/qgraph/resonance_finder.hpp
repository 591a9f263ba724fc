#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qgraph/analytic.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

struct Rect {
  Complex lo;  // lower-left corner
  Complex hi;  // upper-right corner

  Complex center() const { return 0.5 * (lo + hi); }
  double diameter() const { return std::abs(hi - lo); }
  bool contains(Complex z) const {
    return z.real() >= lo.real() && z.real() <= hi.real() && z.imag() >= lo.imag() && z.imag() <= hi.imag();
  }
};

struct Disk {
  Complex center;
  double radius = 1.0;
};

using Region = std::variant<Rect, Disk>;

class FinderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The function is numerically zero on the contour; dilate and retry.
class BoundaryZero : public FinderError {
 public:
  explicit BoundaryZero(Complex where);
  Complex where() const { return where_; }

 private:
  Complex where_;
};

class StepCapExceeded : public FinderError {
 public:
  using FinderError::FinderError;
};

struct FinderOptions {
  /// |normalised f| below this on a contour raises BoundaryZero.
  double boundary_threshold = 1e-8;
  std::size_t max_samples = std::size_t{1} << 20;
  std::size_t min_samples = 64;
  /// Initial samples per unit contour length, multiplied by (1 + oscillation rate).
  double samples_per_length = 2.0;
  /// Regions must keep this distance from k = 0 unless allow_origin is set.
  double origin_margin = 1e-3;
  bool allow_origin = false;
  /// Cells stop subdividing below diameter cell_factor * (1 + |center|).
  double cell_factor = 1e-8;
  /// Roots closer than merge_factor * (1 + |k|) are merged.
  double merge_factor = 1e-6;
  int newton_iterations = 100;
  unsigned threads = 1;
};

struct Root {
  Complex k;
  int multiplicity = 1;
  /// False when Newton did not converge and k is the final cell centre.
  bool converged = true;
};

/// Roots sorted by (Re k, Im k), total multiplicity equal to the region count.
using ResonanceSet = std::vector<Root>;

/// Number of zeros (with multiplicity) enclosed by the region boundary, from
/// the accumulated phase change. Consecutive samples are refined until their
/// phase difference is below pi/2 and the segment is short against |f'/f|.
int winding_count(const AnalyticFunction& fn, const Region& region, const FinderOptions& options = {});

/// Zeros inside the region: recursive quadrisection guided by winding counts,
/// Newton refinement, merge. Throws FinderError subclasses on contour failure.
ResonanceSet localize(const AnalyticFunction& fn, const Region& region, const FinderOptions& options = {});

/// Resonances of a secular function in a region that may contain k = 0; the
/// zero at the origin is removed. Disk regions on a boundary zero are dilated
/// by a factor 1 + 1e-4 (up to 8 randomised retries).
ResonanceSet find_resonances(const SecularFunction& fn, const Region& region, FinderOptions options = {});

std::string describe(const Region& region);

}  // namespace qgraph
