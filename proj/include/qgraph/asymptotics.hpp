#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qgraph/effective_coupling.hpp"
#include "qgraph/graph_model.hpp"
#include "qgraph/resonance_finder.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

struct LadderEntry {
  double radius = 0.0;  // radius actually used, after any dilation
  int count = 0;
};

struct AsymptoticsOptions {
  FinderOptions finder;
  /// Radius of the excluded disk around k = 0.
  double origin_radius = 1e-3;
  /// Boundary-zero retries; each dilates R by a factor 1 + 1e-4 u, u in [0.5, 1.5).
  int dilation_retries = 8;
  unsigned threads = 1;
};

/// Zeros with multiplicity in 1e-3 < |k| < R. The requested radius is
/// dilated when a zero sits on the circle; the used radius is returned.
LadderEntry count_in_disk_entry(const SecularFunction& fn, double radius, const AsymptoticsOptions& options = {});
int count_in_disk(const SecularFunction& fn, double radius, const AsymptoticsOptions& options = {});

/// Counts at `steps` equally spaced radii from r_min to r_max. Entries are
/// independent and computed concurrently when options.threads > 1.
std::vector<LadderEntry> ladder(const SecularFunction& fn, double r_min, double r_max, int steps,
                                const AsymptoticsOptions& options = {});

struct EffectiveSizeFit {
  double effective_size = 0.0;  // (pi/2) * slope
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |N - fit|
  /// (pi/2) * max(standard error of the slope, 1 / (R_max - R_min)); the
  /// second term is the resolution of an integer-valued staircase.
  double uncertainty = 0.0;
};

/// Ordinary least squares of N against R. Requires at least 4 entries.
EffectiveSizeFit fit_effective_size(const std::vector<LadderEntry>& entries);

struct AsymptoticsReport {
  std::vector<LadderEntry> ladder;
  EffectiveSizeFit fit;
  /// Fitted size, clamped to 0 when negative within the fit uncertainty.
  double effective_size = 0.0;
  double total_length = 0.0;
  AsymptoticsClass classification;
  double ratio = 0.0;
  bool monotone = true;
  bool consistent = false;
  std::string warning;  // empty when consistent
};

/// Default ladder radii: [50, 400] in units of the shortest edge.
std::pair<double, double> default_radii(const MetricGraph& graph);

/// Gauge transform, classification, ladder, fit and the class/size cross-check.
AsymptoticsReport report(const MetricGraph& graph, double r_min, double r_max, int steps,
                         const AsymptoticsOptions& options = {});

}  // namespace qgraph
