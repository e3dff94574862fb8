#include "tldram/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "tldram/error.hpp"

namespace tldram::bitline {

std::string_view to_string(FreeParam p) noexcept {
  switch (p) {
    case FreeParam::c_cell: return "c_cell";
    case FreeParam::r_drive: return "r_drive";
    case FreeParam::r_iso: return "r_iso";
    case FreeParam::c_senseamp: return "c_senseamp";
  }
  return "?";
}

FreeParam free_param_from_string(std::string_view name) {
  for (auto p : {FreeParam::c_cell, FreeParam::r_drive, FreeParam::r_iso, FreeParam::c_senseamp}) {
    if (to_string(p) == name) return p;
  }
  throw ParameterError("unknown calibration parameter '" + std::string(name) + "'");
}

std::vector<CalibrationAnchor> reference_anchors() {
  return {
      {SegmentGeometry::unsegmented(512), Segment::near, 52.5},
      {SegmentGeometry{32, 480}, Segment::near, 23.1},
      {SegmentGeometry{32, 480}, Segment::far, 65.8},
  };
}

namespace {

double& slot(RcNetworkParams& p, FreeParam f) {
  switch (f) {
    case FreeParam::c_cell: return p.c_cell;
    case FreeParam::r_drive: return p.r_drive;
    case FreeParam::r_iso: return p.r_iso;
    case FreeParam::c_senseamp: return p.c_senseamp;
  }
  return p.c_cell;
}

bool anchor_depends_on(const CalibrationAnchor& a, FreeParam f) {
  switch (f) {
    case FreeParam::r_iso: return a.segment == Segment::far;
    default: return true;
  }
}

struct Problem {
  RcNetworkParams base;
  std::span<const CalibrationAnchor> anchors;
  std::vector<FreeParam> fitted;

  RcNetworkParams at(const gsl_vector* log_x) const {
    RcNetworkParams p = base;
    for (std::size_t i = 0; i < fitted.size(); ++i) slot(p, fitted[i]) = std::exp(gsl_vector_get(log_x, i));
    return p;
  }

  std::vector<double> residuals(const RcNetworkParams& p) const {
    std::vector<double> r;
    r.reserve(anchors.size());
    for (const auto& a : anchors) {
      const double t_rc = derive_timings(p, a.geometry, a.segment).t_rc;
      r.push_back((t_rc - a.target_t_rc_ns) / a.target_t_rc_ns);
    }
    return r;
  }

  double objective(const RcNetworkParams& p) const {
    double sum = 0;
    for (double r : residuals(p)) sum += r * r;
    return sum;
  }
};

double gsl_objective(const gsl_vector* x, void* ctx) {
  const auto& prob = *static_cast<const Problem*>(ctx);
  try {
    return prob.objective(prob.at(x));
  } catch (const Error&) {
    return GSL_POSINF;
  }
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

CalibrationResult fit_parameters(const RcNetworkParams& initial,
                                 std::span<const CalibrationAnchor> anchors,
                                 std::span<const FreeParam> free, const CalibrationOptions& options) {
  initial.validate();
  if (anchors.empty()) throw ParameterError("calibration needs at least one anchor");
  for (const auto& a : anchors) {
    a.geometry.validate();
    if (!(a.target_t_rc_ns > 0.0) || !std::isfinite(a.target_t_rc_ns)) {
      throw ParameterError("anchor target t_rc must be positive and finite");
    }
  }

  Problem prob{initial, anchors, {}};
  CalibrationResult result;
  for (FreeParam f : free) {
    if (std::find(prob.fitted.begin(), prob.fitted.end(), f) != prob.fitted.end() ||
        std::find(result.unconstrained.begin(), result.unconstrained.end(), f) != result.unconstrained.end()) {
      continue;
    }
    const bool seen = std::any_of(anchors.begin(), anchors.end(),
                                  [f](const CalibrationAnchor& a) { return anchor_depends_on(a, f); });
    if (!(slot(prob.base, f) > 0.0)) {
      throw ParameterError("cannot fit " + std::string(to_string(f)) + " from a zero initial value");
    }
    if (seen) {
      prob.fitted.push_back(f);
    } else {
      result.unconstrained.push_back(f);
    }
  }
  result.fitted = prob.fitted;

  if (!prob.fitted.empty()) {
    static std::once_flag gsl_handler_off;
    std::call_once(gsl_handler_off, [] { gsl_set_error_handler_off(); });
    const std::size_t n = prob.fitted.size();
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
    std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
    for (std::size_t i = 0; i < n; ++i) {
      gsl_vector_set(x.get(), i, std::log(slot(prob.base, prob.fitted[i])));
      gsl_vector_set(step.get(), i, 0.5);
    }
    gsl_multimin_function fn{&gsl_objective, n, &prob};
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());

    int it = 0;
    for (; it < options.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), options.simplex_tolerance) ==
          GSL_SUCCESS) {
        break;
      }
    }
    result.iterations = it;
    result.params = prob.at(gsl_multimin_fminimizer_x(m.get()));
  } else {
    result.params = prob.base;
  }

  result.residuals = prob.residuals(result.params);
  result.objective = prob.objective(result.params);
  if (!(result.objective <= options.max_objective)) {
    throw CalibrationError("calibration objective " + std::to_string(result.objective) +
                               " above ceiling " + std::to_string(options.max_objective),
                           result.residuals);
  }
  return result;
}

CalibrationResult calibrate(const RcNetworkParams& initial, std::span<const CalibrationAnchor> anchors,
                            std::span<const FreeParam> free, const CalibrationOptions& options) {
  if (anchors.size() < 2) throw ParameterError("calibration needs at least two anchors");
  return fit_parameters(initial, anchors, free, options);
}

}  // namespace tldram::bitline
