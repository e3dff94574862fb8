#include "tldram/bitline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "tldram/error.hpp"

namespace tldram::bitline {

std::string_view to_string(Segment s) noexcept {
  return s == Segment::near ? "near" : "far";
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

// kOhm * fF = ps; rates are kept in 1/ns.
constexpr double kPsPerNs = 1000.0;

// Linear network dx/dt = A x with x = v - v_target. One node (near access or
// unsegmented bitline) or two nodes (far access, isolation transistor on).
struct Network {
  int nodes = 1;
  double c_near = 0;  // fF
  double c_far = 0;   // fF
  double r_drive = 0;
  double r_iso = 0;

  double a11() const { return -(1.0 / r_drive + (nodes == 2 ? 1.0 / r_iso : 0.0)) / c_near * kPsPerNs; }
  double a12() const { return 1.0 / (r_iso * c_near) * kPsPerNs; }
  double a21() const { return 1.0 / (r_iso * c_far) * kPsPerNs; }
  double a22() const { return -1.0 / (r_iso * c_far) * kPsPerNs; }
};

Network build_network(const RcNetworkParams& p, const SegmentGeometry& g, Segment target) {
  p.validate();
  g.validate();
  if (target == Segment::far && !g.segmented()) {
    throw ParameterError("far-segment access requested on an unsegmented bitline");
  }
  Network n;
  n.c_near = p.c_senseamp + g.cells_near * p.c_cell;
  n.r_drive = p.r_drive;
  if (target == Segment::far) {
    n.nodes = 2;
    n.c_far = g.cells_far * p.c_cell;
    n.r_iso = p.r_iso;
  }
  return n;
}

// Closed-form solution by eigen-decomposition. A is similar to a symmetric
// matrix (scale by diag(C)), so both eigenvalues are real and negative.
class ClosedForm {
 public:
  ClosedForm(const Network& net, std::array<double, 2> x0) : nodes_(net.nodes) {
    if (nodes_ == 1) {
      lambda_[0] = net.a11();
      coeff_[0] = x0[0];
      return;
    }
    const double a11 = net.a11(), a12 = net.a12(), a21 = net.a21(), a22 = net.a22();
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a21;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    // tr < 0: the large-magnitude root first, the other via Vieta for accuracy.
    lambda_[0] = 0.5 * (tr - disc);
    lambda_[1] = det / lambda_[0];
    for (int k = 0; k < 2; ++k) {
      u_[k] = {a12, lambda_[k] - a11};
    }
    const double d = u_[0][0] * u_[1][1] - u_[1][0] * u_[0][1];
    coeff_[0] = (x0[0] * u_[1][1] - u_[1][0] * x0[1]) / d;
    coeff_[1] = (u_[0][0] * x0[1] - x0[0] * u_[0][1]) / d;
  }

  double x(int node, double t) const {
    if (nodes_ == 1) return coeff_[0] * std::exp(lambda_[0] * t);
    return coeff_[0] * std::exp(lambda_[0] * t) * u_[0][node] +
           coeff_[1] * std::exp(lambda_[1] * t) * u_[1][node];
  }

  // Slowest time constant in ns.
  double slowest_tau() const {
    double slow = std::abs(lambda_[0]);
    if (nodes_ == 2) slow = std::min(slow, std::abs(lambda_[1]));
    return 1.0 / slow;
  }

  int nodes() const { return nodes_; }

 private:
  int nodes_;
  std::array<double, 2> lambda_{};
  std::array<double, 2> coeff_{};
  std::array<std::array<double, 2>, 2> u_{};
};

struct Transient {
  Network net;
  double target;            // absolute drive target (V)
  std::array<double, 2> v0;  // absolute initial node voltages
};

Transient activation(const RcNetworkParams& p, const SegmentGeometry& g, Segment s) {
  const double start = p.v_precharged * p.v_dd;
  return {build_network(p, g, s), p.v_dd, {start, start}};
}

Transient precharge(const RcNetworkParams& p, const SegmentGeometry& g, Segment s) {
  return {build_network(p, g, s), p.v_precharged * p.v_dd, {p.v_dd, p.v_dd}};
}

ClosedForm closed_form(const Transient& tr) {
  return ClosedForm(tr.net, {tr.v0[0] - tr.target, tr.v0[1] - tr.target});
}

// First time |x_node(t)| <= |level|; every node decays monotonically toward
// zero (the network is a positive system started from a uniform offset).
double settle_time(const ClosedForm& cf, int node, double level, double horizon_ns) {
  const double x0 = cf.x(node, 0.0);
  level = std::abs(level);
  if (std::abs(x0) <= level) return 0.0;
  if (cf.nodes() == 1) {
    // x(t) = x0 * exp(lambda t), inverted exactly.
    const double t = cf.slowest_tau() * std::log(std::abs(x0) / level);
    if (t > horizon_ns) throw ConvergenceError("threshold not reached within horizon");
    return t;
  }
  auto f = [&](double t) { return std::abs(cf.x(node, t)) - level; };
  if (f(horizon_ns) > 0.0) throw ConvergenceError("threshold not reached within horizon");
  double hi = std::min(horizon_ns, cf.slowest_tau());
  while (f(hi) > 0.0) hi = std::min(horizon_ns, hi * 2.0);
  std::uintmax_t iters = 200;
  auto [lo, up] = boost::math::tools::toms748_solve(
      f, 0.0, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (lo + up);
}

std::vector<double> sample_times(const ClosedForm& cf, const SolveOptions& opt) {
  const double t_end = opt.t_end_ns > 0.0 ? opt.t_end_ns : 10.0 * cf.slowest_tau();
  const std::size_t n = std::max<std::size_t>(opt.samples, 2);
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = t_end * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return ts;
}

Waveform solve_closed_form(const Transient& tr, const std::vector<double>& times) {
  const ClosedForm cf = closed_form(tr);
  Waveform w;
  w.samples.reserve(times.size());
  for (double t : times) {
    WaveformSample s{t, tr.target + cf.x(0, t), std::nullopt};
    if (tr.net.nodes == 2) s.v_far = tr.target + cf.x(1, t);
    w.samples.push_back(s);
  }
  return w;
}

// Direct nodal integration of the circuit equations (no eigen-decomposition).
Waveform solve_numerical(const Transient& tr, const std::vector<double>& times) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  const Network& n = tr.net;
  const double target = tr.target;
  auto rhs = [&n, target](const State& v, State& dv, double) {
    const double i_drive = (target - v[0]) / n.r_drive;
    if (n.nodes == 1) {
      dv[0] = i_drive / n.c_near * kPsPerNs;
      return;
    }
    const double i_iso = (v[1] - v[0]) / n.r_iso;
    dv[0] = (i_drive + i_iso) / n.c_near * kPsPerNs;
    dv[1] = -i_iso / n.c_far * kPsPerNs;
  };
  State v(static_cast<std::size_t>(n.nodes));
  for (int i = 0; i < n.nodes; ++i) v[static_cast<std::size_t>(i)] = tr.v0[static_cast<std::size_t>(i)];

  Waveform w;
  w.samples.reserve(times.size());
  auto observe = [&](const State& s, double t) {
    WaveformSample out{t, s[0], std::nullopt};
    if (n.nodes == 2) out.v_far = s[1];
    w.samples.push_back(out);
  };
  const double dt0 = times.size() > 1 ? (times[1] - times[0]) * 1e-3 : 1e-6;
  ode::integrate_times(ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), rhs,
                       v, times.begin(), times.end(), dt0, observe);
  return w;
}

Waveform solve(const Transient& tr, const SolveOptions& opt) {
  const auto times = sample_times(closed_form(tr), opt);
  return opt.method == SolveMethod::closed_form ? solve_closed_form(tr, times)
                                                : solve_numerical(tr, times);
}

}  // namespace

void RcNetworkParams::validate() const {
  require(positive_finite(v_dd), "v_dd must be positive and finite");
  require(positive_finite(c_cell), "c_cell must be positive and finite");
  require(std::isfinite(c_senseamp) && c_senseamp >= 0.0, "c_senseamp must be non-negative and finite");
  require(positive_finite(r_drive), "r_drive must be positive and finite");
  require(positive_finite(r_iso), "r_iso must be positive and finite");
  require(std::isfinite(v_sense_threshold) && v_sense_threshold > 0.5,
          "v_sense_threshold must exceed 0.5");
  require(std::isfinite(v_restored_threshold) && v_restored_threshold > v_sense_threshold &&
              v_restored_threshold <= 1.0,
          "v_restored_threshold must lie in (v_sense_threshold, 1]");
  require(std::isfinite(v_precharged) && v_precharged > 0.0 && v_precharged < v_sense_threshold,
          "v_precharged must lie in (0, v_sense_threshold)");
  require(std::isfinite(precharge_tolerance) && precharge_tolerance > 0.0 && precharge_tolerance < 0.1,
          "precharge_tolerance must lie in (0, 0.1)");
}

void SegmentGeometry::validate() const {
  if (cells_near < 1) throw ParameterError("cells_near must be >= 1");
  if (cells_far < 0) throw ParameterError("cells_far must be >= 0");
}

Waveform solve_activation(const RcNetworkParams& params, const SegmentGeometry& geom,
                          Segment target, const SolveOptions& options) {
  return solve(activation(params, geom, target), options);
}

Waveform solve_precharge(const RcNetworkParams& params, const SegmentGeometry& geom,
                         Segment target, const SolveOptions& options) {
  return solve(precharge(params, geom, target), options);
}

double precharge_completion(const RcNetworkParams& params, const SegmentGeometry& geom,
                            Segment target, double horizon_ns) {
  const Transient tr = precharge(params, geom, target);
  const ClosedForm cf = closed_form(tr);
  const double tol = params.precharge_tolerance * params.v_dd;
  double t = settle_time(cf, 0, tol, horizon_ns);
  if (tr.net.nodes == 2) t = std::max(t, settle_time(cf, 1, tol, horizon_ns));
  return t;
}

LatencyProfile derive_timings(const RcNetworkParams& params, const SegmentGeometry& geom,
                              Segment target, double horizon_ns) {
  const Transient act = activation(params, geom, target);
  const ClosedForm cf = closed_form(act);
  const double sense_gap = params.v_dd - params.v_sense_threshold * params.v_dd;
  const double restore_gap = params.v_dd - params.v_restored_threshold * params.v_dd;

  LatencyProfile p;
  p.t_rcd = settle_time(cf, 0, sense_gap, horizon_ns);
  p.t_ras = settle_time(cf, 0, restore_gap, horizon_ns);
  if (act.net.nodes == 2) p.t_ras = std::max(p.t_ras, settle_time(cf, 1, restore_gap, horizon_ns));
  p.t_rp = precharge_completion(params, geom, target, horizon_ns);
  p.t_rc = p.t_ras + p.t_rp;
  return p;
}

std::vector<SweepRow> sweep_segment_lengths(const RcNetworkParams& params, int total_cells,
                                            std::span<const int> near_lengths) {
  std::vector<SweepRow> rows;
  rows.reserve(near_lengths.size() + 1);
  for (int len : near_lengths) {
    if (len < 1 || len > total_cells - 1) {
      throw ParameterError("near length " + std::to_string(len) + " outside 1.." +
                           std::to_string(total_cells - 1));
    }
    const SegmentGeometry g{len, total_cells - len};
    rows.push_back({g, derive_timings(params, g, Segment::near), derive_timings(params, g, Segment::far)});
  }
  const auto ref = SegmentGeometry::unsegmented(total_cells);
  rows.push_back({ref, derive_timings(params, ref, Segment::near), std::nullopt});
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "cells_near,cells_far,segment,t_rcd_ns,t_ras_ns,t_rp_ns,t_rc_ns\n";
  auto line = [&out](const SegmentGeometry& g, std::string_view seg, const LatencyProfile& p) {
    out << g.cells_near << ',' << g.cells_far << ',' << seg << ',' << p.t_rcd << ',' << p.t_ras << ','
        << p.t_rp << ',' << p.t_rc << '\n';
  };
  const auto precision = out.precision(10);
  for (const auto& r : rows) {
    if (r.far) {
      line(r.geometry, "near", r.near);
      line(r.geometry, "far", *r.far);
    } else {
      line(r.geometry, "unsegmented", r.near);
    }
  }
  out.precision(precision);
}

}  // namespace tldram::bitline
