#include "tldram/config.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "tldram/error.hpp"

namespace tldram {

using nlohmann::json;

namespace {

// Walks one JSON object, checking types and rejecting unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
  }

  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError(at(key), "unknown key");
    }
  }

  Reader(const Reader&) = delete;
  Reader& operator=(const Reader&) = delete;

  std::string at(std::string_view key) const { return path_ + "/" + std::string(key); }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  // Marks a present-but-null key as seen.
  void touch(const std::string& key) { used_.insert(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    used_.insert(key);
    if (!has(key)) return;
    out = convert<T>(j_.at(key), at(key));
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
      if (v.is_number_unsigned()) {
        const auto u = v.get<std::uint64_t>();
        if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) throw ConfigError(path, "out of range");
        return static_cast<T>(u);
      }
      const auto s = v.get<std::int64_t>();
      if (s < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
          (s > 0 && static_cast<std::uint64_t>(s) > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))) {
        throw ConfigError(path, "out of range");
      }
      return static_cast<T>(s);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path, "expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path, "expected a string");
      return v.get<std::string>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config field type");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// Re-raises model validation errors at the section's path.
template <class F>
void checked(const std::string& path, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path.empty() ? "/" : path, e.what());
  }
}

bitline::RcNetworkParams parse_rc_params(const json& j, const std::string& path) {
  bitline::RcNetworkParams p;
  Reader r(j, path);
  r.get("v_dd", p.v_dd);
  r.get("c_cell", p.c_cell);
  r.get("c_senseamp", p.c_senseamp);
  r.get("r_drive", p.r_drive);
  r.get("r_iso", p.r_iso);
  r.get("v_sense_threshold", p.v_sense_threshold);
  r.get("v_restored_threshold", p.v_restored_threshold);
  r.get("v_precharged", p.v_precharged);
  r.get("precharge_tolerance", p.precharge_tolerance);
  checked(path, [&] { p.validate(); });
  return p;
}

json rc_params_json(const bitline::RcNetworkParams& p) {
  return {{"v_dd", p.v_dd},
          {"c_cell", p.c_cell},
          {"c_senseamp", p.c_senseamp},
          {"r_drive", p.r_drive},
          {"r_iso", p.r_iso},
          {"v_sense_threshold", p.v_sense_threshold},
          {"v_restored_threshold", p.v_restored_threshold},
          {"v_precharged", p.v_precharged},
          {"precharge_tolerance", p.precharge_tolerance}};
}

bitline::Segment parse_segment(const std::string& s, const std::string& path) {
  if (s == "near") return bitline::Segment::near;
  if (s == "far") return bitline::Segment::far;
  throw ConfigError(path, "expected \"near\" or \"far\"");
}

DeviceSection parse_device(const json& j, const std::string& path) {
  DeviceSection d;
  Reader r(j, path);
  if (r.has("mode")) {
    const auto s = Reader::convert<std::string>(r.raw("mode"), r.at("mode"));
    checked(r.at("mode"), [&] { d.mode = device_mode_from_string(s); });
  } else {
    r.touch("mode");
  }
  r.get("channels", d.channels);
  r.get("ranks_per_channel", d.ranks_per_channel);
  r.get("banks_per_rank", d.banks_per_rank);
  r.get("subarrays_per_bank", d.subarrays_per_bank);
  r.get("cells_per_bitline", d.cells_per_bitline);
  r.get("rows_near", d.rows_near);
  r.get("columns_per_row", d.columns_per_row);
  r.get("t_ck_ns", d.t_ck_ns);
  r.get("cl_ns", d.cl_ns);
  r.get("transfer_extra_ns", d.transfer_extra_ns);
  r.get("uniform_baseline_timing", d.uniform_baseline_timing);
  r.get("length_dependent_timing", d.length_dependent_timing);
  r.get("queue_capacity", d.queue_capacity);
  r.get("max_pending_fills", d.max_pending_fills);
  r.get("epoch_length", d.epoch_length);

  const auto positive = [&](const char* key, auto v) {
    if (!(v > 0)) throw ConfigError(r.at(key), "must be positive");
  };
  positive("channels", d.channels);
  positive("ranks_per_channel", d.ranks_per_channel);
  positive("banks_per_rank", d.banks_per_rank);
  positive("subarrays_per_bank", d.subarrays_per_bank);
  positive("columns_per_row", d.columns_per_row);
  positive("t_ck_ns", d.t_ck_ns);
  positive("cl_ns", d.cl_ns);
  positive("queue_capacity", d.queue_capacity);
  positive("max_pending_fills", d.max_pending_fills);
  if (!(d.transfer_extra_ns >= 0)) throw ConfigError(r.at("transfer_extra_ns"), "must be >= 0");
  if (d.cells_per_bitline < 2) throw ConfigError(r.at("cells_per_bitline"), "must be >= 2");
  if (d.rows_near < 1 || d.rows_near >= static_cast<std::uint32_t>(d.cells_per_bitline)) {
    throw ConfigError(r.at("rows_near"), "must lie in [1, cells_per_bitline - 1]");
  }
  return d;
}

json device_json(const DeviceSection& d) {
  return {{"mode", std::string(to_string(d.mode))},
          {"channels", d.channels},
          {"ranks_per_channel", d.ranks_per_channel},
          {"banks_per_rank", d.banks_per_rank},
          {"subarrays_per_bank", d.subarrays_per_bank},
          {"cells_per_bitline", d.cells_per_bitline},
          {"rows_near", d.rows_near},
          {"columns_per_row", d.columns_per_row},
          {"t_ck_ns", d.t_ck_ns},
          {"cl_ns", d.cl_ns},
          {"transfer_extra_ns", d.transfer_extra_ns},
          {"uniform_baseline_timing", d.uniform_baseline_timing},
          {"length_dependent_timing", d.length_dependent_timing},
          {"queue_capacity", d.queue_capacity},
          {"max_pending_fills", d.max_pending_fills},
          {"epoch_length", d.epoch_length}};
}

RcSection parse_rc(const json& j, const std::string& path) {
  RcSection rc;
  Reader r(j, path);
  if (r.has("params")) rc.params = parse_rc_params(r.raw("params"), r.at("params"));
  else r.touch("params");
  if (r.has("initial")) rc.initial = parse_rc_params(r.raw("initial"), r.at("initial"));
  else r.touch("initial");
  if (r.has("anchors")) {
    const json& a = r.raw("anchors");
    if (!a.is_array()) throw ConfigError(r.at("anchors"), "expected an array");
    rc.anchors.emplace();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = r.at("anchors") + "/" + std::to_string(i);
      Reader ar(a[i], p);
      bitline::CalibrationAnchor anchor;
      ar.get("cells_near", anchor.geometry.cells_near);
      ar.get("cells_far", anchor.geometry.cells_far);
      std::string seg = "near";
      ar.get("segment", seg);
      anchor.segment = parse_segment(seg, ar.at("segment"));
      ar.get("target_t_rc_ns", anchor.target_t_rc_ns);
      checked(p, [&] { anchor.geometry.validate(); });
      if (!(anchor.target_t_rc_ns > 0)) throw ConfigError(ar.at("target_t_rc_ns"), "must be positive");
      if (anchor.segment == bitline::Segment::far && !anchor.geometry.segmented()) {
        throw ConfigError(ar.at("segment"), "far anchor needs a segmented geometry");
      }
      rc.anchors->push_back(anchor);
    }
  } else {
    r.touch("anchors");
  }
  if (r.has("free")) {
    const json& f = r.raw("free");
    if (!f.is_array()) throw ConfigError(r.at("free"), "expected an array");
    rc.free.clear();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string p = r.at("free") + "/" + std::to_string(i);
      const auto name = Reader::convert<std::string>(f[i], p);
      checked(p, [&] { rc.free.push_back(bitline::free_param_from_string(name)); });
    }
  } else {
    r.touch("free");
  }
  if (rc.params.has_value() == rc.anchors.has_value()) {
    throw ConfigError(path, "exactly one of \"params\" and \"anchors\" is required");
  }
  if (rc.anchors && rc.anchors->size() < 2) throw ConfigError(r.at("anchors"), "at least two anchors required");
  return rc;
}

json rc_json(const RcSection& rc) {
  json j;
  j["params"] = rc.params ? rc_params_json(*rc.params) : json(nullptr);
  if (rc.anchors) {
    json a = json::array();
    for (const auto& x : *rc.anchors) {
      a.push_back({{"cells_near", x.geometry.cells_near},
                   {"cells_far", x.geometry.cells_far},
                   {"segment", std::string(bitline::to_string(x.segment))},
                   {"target_t_rc_ns", x.target_t_rc_ns}});
    }
    j["anchors"] = a;
  } else {
    j["anchors"] = nullptr;
  }
  json f = json::array();
  for (auto p : rc.free) f.push_back(std::string(bitline::to_string(p)));
  j["free"] = f;
  j["initial"] = rc_params_json(rc.initial);
  return j;
}

PolicyConfig parse_policy(const json& j, const std::string& path) {
  PolicyConfig p;
  Reader r(j, path);
  if (r.has("policy")) {
    const auto s = Reader::convert<std::string>(r.raw("policy"), r.at("policy"));
    checked(r.at("policy"), [&] { p.policy = cache_policy_from_string(s); });
  } else {
    r.touch("policy");
  }
  r.get("benefit_increment_hit", p.benefit_increment_hit);
  r.get("benefit_increment_per_saved_cycle", p.benefit_increment_per_saved_cycle);
  r.get("caching_threshold", p.caching_threshold);
  r.get("decay_interval", p.decay_interval);
  r.get("shadow_entries", p.shadow_entries);
  if (r.has("static_map_list")) {
    const json& l = r.raw("static_map_list");
    if (!l.is_array()) throw ConfigError(r.at("static_map_list"), "expected an array");
    for (std::size_t i = 0; i < l.size(); ++i) {
      p.static_map_list.push_back(
          Reader::convert<std::uint32_t>(l[i], r.at("static_map_list") + "/" + std::to_string(i)));
    }
  } else {
    r.touch("static_map_list");
  }
  if (p.decay_interval < 1) throw ConfigError(r.at("decay_interval"), "must be >= 1");
  return p;
}

json policy_json(const PolicyConfig& p) {
  return {{"policy", std::string(to_string(p.policy))},
          {"benefit_increment_hit", p.benefit_increment_hit},
          {"benefit_increment_per_saved_cycle", p.benefit_increment_per_saved_cycle},
          {"caching_threshold", p.caching_threshold},
          {"decay_interval", p.decay_interval},
          {"shadow_entries", p.shadow_entries},
          {"static_map_list", p.static_map_list}};
}

EnergyModel parse_energy(const json& j, const std::string& path) {
  EnergyModel e;
  Reader r(j, path);
  r.get("e_act_near", e.e_act_near);
  r.get("e_act_far", e.e_act_far);
  r.get("e_act_baseline", e.e_act_baseline);
  r.get("e_rdwr", e.e_rdwr);
  r.get("e_transfer", e.e_transfer);
  checked(path, [&] { e.validate(); });
  return e;
}

json energy_json(const EnergyModel& e) {
  return {{"e_act_near", e.e_act_near},
          {"e_act_far", e.e_act_far},
          {"e_act_baseline", e.e_act_baseline},
          {"e_rdwr", e.e_rdwr},
          {"e_transfer", e.e_transfer}};
}

WorkloadSection parse_workload(const json& j, const std::string& path) {
  WorkloadSection w;
  Reader r(j, path);
  if (r.has("traces")) {
    const json& t = r.raw("traces");
    if (!t.is_array()) throw ConfigError(r.at("traces"), "expected an array");
    for (std::size_t i = 0; i < t.size(); ++i) {
      w.traces.push_back(Reader::convert<std::string>(t[i], r.at("traces") + "/" + std::to_string(i)));
    }
  } else {
    r.touch("traces");
  }
  if (r.has("synthetic")) {
    const std::string p = r.at("synthetic");
    Reader s(r.raw("synthetic"), p);
    SyntheticSection syn;
    s.get("request_count", syn.request_count);
    s.get("zipf_exponent", syn.zipf_exponent);
    s.get("working_set_rows", syn.working_set_rows);
    s.get("read_fraction", syn.read_fraction);
    s.get("mean_gap", syn.mean_gap);
    if (!(syn.zipf_exponent >= 0)) throw ConfigError(s.at("zipf_exponent"), "must be >= 0");
    if (!(syn.read_fraction >= 0 && syn.read_fraction <= 1)) {
      throw ConfigError(s.at("read_fraction"), "must lie in [0, 1]");
    }
    if (!(syn.mean_gap >= 0)) throw ConfigError(s.at("mean_gap"), "must be >= 0");
    if (syn.working_set_rows < 1) throw ConfigError(s.at("working_set_rows"), "must be >= 1");
    w.synthetic = syn;
  } else {
    r.touch("synthetic");
  }
  if (w.traces.empty() == !w.synthetic.has_value()) {
    throw ConfigError(path, "exactly one of \"traces\" and \"synthetic\" is required");
  }
  return w;
}

json workload_json(const WorkloadSection& w) {
  json j;
  j["traces"] = w.traces.empty() ? json(nullptr) : json(w.traces);
  if (w.synthetic) {
    const auto& s = *w.synthetic;
    j["synthetic"] = {{"request_count", s.request_count},
                      {"zipf_exponent", s.zipf_exponent},
                      {"working_set_rows", s.working_set_rows},
                      {"read_fraction", s.read_fraction},
                      {"mean_gap", s.mean_gap}};
  } else {
    j["synthetic"] = nullptr;
  }
  return j;
}

template <class T, class F>
T section(Reader& r, const std::string& key, F&& parse) {
  if (!r.has(key)) {
    r.touch(key);
    return parse(json::object(), r.at(key));
  }
  return parse(r.raw(key), r.at(key));
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Reader r(j, "");
  r.get("name", c.name);
  c.device = section<DeviceSection>(r, "device", parse_device);
  if (!r.has("rc")) throw ConfigError("/rc", "missing");
  c.rc = parse_rc(r.raw("rc"), "/rc");
  c.policy = section<PolicyConfig>(r, "policy", parse_policy);
  c.energy = section<EnergyModel>(r, "energy", parse_energy);
  if (!r.has("workload")) throw ConfigError("/workload", "missing");
  c.workload = parse_workload(r.raw("workload"), "/workload");
  r.get("cores", c.cores);
  r.get("non_memory_ipc", c.non_memory_ipc);
  r.get("seed", c.seed);
  if (r.has("output")) {
    Reader o(r.raw("output"), "/output");
    o.get("dir", c.output.dir);
    o.get("command_log", c.output.command_log);
  } else {
    r.touch("output");
  }

  if (c.cores < 1) throw ConfigError("/cores", "must be >= 1");
  if (!(c.non_memory_ipc > 0)) throw ConfigError("/non_memory_ipc", "must be positive");
  if (!c.workload.traces.empty() && c.workload.traces.size() != 1 && c.workload.traces.size() != c.cores) {
    throw ConfigError("/workload/traces", "need one trace, or one per core");
  }
  if (c.device.mode == DeviceMode::conventional && c.policy.policy != CachePolicy::none) {
    throw ConfigError("/policy/policy", "a conventional device only supports policy \"none\"");
  }
  const auto rows_far = static_cast<std::uint32_t>(c.device.cells_per_bitline) - c.device.rows_near;
  std::set<std::uint32_t> seen;
  std::vector<std::uint32_t> per_subarray(c.device.subarrays_per_bank, 0);
  for (std::size_t i = 0; i < c.policy.static_map_list.size(); ++i) {
    const auto row = c.policy.static_map_list[i];
    const std::string p = "/policy/static_map_list/" + std::to_string(i);
    if (!seen.insert(row).second) throw ConfigError(p, "duplicate entry");
    if (row >= rows_far * c.device.subarrays_per_bank) throw ConfigError(p, "row out of range");
    if (++per_subarray[row / rows_far] > c.device.rows_near) throw ConfigError(p, "more pins than near rows");
  }
  return c;
}

json to_json(const ExperimentConfig& c) {
  return {{"name", c.name},
          {"device", device_json(c.device)},
          {"rc", rc_json(c.rc)},
          {"policy", policy_json(c.policy)},
          {"energy", energy_json(c.energy)},
          {"workload", workload_json(c.workload)},
          {"cores", c.cores},
          {"non_memory_ipc", c.non_memory_ipc},
          {"seed", c.seed},
          {"output", {{"dir", c.output.dir}, {"command_log", c.output.command_log}}}};
}

json load_config_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(load_config_json(path)); }

void apply_override(json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like key=value");
  }
  std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  if (key.front() != '/') {
    for (auto& ch : key) {
      if (ch == '.') ch = '/';
    }
    key.insert(key.begin(), '/');
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  try {
    j[json::json_pointer(key)] = value;
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

}  // namespace tldram
