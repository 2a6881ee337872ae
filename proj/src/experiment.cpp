#include "qww/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "qww/lattice.hpp"
#include "qww/spectral.hpp"
#include "qww/walk.hpp"
#include "qww/wigner.hpp"

namespace qww {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kIdentityTol = 1e-13;

template <class T>
void read_key(const json& v, const std::string& key, T& dst) {
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("config key '" + key + "' must be a non-negative integer");
  } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be true or false");
  } else {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  }
  dst = v.get<T>();
}

void require_one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (value == o) return;
  std::string all;
  for (const char* o : options) all += (all.empty() ? "" : "|") + std::string(o);
  throw ConfigError("config key '" + key + "' must be one of " + all + ", got '" + value + "'");
}

std::string csv_header_lines(const ExperimentConfig& cfg) {
  return "# config: " + cfg.to_json().dump() + "\n# variant_flags: " + variant_flags(cfg).dump() + "\n";
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json report_json(const ResidualReport& rep) { return rep.to_json(); }

long resolved_j0(const ExperimentConfig& cfg) {
  return cfg.j0 >= 0 ? cfg.j0 : static_cast<long>((cfg.steps - 1) / 2);
}

Taper resolved_taper(const ExperimentConfig& cfg) {
  if (cfg.taper == "gaussian") return Taper{TaperKind::gaussian, cfg.taper_width};
  if (cfg.taper == "raised_cosine") return Taper{TaperKind::raised_cosine, 0.0};
  return Taper{};
}

// Fills in quantities derived from other keys (theta from omega_index).
ExperimentConfig resolve(ExperimentConfig cfg) {
  require_one_of("state", cfg.state, {"packet", "plane_wave", "random", "zero"});
  require_one_of("branch", cfg.branch, {"positive", "negative"});
  require_one_of("taper", cfg.taper, {"none", "gaussian", "raised_cosine"});
  require_one_of("variant", cfg.variant, {"ledger", "printed"});
  if (cfg.omega_index > 0) cfg.theta = commensurate_theta(cfg.n_sites, cfg.mode, cfg.window, cfg.omega_index);
  if (cfg.j0 < 0 && cfg.steps > 0) cfg.j0 = resolved_j0(cfg);
  return cfg;
}

SpinorState build_state(const ExperimentConfig& cfg, const Coin& coin) {
  const Branch br = cfg.branch == "negative" ? Branch::negative : Branch::positive;
  if (cfg.state == "plane_wave") return plane_wave(cfg.n_sites, cfg.mode, br, coin);
  if (cfg.state == "random") return random_state(cfg.n_sites, cfg.seed);
  if (cfg.state == "zero") return SpinorState(cfg.n_sites);
  PacketParams pk;
  pk.k0 = cfg.k0;
  pk.sigma_k = cfg.sigma_k;
  pk.branch = br;
  pk.spin_mix = cfg.spin_mix;
  pk.check_tail = cfg.tail_check;
  return gaussian_packet(cfg.n_sites, pk, coin);
}

SpinorHistory build_history(const ExperimentConfig& cfg) {
  LatticeShape{cfg.steps, cfg.n_sites}.validate();
  const Coin coin{cfg.theta};
  return evolve(build_state(cfg, coin), coin, cfg.steps);
}

struct D2ScaleGuard {
  double saved = testing::d2_scale();
  explicit D2ScaleGuard(double s) { testing::set_d2_scale(s); }
  ~D2ScaleGuard() { testing::set_d2_scale(saved); }
};

struct Check {
  std::string name;
  double value;
  double threshold;
  bool pass;
};

ordered_json checks_json(const std::vector<Check>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  return arr;
}

void log_checks(std::ostream& log, const std::string& cmd, const std::vector<Check>& checks) {
  for (const auto& c : checks)
    log << cmd << ": " << c.name << " = " << format_double(c.value) << " (threshold " << format_double(c.threshold)
        << ") " << (c.pass ? "PASS" : "FAIL") << "\n";
}

bool all_pass(const std::vector<Check>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

int cmd_identities(const ExperimentConfig& cfg, std::ostream& log) {
  LatticeShape{cfg.steps, cfg.n_sites}.validate();
  if (cfg.fields == 0) throw ConfigError("identities needs fields >= 1");
  ResidualReport ids("identities"), spec("spectral");
  {
    D2ScaleGuard guard(cfg.hook_d2_scale);
    ids = identity_suite(cfg.fields, cfg.n_sites, cfg.steps, cfg.seed);
    spec = spectral_suite(cfg.n_sites, cfg.seed);
  }
  std::vector<Check> checks;
  for (const char* k : {"inversion", "product_rule", "linearity", "shift_commute"})
    checks.push_back({k, ids.get(k).max_abs, kIdentityTol, ids.get(k).max_abs <= kIdentityTol});
  checks.push_back({"sin_form", spec.get("sin_form").max_abs, 1e-12, spec.get("sin_form").max_abs <= 1e-12});
  checks.push_back({"tan_form", spec.get("tan_form").max_abs, 1e-10, spec.get("tan_form").max_abs <= 1e-10});
  const double slope = spec.get("expansion_remainder_slope").max_abs;
  checks.push_back({"expansion_remainder_slope_deviation", std::abs(slope - 4.0), 0.3, std::abs(slope - 4.0) <= 0.3});

  const bool ok = all_pass(checks);
  ordered_json out;
  out["config"] = cfg.to_json();
  out["variant_flags"] = variant_flags(cfg);
  out["checks"] = checks_json(checks);
  out["reports"] = {report_json(ids), report_json(spec)};
  out["exit_code"] = ok ? kExitOk : kExitTolerance;
  write_atomic(std::filesystem::path(cfg.out) / "identities.json", json_text(out));
  log_checks(log, "identities", checks);
  return ok ? kExitOk : kExitTolerance;
}

struct Verdict {
  std::string identity;
  std::string exact;
  bool ok;
  std::string flag;
};

int cmd_audit(const ExperimentConfig& cfg, std::ostream& log) {
  const SpinorHistory h = build_history(cfg);
  double amp = 0.0;
  for (std::size_t p = 0; p < h.sites(); ++p) amp = std::max(amp, std::abs(h.at(0, static_cast<long>(p))[0]) +
                                                                        std::abs(h.at(0, static_cast<long>(p))[1]));
  if (amp == 0.0) throw PreconditionError("degenerate input: the initial state is identically zero");
  const long j0 = resolved_j0(cfg);
  const Coin coin{cfg.theta};
  const Taper taper = resolved_taper(cfg);

  const ResidualReport eom = eom_audit(h, coin);
  const ResidualReport om = omega_derivative_audit(h, j0, cfg.window);

  std::vector<Verdict> verdicts;
  const std::string ef = eom.note_or("exact_form", "none");
  verdicts.push_back({"equation_of_motion", ef == "audit" ? "mass_coeff=1" : ef == "printed" ? "mass_coeff=1/2" : ef,
                      ef != "none", ef == "both" ? "indistinguishable at theta=0 ((U - 1) Psi = 0)" : ""});
  for (const char* axis : {"time", "space"}) {
    const std::string v = om.note_or(std::string(axis) + "_exact", "none");
    verdicts.push_back({std::string("omega_derivative_") + axis, v, v != "none",
                        v == "both" ? "indistinguishable: cross term vanishes on this data" : ""});
  }

  ordered_json out;
  out["config"] = cfg.to_json();
  out["variant_flags"] = variant_flags(cfg);
  ordered_json reports = {report_json(eom), report_json(om)};
  std::string csv = csv_header_lines(cfg) + "identity,variant,max_abs,l2,exact\n";
  auto csv_row = [&](const std::string& id, const ResidualEntry& e, bool exact) {
    csv += id + "," + "\"" + e.name + "\"," + format_double(e.max_abs) + "," + format_double(e.l2) + "," +
           (exact ? "1" : "0") + "\n";
  };
  for (const auto& e : eom.entries()) csv_row("equation_of_motion", e, e.max_abs <= 1e-13);
  for (const auto& e : om.entries()) {
    const std::string id = e.name.rfind("time", 0) == 0 ? "omega_derivative_time" : "omega_derivative_space";
    csv_row(id, e, e.max_abs <= 1e-13);
  }

  try {
    const TransportAudit tr = transport_audit(h, j0, cfg.window, cfg.theta, taper);
    reports.push_back(report_json(tr.report));
    std::string exact;
    for (const auto& v : tr.exact) exact += (exact.empty() ? "" : ";") + v.name();
    const bool ok = tr.unique || (tr.degenerate_mass && !tr.exact.empty());
    verdicts.push_back({"transport", exact, ok,
                        tr.degenerate_mass ? "indistinguishable at theta=0: mass coefficient and cross term" : ""});
    for (const auto& e : tr.report.entries()) {
      if (e.name.rfind("k_sign", 0) != 0) continue;
      bool is_exact = false;
      for (const auto& v : tr.exact) is_exact = is_exact || v.name() == e.name;
      csv_row("transport", e, is_exact);
    }
  } catch (const AuditError& ex) {
    verdicts.push_back({"transport", "none", false, ex.what()});
  }

  bool ok = true;
  ordered_json ledger = ordered_json::array();
  for (const auto& v : verdicts) {
    ok = ok && v.ok;
    ordered_json row = {{"identity", v.identity}, {"exact_variant", v.exact}, {"ok", v.ok}};
    if (!v.flag.empty()) row["flag"] = v.flag;
    ledger.push_back(row);
    log << "audit: " << v.identity << " exact=" << v.exact << (v.flag.empty() ? "" : " [" + v.flag + "]")
        << (v.ok ? "" : " FAIL") << "\n";
  }
  out["errata_ledger"] = ledger;
  out["reports"] = reports;
  out["exit_code"] = ok ? kExitOk : kExitTolerance;
  const std::filesystem::path dir(cfg.out);
  write_atomic(dir / "audit.json", json_text(out));
  write_atomic(dir / "audit.csv", csv);
  return ok ? kExitOk : kExitTolerance;
}

int cmd_converge(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.eps_list.size() < 4)
    throw ConfigError("converge needs at least 4 eps values for a slope fit, got " +
                      std::to_string(cfg.eps_list.size()));
  ScalingFamily fam;
  fam.eps = cfg.eps_list;
  fam.mass = cfg.mass;
  fam.box_length = cfg.box_length;
  fam.t_final = cfg.t_final;
  fam.k0 = cfg.K0;
  fam.sigma_k = cfg.sigma_K;
  fam.tau = cfg.tau;
  fam.samples = cfg.samples;
  fam.validate();
  const std::vector<MemberResult> res = run_family(fam);

  std::string csv = csv_header_lines(cfg) + "eps,variant,with_correction,residual_norm\n";
  for (const auto& m : res) {
    for (const auto& r : m.rows)
      csv += format_double(m.layout.eps) + ",\"" + r.variant.name() + "\"," + correction_name(r.correction) + "," +
             format_double(r.norm) + "\n";
    csv += format_double(m.layout.eps) + ",ms_stated,none," + format_double(m.ms_stated) + "\n";
    csv += format_double(m.layout.eps) + ",ms_derived,none," + format_double(m.ms_derived) + "\n";
  }

  std::map<std::string, SlopeFit> fits;
  std::string slopes = csv_header_lines(cfg) + "variant,with_correction,slope,intercept,r2,points\n";
  auto fit_series = [&](const std::string& variant, const std::string& corr, const std::function<double(const MemberResult&)>& f) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& m : res) pts.push_back({m.layout.eps, f(m)});
    const SlopeFit s = convergence_order(pts);
    fits[variant + "/" + corr] = s;
    slopes += "\"" + variant + "\"," + corr + "," + format_double(s.slope) + "," + format_double(s.intercept) + "," +
              format_double(s.r2) + "," + std::to_string(s.points) + "\n";
  };
  for (const auto& v : continuum_variants())
    for (Correction c : kCorrections)
      fit_series(v.name(), correction_name(c), [&](const MemberResult& m) { return m.norm(v, c); });
  fit_series("ms_stated", "none", [](const MemberResult& m) { return m.ms_stated; });
  fit_series("ms_derived", "none", [](const MemberResult& m) { return m.ms_derived; });

  const bool ledger = cfg.variant == "ledger";
  const ContinuumVariant sel = ledger ? kAuditContinuum : kPrintedContinuum;
  const Correction corr = ledger ? Correction::audited : Correction::printed;
  const double without = fits.at(residual_key(sel, Correction::none)).slope;
  const double with = fits.at(residual_key(sel, corr)).slope;
  const double ms = fits.at("ms_stated/none").slope;
  std::vector<Check> checks = {
      {"slope_without_correction", without, 0.7, without >= 0.7},
      {"slope_gain_with_correction", with - without, 0.5, with - without >= 0.5},
      {"ms_reduction_slope", ms, 2.5, ms >= 2.5},
  };
  const bool ok = all_pass(checks);

  ordered_json out;
  out["config"] = cfg.to_json();
  out["variant_flags"] = variant_flags(cfg);
  out["checks"] = checks_json(checks);
  ordered_json members = ordered_json::array();
  for (const auto& m : res)
    members.push_back({{"eps", m.layout.eps},
                       {"theta", m.layout.theta},
                       {"sites", m.layout.sites},
                       {"steps", m.layout.steps},
                       {"window_half", m.layout.half},
                       {"j0", m.layout.j0},
                       {"taper", m.layout.taper.name()},
                       {"edge_magnitude", m.edge_magnitude}});
  out["members"] = members;
  ordered_json fj = ordered_json::object();
  for (const auto& [k, s] : fits) fj[k] = {{"slope", s.slope}, {"intercept", s.intercept}, {"r2", s.r2}};
  out["fits"] = fj;
  out["exit_code"] = ok ? kExitOk : kExitTolerance;
  const std::filesystem::path dir(cfg.out);
  write_atomic(dir / "converge.csv", csv);
  write_atomic(dir / "slopes.csv", slopes);
  write_atomic(dir / "converge.json", json_text(out));
  log_checks(log, "converge", checks);
  return ok ? kExitOk : kExitTolerance;
}

int cmd_dump_wigner(const ExperimentConfig& cfg, std::ostream& log) {
  const SpinorHistory h = build_history(cfg);
  const long j0 = resolved_j0(cfg);
  const Taper taper = resolved_taper(cfg);
  const OmegaTensor om = build_omega(h, j0, cfg.window, taper);
  const WignerField w = wigner_transform(om);

  static const char* spin[2] = {"L", "R"};
  std::string csv = csv_header_lines(cfg) + "j0,p,A,B,kj,kp,re,im,herm_dev\n";
  double herm = 0.0;
  for (std::size_t p = 0; p < w.slices.size(); ++p) {
    const SpinGrid& g = w.slices[p];
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const cplx v = g(r, c, a, b);
            const double dev = std::abs(v - std::conj(g(r, c, b, a)));
            herm = std::max(herm, dev);
            csv += std::to_string(j0) + "," + std::to_string(p) + "," + spin[a] + "," + spin[b] + "," +
                   format_double(w.kj.k(r)) + "," + format_double(w.kp.k(c)) + "," + format_double(v.real()) + "," +
                   format_double(v.imag()) + "," + format_double(dev) + "\n";
          }
  }

  ordered_json out;
  out["config"] = cfg.to_json();
  out["variant_flags"] = variant_flags(cfg);
  out["j0"] = j0;
  out["window_half"] = cfg.window;
  out["taper"] = taper.name();
  out["grids"] = {{"kj", w.kj.values()}, {"kp", w.kp.values()}};
  if (h.scaling)
    out["scaling"] = {{"eps", h.scaling->eps}, {"mass", h.scaling->mass}};
  else
    out["scaling"] = nullptr;
  out["edge_magnitude"] = om.edge_magnitude;
  out["edge_warning"] = om.edge_warning;
  out["max_herm_dev"] = herm;
  out["exit_code"] = kExitOk;
  const std::filesystem::path dir(cfg.out);
  write_atomic(dir / "wigner.csv", csv);
  write_atomic(dir / "wigner.json", json_text(out));
  log << "dump-wigner: " << w.slices.size() * w.kj.size() * w.kp.size() * 4 << " rows, max herm_dev "
      << format_double(herm) << ", edge magnitude " << format_double(om.edge_magnitude) << "\n";
  return kExitOk;
}

}  // namespace

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["command"] = command;
  j["out"] = out;
  j["seed"] = seed;
  j["n_sites"] = n_sites;
  j["steps"] = steps;
  j["window"] = window;
  j["j0"] = j0;
  j["theta"] = theta;
  j["state"] = state;
  j["k0"] = k0;
  j["sigma_k"] = sigma_k;
  j["branch"] = branch;
  j["spin_mix"] = spin_mix;
  j["tail_check"] = tail_check;
  j["mode"] = mode;
  j["omega_index"] = omega_index;
  j["taper"] = taper;
  j["taper_width"] = taper_width;
  j["eps_list"] = eps_list;
  j["mass"] = mass;
  j["box_length"] = box_length;
  j["t_final"] = t_final;
  j["K0"] = K0;
  j["sigma_K"] = sigma_K;
  j["tau"] = tau;
  j["samples"] = samples;
  j["variant"] = variant;
  j["fields"] = fields;
  j["hook_d2_scale"] = hook_d2_scale;
  return j;
}

ExperimentConfig default_config(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  if (command == "identities") {
    c.n_sites = 64;
    c.steps = 64;
  } else if (command == "audit") {
  } else if (command == "converge") {
    c.eps_list = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  } else if (command == "dump-wigner") {
    c.n_sites = 16;
    c.steps = 24;
    c.window = 8;
    c.state = "plane_wave";
    c.mode = 1;
    c.omega_index = 3;
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return c;
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty entry in eps list '" + text + "'");
    item = item.substr(b, e - b + 1);
    try {
      std::size_t used = 0;
      const auto slash = item.find('/');
      double v;
      if (slash != std::string::npos) {
        const std::string num = item.substr(0, slash), den = item.substr(slash + 1);
        std::size_t u2 = 0;
        v = std::stod(num, &used) / std::stod(den, &u2);
        if (used != num.size() || u2 != den.size()) throw std::invalid_argument(item);
      } else {
        v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      }
      if (!std::isfinite(v) || !(v > 0.0)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse eps value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("eps list is empty");
  return out;
}

void apply_json(ExperimentConfig& cfg, const json& patch) {
  if (!patch.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, v] : patch.items()) {
    if (key == "command") {
      std::string c;
      read_key(v, key, c);
      if (!cfg.command.empty() && c != cfg.command)
        throw ConfigError("config is for command '" + c + "', not '" + cfg.command + "'");
    } else if (key == "out") {
      read_key(v, key, cfg.out);
    } else if (key == "seed") {
      read_key(v, key, cfg.seed);
    } else if (key == "n_sites") {
      read_key(v, key, cfg.n_sites);
    } else if (key == "steps") {
      read_key(v, key, cfg.steps);
    } else if (key == "window") {
      read_key(v, key, cfg.window);
    } else if (key == "j0") {
      read_key(v, key, cfg.j0);
    } else if (key == "theta") {
      read_key(v, key, cfg.theta);
    } else if (key == "state") {
      read_key(v, key, cfg.state);
    } else if (key == "k0") {
      read_key(v, key, cfg.k0);
    } else if (key == "sigma_k") {
      read_key(v, key, cfg.sigma_k);
    } else if (key == "branch") {
      read_key(v, key, cfg.branch);
    } else if (key == "spin_mix") {
      read_key(v, key, cfg.spin_mix);
    } else if (key == "tail_check") {
      read_key(v, key, cfg.tail_check);
    } else if (key == "mode") {
      read_key(v, key, cfg.mode);
    } else if (key == "omega_index") {
      read_key(v, key, cfg.omega_index);
    } else if (key == "taper") {
      read_key(v, key, cfg.taper);
    } else if (key == "taper_width") {
      read_key(v, key, cfg.taper_width);
    } else if (key == "eps_list") {
      if (v.is_string()) {
        cfg.eps_list = parse_eps_list(v.get<std::string>());
      } else if (v.is_array()) {
        cfg.eps_list.clear();
        for (const auto& e : v) {
          double d;
          read_key(e, key, d);
          cfg.eps_list.push_back(d);
        }
      } else {
        throw ConfigError("config key 'eps_list' must be an array of numbers or a comma-separated string");
      }
    } else if (key == "mass") {
      read_key(v, key, cfg.mass);
    } else if (key == "box_length") {
      read_key(v, key, cfg.box_length);
    } else if (key == "t_final") {
      read_key(v, key, cfg.t_final);
    } else if (key == "K0") {
      read_key(v, key, cfg.K0);
    } else if (key == "sigma_K") {
      read_key(v, key, cfg.sigma_K);
    } else if (key == "tau") {
      read_key(v, key, cfg.tau);
    } else if (key == "samples") {
      read_key(v, key, cfg.samples);
    } else if (key == "variant") {
      read_key(v, key, cfg.variant);
    } else if (key == "fields") {
      read_key(v, key, cfg.fields);
    } else if (key == "hook_d2_scale") {
      read_key(v, key, cfg.hook_d2_scale);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

ordered_json variant_flags(const ExperimentConfig& cfg) {
  const bool ledger = cfg.variant == "ledger";
  const TransportVariant tv = ledger ? kLedgerTransport : kPrintedTransport;
  const ContinuumVariant cv = ledger ? kAuditContinuum : kPrintedContinuum;
  return {{"source", cfg.variant},
          {"eom_mass_coeff", ledger ? 1.0 : 0.5},
          {"omega_identity", ledger ? "corrected" : "printed"},
          {"transport", tv.name()},
          {"continuum_phase_sign", cv.phase_sign},
          {"continuum_mass_coeff", cv.mass_coeff},
          {"continuum_correction", ledger ? "audited" : "printed"}};
}

int run_experiment(const ExperimentConfig& cfg_in, std::ostream& log, std::ostream& err) {
  try {
    const ExperimentConfig cfg = resolve(cfg_in);
    if (cfg.command == "identities") return cmd_identities(cfg, log);
    if (cfg.command == "audit") return cmd_audit(cfg, log);
    if (cfg.command == "converge") return cmd_converge(cfg, log);
    if (cfg.command == "dump-wigner") return cmd_dump_wigner(cfg, log);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

ResidualReport identity_suite(std::size_t fields, std::size_t sites, std::size_t steps, std::uint64_t seed) {
  LatticeShape{steps, sites}.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::vector<Axis> axes = {{"time", steps, Boundary::windowed}, {"space", sites, Boundary::periodic}};
  auto random_field = [&] {
    LatticeField f(axes);
    for (auto& v : f.values()) v = cplx(nd(rng), nd(rng));
    return f;
  };
  NormAccumulator inv, prod, lin, comm;
  auto fold = [](NormAccumulator& acc, double e) { acc.add(cplx(e)); };
  for (std::size_t i = 0; i < fields; ++i) {
    const LatticeField f = random_field(), g = random_field();
    const cplx alpha(nd(rng), nd(rng)), beta(nd(rng), nd(rng));
    for (const char* ax : {"time", "space"}) {
      const LatticeField df = d1(f, ax), ddf = d2(f, ax), dg = d1(g, ax), ddg = d2(g, ax);
      fold(inv, max_abs_diff(shift(f, ax, 1), f + df + ddf));
      fold(inv, max_abs_diff(shift(f, ax, -1), f - df + ddf));
      fold(prod, max_abs_diff(d1(f * g, ax), df * g + f * dg + df * ddg + ddf * dg));
      fold(lin, max_abs_diff(d1(alpha * f + beta * g, ax), alpha * df + beta * dg));
      fold(comm, max_abs_diff(d1(shift(f, "space", 1), ax), shift(df, "space", 1)));
      fold(comm, max_abs_diff(d2(shift(f, "space", 1), ax), shift(ddf, "space", 1)));
    }
  }
  ResidualReport rep("identities");
  rep.add("inversion", inv);
  rep.add("product_rule", prod);
  rep.add("linearity", lin);
  rep.add("shift_commute", comm);
  rep.note("fields", std::to_string(fields));
  rep.note("shape", std::to_string(steps) + "x" + std::to_string(sites));
  return rep;
}

ResidualReport spectral_suite(std::size_t sites, std::uint64_t seed) {
  if (sites == 0) throw PreconditionError("spectral suite needs at least one site");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> nd;
  std::vector<cplx> f(sites);
  for (auto& v : f) v = cplx(nd(rng), nd(rng));
  ResidualReport rep = spectral_derivative_check(f);

  std::vector<std::pair<double, double>> pts;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    double r = 0.0;
    for (double K : {0.5, 1.0, 1.5}) {
      const cplx second_order = -I * K * (1.0 - 2.0 * eps * eps * K * K / 3.0);
      r = std::max(r, std::abs(fourier_der1_symbol(K, eps) - second_order));
    }
    pts.push_back({eps, r});
  }
  const SlopeFit fit = convergence_order(pts);
  rep.add("expansion_remainder_slope", fit.slope, fit.r2, fit.points);
  rep.note("expansion_remainder", "max_abs holds the fitted slope, l2 the R^2");
  return rep;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::filesystem::filesystem_error("cannot open for writing", tmp, std::make_error_code(std::errc::io_error));
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) throw std::filesystem::filesystem_error("write failed", tmp, std::make_error_code(std::errc::io_error));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qww
