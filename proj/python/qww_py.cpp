#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qww/continuum.hpp"
#include "qww/experiment.hpp"
#include "qww/walk.hpp"
#include "qww/wigner.hpp"

namespace py = pybind11;
using namespace qww;

namespace {

using carray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

carray history_array(const SpinorHistory& h) {
  carray out({h.steps(), h.sites(), std::size_t{2}});
  auto v = out.mutable_unchecked<3>();
  for (std::size_t j = 0; j < h.steps(); ++j)
    for (std::size_t p = 0; p < h.sites(); ++p)
      for (int a = 0; a < 2; ++a) v(j, p, a) = h.at(j, static_cast<long>(p))[a];
  return out;
}

SpinorHistory history_from(const carray& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) throw PreconditionError("history must have shape (steps, sites, 2)");
  const auto v = a.unchecked<3>();
  SpinorHistory h(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
  for (py::ssize_t j = 0; j < a.shape(0); ++j)
    for (py::ssize_t p = 0; p < a.shape(1); ++p)
      h.mut(static_cast<std::size_t>(j), static_cast<std::size_t>(p)) = {v(j, p, 0), v(j, p, 1)};
  return h;
}

SpinorState state_from(const carray& a) {
  if (a.ndim() != 2 || a.shape(1) != 2) throw PreconditionError("state must have shape (sites, 2)");
  const auto v = a.unchecked<2>();
  SpinorState s(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t p = 0; p < a.shape(0); ++p) s[static_cast<std::size_t>(p)] = {v(p, 0), v(p, 1)};
  return s;
}

carray state_array(const SpinorState& s) {
  carray out({s.sites(), std::size_t{2}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t p = 0; p < s.sites(); ++p)
    for (int a = 0; a < 2; ++a) v(p, a) = s[p][a];
  return out;
}

py::dict report_dict(const ResidualReport& r) {
  py::dict entries;
  for (const auto& e : r.entries()) entries[py::str(e.name)] = py::make_tuple(e.max_abs, e.l2);
  py::dict d;
  d["entries"] = entries;
  d["notes"] = r.notes();
  return d;
}

Taper taper_from(const std::string& kind, double width) {
  if (kind == "none") return {};
  if (kind == "gaussian") return {TaperKind::gaussian, width};
  if (kind == "raised_cosine") return {TaperKind::raised_cosine, 0.0};
  throw PreconditionError("unknown taper '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<AuditError>(m, "AuditError", PyExc_RuntimeError);

  m.def("coin", [](double theta) {
    const Mat2 u = Coin{theta}.matrix();
    carray out({2, 2});
    auto v = out.mutable_unchecked<2>();
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) v(r, c) = u(r, c);
    return out;
  });
  m.def("omega", [](double theta, double k) { return dispersion(theta, k).positive.omega; }, py::arg("theta"),
        py::arg("k"));
  m.def("group_velocity", &group_velocity, py::arg("theta"), py::arg("k"));
  m.def("step", [](const carray& s, double theta) { return state_array(step(state_from(s), Coin{theta})); });
  m.def("evolve",
        [](const carray& s, double theta, std::size_t steps) {
          return history_array(evolve(state_from(s), Coin{theta}, steps));
        },
        py::arg("state"), py::arg("theta"), py::arg("steps"));
  m.def("plane_wave",
        [](std::size_t sites, long mode, double theta, bool positive) {
          return state_array(plane_wave(sites, mode, positive ? Branch::positive : Branch::negative, Coin{theta}));
        },
        py::arg("sites"), py::arg("mode"), py::arg("theta"), py::arg("positive") = true);
  m.def("gaussian_packet",
        [](std::size_t sites, double theta, double k0, double sigma_k, bool check_tail) {
          PacketParams pk;
          pk.k0 = k0;
          pk.sigma_k = sigma_k;
          pk.check_tail = check_tail;
          return state_array(gaussian_packet(sites, pk, Coin{theta}));
        },
        py::arg("sites"), py::arg("theta"), py::arg("k0") = 0.0, py::arg("sigma_k") = 0.5,
        py::arg("check_tail") = false);
  m.def("random_state", [](std::size_t sites, std::uint64_t seed) { return state_array(random_state(sites, seed)); },
        py::arg("sites"), py::arg("seed"));

  m.def("wigner",
        [](const carray& history, long j0, long half, const std::string& taper, double width) {
          const WignerField w = wigner_at(history_from(history), j0, half, taper_from(taper, width));
          const std::size_t P = w.slices.size(), R = w.kj.size(), C = w.kp.size();
          carray out({P, R, C, std::size_t{2}, std::size_t{2}});
          auto v = out.mutable_unchecked<5>();
          for (std::size_t p = 0; p < P; ++p)
            for (std::size_t r = 0; r < R; ++r)
              for (std::size_t c = 0; c < C; ++c)
                for (int a = 0; a < 2; ++a)
                  for (int b = 0; b < 2; ++b) v(p, r, c, a, b) = w.slices[p](r, c, a, b);
          return py::make_tuple(out, w.kj.values(), w.kp.values());
        },
        py::arg("history"), py::arg("j0"), py::arg("half"), py::arg("taper") = "none", py::arg("width") = 0.0);

  m.def("eom_audit", [](const carray& h, double theta) { return report_dict(eom_audit(history_from(h), Coin{theta})); });
  m.def("omega_derivative_audit", [](const carray& h, long j0, long half) {
    return report_dict(omega_derivative_audit(history_from(h), j0, half));
  });
  m.def("transport_audit",
        [](const carray& h, long j0, long half, double theta) {
          const TransportAudit a = transport_audit(history_from(h), j0, half, theta);
          py::dict d = report_dict(a.report);
          std::vector<std::string> names;
          for (const auto& v : a.exact) names.push_back(v.name());
          d["exact"] = names;
          d["unique"] = a.unique;
          return d;
        },
        py::arg("history"), py::arg("j0"), py::arg("half"), py::arg("theta"));
  m.def("identity_suite", [](std::size_t fields, std::size_t sites, std::size_t steps, std::uint64_t seed) {
    return report_dict(identity_suite(fields, sites, steps, seed));
  });
  m.def("convergence_order", [](const std::vector<std::pair<double, double>>& pts) {
    const SlopeFit f = convergence_order(pts);
    return py::make_tuple(f.slope, f.intercept, f.r2);
  });

  m.def("run",
        [](const std::string& command, const std::string& config_json) {
          std::ostringstream log, err;
          int code = kExitConfig;
          try {
            ExperimentConfig cfg = default_config(command);
            apply_json(cfg, nlohmann::json::parse(config_json));
            code = run_experiment(cfg, log, err);
          } catch (const PreconditionError& e) {
            err << "error: " << e.what() << "\n";
          } catch (const nlohmann::json::exception& e) {
            err << "error: " << e.what() << "\n";
          }
          return py::make_tuple(code, log.str(), err.str());
        },
        py::arg("command"), py::arg("config_json") = "{}");
}
