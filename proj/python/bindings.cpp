#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "rg/audit.hpp"
#include "rg/aux_solver.hpp"
#include "rg/belief.hpp"
#include "rg/errors.hpp"
#include "rg/optimization.hpp"
#include "rg/oracle.hpp"
#include "rg/strategy.hpp"

namespace py = pybind11;

namespace {

std::vector<std::string> strings(const std::vector<rg::Rational>& v) {
  std::vector<std::string> out;
  for (const auto& q : v) out.push_back(rg::to_string(q));
  return out;
}

struct Game {
  rg::GameDocument doc;

  const rg::InitialLaw& law(const std::string& name) const {
    return name.empty() ? doc.initials.front() : doc.initial(name);
  }
};

}  // namespace

PYBIND11_MODULE(_rgcore, m) {
  m.doc() = "Exact solver for repeated games with a more informed controller";

  py::register_exception<rg::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<rg::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<rg::BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<rg::PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  py::register_exception<rg::BDependenceError>(m, "BDependenceError", PyExc_RuntimeError);

  py::class_<Game>(m, "Game")
      .def_static("load", [](const std::string& path) { return Game{rg::load_game_document(path)}; })
      .def_static("parse", [](const std::string& text) { return Game{rg::parse_game_document(text)}; })
      .def_property_readonly("states", [](const Game& g) { return g.doc.spec.states; })
      .def_property_readonly("actions1", [](const Game& g) { return g.doc.spec.actions1; })
      .def_property_readonly("actions2", [](const Game& g) { return g.doc.spec.actions2; })
      .def_property_readonly("initial_laws", [](const Game& g) {
        std::vector<std::string> names;
        for (const auto& pi : g.doc.initials) names.push_back(pi.name);
        return names;
      })
      .def("digest", [](const Game& g, const std::string& initial) {
        return rg::spec_digest(g.doc.spec, g.law(initial));
      }, py::arg("initial") = "")
      .def("serialize", [](const Game& g) { return rg::serialize_game(g.doc.spec, g.doc.initials); });

  m.def("oracle_value", [](const Game& g, const std::string& theta, const std::string& initial,
                           std::size_t budget) {
    rg::OracleOptions options;
    options.node_budget = budget;
    return rg::to_string(
        rg::oracle_value(g.doc.spec, g.law(initial), rg::Evaluation::parse(theta), options).value);
  }, py::arg("game"), py::arg("theta"), py::arg("initial") = "", py::arg("budget") = 1000000);

  m.def("shifted_window_value", [](const Game& g, int m_, int n, const std::string& initial) {
    return rg::to_string(rg::shifted_window_value(g.doc.spec, g.law(initial), m_, n));
  }, py::arg("game"), py::arg("m"), py::arg("n"), py::arg("initial") = "");

  m.def("aux_value", [](const Game& g, const std::string& theta, const std::string& initial) {
    const auto& pi = g.law(initial);
    rg::AuxSolver solver(g.doc.spec);
    auto r = rg::aux_value(solver, rg::phi(pi, g.doc.spec.num_states()), rg::Evaluation::parse(theta));
    return py::make_tuple(rg::to_string(r.lower), rg::to_string(r.upper));
  }, py::arg("game"), py::arg("theta"), py::arg("initial") = "");

  m.def("audit", [](const Game& g, const std::string& initial) {
    const auto& pi = g.law(initial);
    rg::AuditReport r = rg::audit_all(g.doc.spec, pi);
    py::dict d;
    d["A1a"] = rg::to_string(r.a1a_verdict());
    d["A1b"] = rg::to_string(r.a1b.verdict);
    d["A2a"] = rg::to_string(r.a2a_verdict());
    d["A'2b"] = rg::to_string(r.a2b_verdict());
    d["A'3"] = rg::to_string(r.a3.verdict);
    d["overall"] = r.overall_pass();
    d["text"] = r.to_text(g.doc.spec, pi);
    return d;
  }, py::arg("game"), py::arg("initial") = "");

  m.def("initial_hierarchy", [](const Game& g, const std::string& initial) {
    const auto& pi = g.law(initial);
    rg::HierarchyTriple t = rg::initial_hierarchy(pi, g.doc.spec.num_states());
    py::dict x1, y1;
    for (std::size_t c = 0; c < t.x1.size(); ++c) {
      if (rg::is_positive(pi.mass_c(static_cast<int>(c)))) x1[py::str(pi.signals1[c])] = strings(t.x1[c].probs);
    }
    for (std::size_t d = 0; d < t.y1.size(); ++d) {
      if (rg::is_positive(t.d_mass[d])) y1[py::str(pi.signals2[d])] = rg::to_string(t.y1[d]);
    }
    py::dict out;
    out["x1"] = x1;
    out["y1"] = y1;
    out["eta"] = rg::to_string(t.eta);
    return out;
  }, py::arg("game"), py::arg("initial") = "");

  m.def("wasserstein", [](const std::string& z1, const std::string& z2) {
    return rg::to_string(
        rg::wasserstein_distance(rg::parse_belief_atom_law(z1), rg::parse_belief_atom_law(z2)).distance);
  }, py::arg("z1"), py::arg("z2"));

  m.def("matrix_game", [](const std::vector<std::vector<std::string>>& rows) {
    rg::Matrix mat;
    for (const auto& row : rows) {
      mat.emplace_back();
      for (const auto& s : row) mat.back().push_back(rg::parse_rational(s));
    }
    auto r = rg::matrix_game(mat);
    return py::make_tuple(rg::to_string(r.value), strings(r.strategy1), strings(r.strategy2));
  }, py::arg("rows"));
}
