#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wellsep/errors.hpp"
#include "wellsep/harness.hpp"
#include "wellsep/lp.hpp"

namespace py = pybind11;
using namespace wellsep;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
json parse_arg(const std::string& s) {
    if (s.empty()) return json::object();
    try {
        return json::parse(s);
    } catch (const json::exception& e) {
        throw ArgumentError(e.what());
    }
}

Graph make_graph(std::size_t n, const std::vector<Edge>& edges) { return Graph(n, edges); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Embedding pipeline for well-separable spanning subgraphs";

    static py::exception<Error> base(m, "WellsepError");
    static py::exception<ArgumentError> arg(m, "ArgumentError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ArgumentError& e) {
            py::set_error(arg, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    py::class_<Graph>(m, "Graph")
        .def(py::init(&make_graph), py::arg("n"), py::arg("edges"))
        .def_property_readonly("order", &Graph::order)
        .def_property_readonly("edge_count", &Graph::edge_count)
        .def("edges", &Graph::edges)
        .def("adjacent", &Graph::adjacent)
        .def("neighbors", [](const Graph& g, Vertex v) {
            if (v >= g.order()) throw ArgumentError("vertex out of range");
            auto nb = g.neighbors(v);
            return std::vector<Vertex>(nb.begin(), nb.end());
        });

    m.def("solve_lp", [](std::size_t k, double gamma2) {
        const auto r = solve_assignment_lp(k, gamma2);
        py::dict d;
        d["feasible"] = r.feasible;
        d["primal"] = r.primal;
        d["primal_objective"] = r.primal_objective;
        d["dual"] = r.dual;
        d["dual_objective"] = r.dual_objective;
        d["duality_gap"] = r.duality_gap;
        d["closed_form"] = r.closed_form;
        d["stated_dual_violation"] = r.stated_dual.max_violation;
        return d;
    }, py::arg("k"), py::arg("gamma2"));

    m.def("generate_host", [](const std::string& spec, std::uint64_t seed) {
        Rng rng(seed);
        auto host = generate_host(host_spec_from_json(parse_arg(spec)), rng);
        return *host.graph;
    }, py::arg("spec") = "", py::arg("seed") = 0);

    m.def("generate_h", [](const std::string& spec, std::uint64_t seed) {
        Rng rng(seed);
        auto h = generate_h(subgraph_spec_from_json(parse_arg(spec)), rng);
        std::string sep = h.separation ? to_json(*h.separation).dump() : "";
        return py::make_tuple(h.graph, sep);
    }, py::arg("spec") = "", py::arg("seed") = 0);

    m.def("find_kfactor", [](const Graph& g, std::size_t k) -> std::optional<std::string> {
        auto f = find_kfactor(g, k);
        if (!f) return std::nullopt;
        return to_json(*f).dump();
    }, py::arg("reduced"), py::arg("k"));

    m.def("check_regular", [](const Graph& g, std::vector<Vertex> a, std::vector<Vertex> b, double eps) {
        return to_json(check_regular_exact(g, VertexSet(std::move(a)), VertexSet(std::move(b)), eps)).dump();
    }, py::arg("g"), py::arg("a"), py::arg("b"), py::arg("eps"));

    m.def("brute_force_embed", &brute_force_embed, py::arg("h"), py::arg("g"));

    m.def("verify_embedding", [](const Graph& h, const Graph& g, const std::vector<Vertex>& phi) {
        const auto c = verify_embedding(h, g, phi);
        return py::make_tuple(c.ok, c.violation);
    }, py::arg("h"), py::arg("g"), py::arg("phi"));

    m.def("run_cell_trial", [](const std::string& cell, std::uint64_t seed) {
        return to_json(run_cell_trial(cell_from_json(parse_arg(cell)), seed)).dump();
    }, py::arg("cell"), py::arg("seed"));
}
