#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "linkmap/centrality.hpp"
#include "linkmap/discovery.hpp"
#include "linkmap/error.hpp"
#include "linkmap/forest.hpp"
#include "linkmap/graph.hpp"
#include "linkmap/metrics.hpp"
#include "linkmap/stats.hpp"

namespace py = pybind11;
using namespace linkmap;

namespace {

DomainKey key(const std::string& name) { return DomainKey::from_canonical(name); }

DomainSet keys(const std::vector<std::string>& names) {
    DomainSet out;
    for (const auto& n : names) out.insert(key(n));
    return out;
}

std::vector<std::string> names(const DomainSet& set) {
    std::vector<std::string> out;
    for (const auto& d : set) out.push_back(d.str());
    return out;
}

std::map<std::string, double> by_name(const std::map<DomainKey, double>& m) {
    std::map<std::string, double> out;
    for (const auto& [d, v] : m) out.emplace(d.str(), v);
    return out;
}

} // namespace

PYBIND11_MODULE(_linkmap, m) {
    m.doc() = "Domain hyperlink graphs: neighborhood-overlap discovery, HITS, statistics and forest scoring";

    // translators run newest first, so the base class goes first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<NotFound>(m, "NotFound", PyExc_KeyError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("canonicalize_url", [](const std::string& url) { return canonicalize_url(url, default_multi_tenant_suffixes()).str(); },
          py::arg("url"));

    py::class_<HyperlinkGraph>(m, "Graph")
        .def(py::init<>())
        .def("add_node", [](HyperlinkGraph& g, const std::string& d) { g.add_node(key(d)); })
        .def(
            "add_edge",
            [](HyperlinkGraph& g, const std::string& src, const std::string& dst, Timestamp first_seen) {
                return g.add_edge(key(src), key(dst), first_seen);
            },
            py::arg("src"), py::arg("dst"), py::arg("first_seen") = 0)
        .def("has_edge", [](const HyperlinkGraph& g, const std::string& a, const std::string& b) { return g.has_edge(key(a), key(b)); })
        .def("__contains__", [](const HyperlinkGraph& g, const std::string& d) { return g.contains(key(d)); })
        .def("out_neighbors", [](const HyperlinkGraph& g, const std::string& d) { return names(g.out_neighbors(key(d))); })
        .def("in_neighbors", [](const HyperlinkGraph& g, const std::string& d) { return names(g.in_neighbors(key(d))); })
        .def("nodes", [](const HyperlinkGraph& g) { return names(g.nodes()); })
        .def("edges",
             [](const HyperlinkGraph& g) {
                 std::vector<std::tuple<std::string, std::string, Timestamp>> out;
                 for (const auto& [e, ts] : g.edges()) out.emplace_back(e.first.str(), e.second.str(), ts);
                 return out;
             })
        .def_property_readonly("node_count", &HyperlinkGraph::node_count)
        .def_property_readonly("edge_count", &HyperlinkGraph::edge_count)
        .def("__eq__", [](const HyperlinkGraph& a, const HyperlinkGraph& b) { return a == b; });

    m.def("load_graph", &load_hlg, py::arg("path"));
    m.def("save_graph", [](const std::string& path, const HyperlinkGraph& g) { save_hlg(path, g); }, py::arg("path"),
          py::arg("graph"));

    m.def(
        "ssc",
        [](const HyperlinkGraph& g, const std::string& x, const std::string& y, const std::string& mode) {
            return ssc(g, key(x), key(y), parse_neighborhood_mode(mode));
        },
        py::arg("graph"), py::arg("x"), py::arg("y"), py::arg("mode") = "union");

    py::class_<CandidateScore>(m, "CandidateScore")
        .def_property_readonly("candidate", [](const CandidateScore& s) { return s.candidate.str(); })
        .def_property_readonly("seed", [](const CandidateScore& s) { return s.seed.str(); })
        .def_readonly("ssc", &CandidateScore::ssc)
        .def_readonly("rank", &CandidateScore::rank_within_seed)
        .def("__repr__", [](const CandidateScore& s) {
            return "CandidateScore(" + s.candidate.str() + ", seed=" + s.seed.str() + ", ssc=" + std::to_string(s.ssc) + ")";
        });

    m.def(
        "candidate_pipeline",
        [](const HyperlinkGraph& g, const std::vector<std::string>& confirmed, int k, const std::string& mode,
           unsigned threads) {
            DiscoveryOptions o{k, parse_neighborhood_mode(mode), threads};
            py::gil_scoped_release release;
            return candidate_pipeline(g, keys(confirmed), o).scores;
        },
        py::arg("graph"), py::arg("confirmed"), py::arg("k") = 10, py::arg("mode") = "union", py::arg("threads") = 0);

    py::class_<HitsScores>(m, "HitsResult")
        .def_property_readonly("hub", [](const HitsScores& s) { return by_name(s.hub); })
        .def_property_readonly("authority", [](const HitsScores& s) { return by_name(s.authority); })
        .def_readonly("iterations", &HitsScores::iterations)
        .def_readonly("converged", &HitsScores::converged);

    m.def(
        "hits",
        [](const HyperlinkGraph& g, double tol, int max_iter, const std::string& norm) {
            HitsOptions o;
            o.tol = tol;
            o.max_iter = max_iter;
            if (norm == "l1") o.norm = HitsNorm::L1;
            else if (norm != "l2") throw InvalidArgument("norm must be l1 or l2");
            py::gil_scoped_release release;
            return hits(g, o);
        },
        py::arg("graph"), py::arg("tol") = 1e-10, py::arg("max_iter") = 1000, py::arg("norm") = "l2");

    py::class_<MwuResult>(m, "MwuResult")
        .def_readonly("u_a", &MwuResult::u_a)
        .def_readonly("u_b", &MwuResult::u_b)
        .def_readonly("p_two_sided", &MwuResult::p_two_sided)
        .def_property_readonly("method", [](const MwuResult& r) { return to_string(r.method); });

    m.def("mann_whitney_u", [](const std::vector<double>& a, const std::vector<double>& b) { return mann_whitney_u(a, b); },
          py::arg("a"), py::arg("b"));
    m.def("pearson", [](const std::vector<double>& x, const std::vector<double>& y) { return pearson(x, y); }, py::arg("x"),
          py::arg("y"));
    m.def("roc_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return roc_auc(s, y); }, py::arg("scores"),
          py::arg("labels"));
    m.def("pr_auc", [](const std::vector<double>& s, const std::vector<int>& y) { return pr_auc(s, y); }, py::arg("scores"),
          py::arg("labels"));

    py::class_<ForestModel>(m, "ForestModel")
        .def_readonly("feature_names", &ForestModel::feature_names)
        .def_readonly("importances", &ForestModel::importances)
        .def_property_readonly("n_trees", [](const ForestModel& f) { return f.trees.size(); });
    m.def("load_model", &load_forest, py::arg("path"));
    m.def("predict_proba", [](const ForestModel& f, const std::vector<double>& x) { return predict_proba(f, x); },
          py::arg("model"), py::arg("features"));
}
