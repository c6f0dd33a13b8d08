#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "nsbc/acceptance.hpp"
#include "nsbc/channel.hpp"
#include "nsbc/harness.hpp"
#include "nsbc/infotools.hpp"
#include "nsbc/json_io.hpp"
#include "nsbc/minrank.hpp"
#include "nsbc/nsbox.hpp"
#include "nsbc/schemes.hpp"
#include "nsbc/tree.hpp"

namespace py = pybind11;
using namespace nsbc;

namespace {

Pattern pattern_from_rows_py(const std::vector<std::string>& rows) {
    return Pattern::from_rows(rows);
}

py::dict verify_box_py(const std::string& kind, const std::string& field, int parties) {
    const Field F = Field::parse(field);
    TabularBox box = [&]() -> TabularBox {
        if (kind == "otp") return OtpBox(F, parties).tabularize();
        if (kind == "triangular") return TriangularBox(F, parties - 1).tabularize();
        if (kind == "fading-dirt") return FadingDirtBox(F).tabularize();
        if (kind == "mac") {
            const auto product = [&F](fe t, const std::vector<fe>& s) {
                fe out = t;
                for (const fe v : s) out = F.mul(out, v);
                return out;
            };
            return MacBox(F, parties - 1, product).tabularize();
        }
        if (kind == "leak") return make_leak_box(F);
        throw std::invalid_argument("unknown box kind '" + kind + "'");
    }();
    const auto r = verify_nonsignaling(box);
    py::dict d;
    d["non_signaling"] = r.ok;
    if (!r.ok) {
        d["witness_subset"] = r.subset;
        d["witness_inputs"] = py::make_tuple(r.inputs_a, r.inputs_b);
    }
    return d;
}

py::dict simulate_py(const std::string& scheme, const std::vector<std::string>& rows,
                     const std::string& field, std::uint64_t trials, std::uint64_t seed,
                     int n, const std::vector<double>& dof) {
    ExperimentConfig cfg;
    cfg.scheme = scheme;
    if (!rows.empty()) cfg.pattern = Pattern::from_rows(rows);
    cfg.field = field;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.n = n;
    cfg.dof = dof;
    const auto rec = run_experiment(cfg);
    py::dict d;
    d["config_hash"] = rec.config_hash;
    d["record_hash"] = rec.record_hash;
    d["error_counts"] = rec.error_counts;
    d["rate_bits"] = rec.rate_bits;
    d["wall_ms"] = rec.wall_ms;
    return d;
}

} // namespace

PYBIND11_MODULE(_nsbc, m) {
    m.doc() = "non-signaling broadcast coding toolkit over finite fields";

    py::class_<Field>(m, "Field")
        .def_static("make", &Field::make, py::arg("p"), py::arg("m"))
        .def_static("from_order", &Field::from_order, py::arg("q"))
        .def_static("parse", &Field::parse, py::arg("name"))
        .def_property_readonly("p", &Field::p)
        .def_property_readonly("m", &Field::m)
        .def_property_readonly("q", &Field::q)
        .def_property_readonly("name", &Field::name)
        .def("add", [](const Field& f, int a, int b) { return f.add(fe(a), fe(b)); })
        .def("sub", [](const Field& f, int a, int b) { return f.sub(fe(a), fe(b)); })
        .def("mul", [](const Field& f, int a, int b) { return f.mul(fe(a), fe(b)); })
        .def("div", [](const Field& f, int a, int b) { return f.div(fe(a), fe(b)); })
        .def("neg", [](const Field& f, int a) { return f.neg(fe(a)); })
        .def("inv", [](const Field& f, int a) { return f.inv(fe(a)); })
        .def("__eq__", [](const Field& a, const Field& b) { return a == b; })
        .def("__repr__", [](const Field& f) { return "Field(" + f.name() + ")"; });

    py::class_<Pattern>(m, "Pattern")
        .def(py::init(&pattern_from_rows_py), py::arg("rows"))
        .def_property_readonly("K", &Pattern::K)
        .def_property_readonly("B", &Pattern::B)
        .def("star", &Pattern::star)
        .def("rows", &Pattern::rows)
        .def_static("fully_connected", &Pattern::fully_connected)
        .def_static("lower_triangular", &Pattern::lower_triangular)
        .def_static("identity", &Pattern::identity)
        .def_static("fano", &Pattern::fano)
        .def("__repr__", [](const Pattern& p) {
            return "Pattern(" + std::to_string(p.K()) + "x" + std::to_string(p.B()) + ")";
        });

    m.def("triangle_number", &triangle_number, py::arg("pattern"));
    m.def(
        "minrank",
        [](const Pattern& M, const std::string& field, double budget) {
            WorkBudget wb;
            wb.limit = static_cast<std::uint64_t>(budget);
            const auto r = minrank_exact(M, Field::parse(field), wb);
            if (r.budget_exceeded) throw std::runtime_error("minrank: work budget exceeded");
            return r.rank;
        },
        py::arg("pattern"), py::arg("field"), py::arg("budget") = 2e8);
    m.def(
        "ns_sum_bounds",
        [](const Pattern& M, const std::string& field) {
            const auto r = ns_sum_bounds(M, Field::parse(field));
            py::dict d;
            d["tri"] = r.tri;
            d["upper_rank"] = r.upper_rank;
            d["lower_bits"] = r.lower_bits;
            d["upper_bits"] = r.upper_bits;
            d["tight"] = r.tight;
            return d;
        },
        py::arg("pattern"), py::arg("field"));

    m.def(
        "tree_info",
        [](const Pattern& M) {
            const auto parsed = tree_from_pattern(M);
            py::dict d;
            d["is_tree"] = parsed.ok();
            if (parsed.ok()) {
                const auto& T = *parsed.tree;
                d["parent"] = std::vector<int>(T.parent.begin() + 1, T.parent.end());
                d["rx_assoc"] = T.rx_assoc;
                d["leaves"] = T.leaves;
                const auto sd = sum_dof(T);
                d["sum_dof_classical"] = sd.classical;
                d["sum_dof_ns"] = sd.ns;
            } else {
                d["rejection"] = parsed.rejection;
            }
            return d;
        },
        py::arg("pattern"));

    m.def(
        "tdma_intervals",
        [](const std::vector<int>& parent, const std::vector<int>& rx_assoc,
           const std::vector<double>& d) {
            const TreeNetwork T = TreeNetwork::from_parents(parent, rx_assoc);
            const auto s = tdma_schedule(T, DofTuple{d});
            std::map<int, std::pair<double, double>> out(s.intervals.begin(),
                                                         s.intervals.end());
            return out;
        },
        py::arg("parent"), py::arg("rx_assoc"), py::arg("dof"));

    m.def("verify_box", &verify_box_py, py::arg("kind"), py::arg("field") = "GF(3)",
          py::arg("parties") = 2);

    m.def("simulate", &simulate_py, py::arg("scheme"),
          py::arg("pattern_rows") = std::vector<std::string>{}, py::arg("field") = "GF(5)",
          py::arg("trials") = 1000, py::arg("seed") = 0, py::arg("n") = 1,
          py::arg("dof") = std::vector<double>{});

    m.def("toy1_certificate", []() {
        const auto cert = classical_toy1_f3();
        py::dict d;
        d["r1_bits"] = cert.r1_bits;
        d["r2_bits"] = cert.r2_bits;
        d["h_y1_given_u"] = cert.h_y1_given_u;
        d["sum_bits"] = cert.sum_bits;
        return d;
    });

    m.def(
        "fading_dirt_baseline_bits",
        [](const std::string& field) {
            const Field F = Field::parse(field);
            return fading_dirt_baseline_joint(F).mutual_information_bits({"X"}, {"Y"}, {"G"});
        },
        py::arg("field"));

    m.def("acceptance", [](std::uint64_t seed) {
        const auto results = run_acceptance({seed});
        py::list out;
        for (const auto& r : results) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["details"] = r.details;
            d["wall_ms"] = r.wall_ms;
            out.append(d);
        }
        return out;
    }, py::arg("seed") = 20250809ULL);

    m.attr("__version__") = kLibraryVersion;
}
