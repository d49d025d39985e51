#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acq/analysis.hpp"
#include "acq/coder.hpp"
#include "acq/container.hpp"
#include "acq/corpus.hpp"
#include "acq/error.hpp"
#include "acq/model.hpp"
#include "acq/threshold.hpp"

namespace py = pybind11;
using namespace acq;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<std::uint32_t> ids_of(const SymbolModel& m, const std::string& text) {
  const Corpus c = ingest_bytes(text, AlphabetSpec::from_model(m));
  if (c.dropped_bytes > 0) {
    throw DataError("text has " + std::to_string(c.dropped_bytes) +
                    " bytes outside the model alphabet");
  }
  return c.symbol_ids;
}

}  // namespace

PYBIND11_MODULE(acq, mod) {
  mod.doc() = "Exact arithmetic coding with escort distributions";

  py::register_exception<DataError>(mod, "DataError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<SymbolModel>(mod, "SymbolModel")
      .def(py::init<std::vector<std::string>, std::vector<std::uint64_t>>(),
           py::arg("alphabet"), py::arg("counts"))
      .def_static("from_weights", &SymbolModel::from_weights, py::arg("weights"))
      .def_static("from_text",
                  [](const std::string& text, const std::string& alphabet) {
                    const AlphabetSpec spec = AlphabetSpec::parse(alphabet);
                    const Corpus c = ingest_bytes(text, spec);
                    return estimate_model(c.symbol_ids, spec.size(), spec.symbols()).model;
                  },
                  py::arg("text"), py::arg("alphabet") = "fil9_27")
      .def_static("load", &load_model, py::arg("path"))
      .def("save", [](const SymbolModel& m, const std::string& path) { save_model(m, path); })
      .def_property_readonly("alphabet", &SymbolModel::alphabet)
      .def_property_readonly("counts", &SymbolModel::counts)
      .def_property_readonly("total", &SymbolModel::total)
      .def_property_readonly("probs", [](const SymbolModel& m) { return to_vec(m.probs()); })
      .def("to_json", [](const SymbolModel& m) { return model_to_json(m).dump(); })
      .def("__len__", &SymbolModel::size)
      .def("__eq__", &SymbolModel::operator==)
      .def("__repr__", [](const SymbolModel& m) {
        return "SymbolModel(size=" + std::to_string(m.size()) +
               ", total=" + std::to_string(m.total()) + ")";
      });

  mod.def("escort", [](const SymbolModel& m, double q) { return escort(m, q); },
          py::arg("model"), py::arg("q"));
  mod.def("renyi_entropy", [](const SymbolModel& m, double q) { return renyi_entropy(m, q); },
          py::arg("model"), py::arg("q"));
  mod.def("shannon_entropy",
          [](const SymbolModel& m) { return shannon_entropy(m.probs()); });
  mod.def("campbell_q", &campbell_q, py::arg("t"));
  mod.def("kl_divergence", [](const SymbolModel& p, const SymbolModel& r) {
    return kl_divergence(p.probs(), r.probs());
  });
  mod.def("er_q", [](const SymbolModel& p, const SymbolModel& r, double q) {
    return er_q(p.probs(), r.probs(), q);
  }, py::arg("p"), py::arg("r"), py::arg("q"));

  mod.def("quantize", [](const SymbolModel& m, double q, int k) { return quantize(m, q, k).freq(); },
          py::arg("model"), py::arg("q"), py::arg("precision") = kDefaultPrecision);

  mod.def("encode",
          [](const SymbolModel& m, const std::string& text, double q, int k) {
            const auto ids = ids_of(m, text);
            if (ids.empty()) throw DataError("empty input");
            const Container c{k, q, encode(ids, quantize(m, q, k))};
            return py::bytes(serialize_container(c));
          },
          py::arg("model"), py::arg("text"), py::arg("q") = 1.0,
          py::arg("precision") = kDefaultPrecision,
          "Encodes text into an ACQ1 container.");
  mod.def("decode",
          [](const SymbolModel& m, const py::bytes& blob) {
            const Container c = parse_container(std::string(blob));
            const auto ids = decode(c.codeword, quantize(m, c.q, c.precision));
            return render(ids, AlphabetSpec::from_model(m));
          },
          py::arg("model"), py::arg("container"));
  mod.def("codeword_length",
          [](const SymbolModel& m, const std::string& text, double q, int k) {
            return codeword_length_exact(ids_of(m, text), quantize(m, q, k));
          },
          py::arg("model"), py::arg("text"), py::arg("q") = 1.0,
          py::arg("precision") = kDefaultPrecision);
  mod.def("analytic_length",
          [](const SymbolModel& m, const std::string& text, double q) {
            return analytic_length(ids_of(m, text), m, q);
          },
          py::arg("model"), py::arg("text"), py::arg("q") = 1.0);

  mod.def("exp_avg_length",
          [](const std::vector<double>& lengths, double t, const std::vector<double>& w) {
            return exp_avg_length(lengths, t, w);
          },
          py::arg("lengths"), py::arg("t"), py::arg("weights") = std::vector<double>{});

  mod.def("simulate",
          [](const SymbolModel& m, std::size_t count, std::size_t length, std::uint64_t seed,
             unsigned threads) {
            const AlphabetSpec spec = AlphabetSpec::from_model(m);
            const Corpus c = generate_iid(m, count, length, seed, threads);
            std::vector<std::string> out;
            for (std::size_t j = 0; j < count; ++j) {
              out.push_back(render(std::span<const std::uint32_t>(c.symbol_ids)
                                       .subspan(j * length, length),
                                   spec));
            }
            return out;
          },
          py::arg("model"), py::arg("count"), py::arg("length"), py::arg("seed") = 1,
          py::arg("threads") = 1);

  mod.def("sweep",
          [](const SymbolModel& m, const std::vector<std::string>& strings,
             const std::vector<double>& q_grid, const std::vector<double>& ts,
             unsigned threads) {
            std::vector<std::vector<std::uint32_t>> rows;
            for (const auto& s : strings) rows.push_back(ids_of(m, s));
            SweepOptions opts;
            opts.threads = threads;
            opts.keep_matrix = false;
            const SweepOutput out =
                sweep(StringSet::from_strings(rows), m, q_grid, ts, opts);
            py::list results;
            for (const auto& r : out.results) {
              py::dict d;
              d["t"] = r.t;
              d["q_t"] = r.q_t;
              d["l_emp"] = r.l_emp;
              d["argmin_q"] = r.argmin_q;
              d["refined_argmin_q"] = r.refined_argmin_q;
              d["renyi_line"] = r.renyi_line;
              d["l_emp_at_qt"] = r.l_emp_at_qt;
              d["gap"] = r.gap_at_qt;
              results.append(d);
            }
            return results;
          },
          py::arg("model"), py::arg("strings"), py::arg("q_grid") = make_q_grid(),
          py::arg("t") = std::vector<double>{0.2, 0.8, 1.8}, py::arg("threads") = 1);

  mod.def("plan_threshold",
          [](const SymbolModel& m, double a, std::size_t length) {
            const ThresholdPlan plan = plan_threshold(m, a, length);
            py::dict d;
            d["a"] = plan.a;
            d["regime"] = to_string(plan.regime);
            d["q_star"] = plan.q_star;
            d["ub"] = plan.ub;
            d["M"] = plan.length;
            if (plan.warning) d["warning"] = *plan.warning;
            return d;
          },
          py::arg("model"), py::arg("a"), py::arg("M"));
  mod.def("chernoff_ub",
          [](const SymbolModel& m, double a, double q, std::size_t length) {
            return chernoff_ub(m, a, q, length).value;
          },
          py::arg("model"), py::arg("a"), py::arg("q"), py::arg("M"));
}
