#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "psums/errors.hpp"
#include "psums/oracle.hpp"
#include "psums/serialize.hpp"

namespace py = pybind11;
using namespace psums;

namespace {

template <class T>
py::class_<T> common(py::module_& m, const char* name) {
  py::class_<T> c(m, name);
  c.def("__len__", &T::size)
      .def_property_readonly("k", &T::value_bits)
      .def("sum", &T::sum, py::arg("i"))
      .def("update", &T::update, py::arg("i"), py::arg("delta"))
      .def("search", &T::search, py::arg("target"))
      .def("access", &T::access, py::arg("i"));
  if constexpr (requires(const T& s) { s.space(); })
    c.def("space", [](const T& s) { return s.space(); });
  return c;
}

template <class T>
py::class_<T> saveable(py::class_<T> c) {
  return c
      .def("to_bytes",
           [](const T& s) {
             const bytes b = encode_structure(any_structure(s));
             return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
           })
      .def_static("from_bytes", [](const py::bytes& data) {
        const std::string raw = data;
        any_structure s = decode_structure(
            {reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
        if (!std::holds_alternative<T>(s))
          throw invalid_parameter("file holds a " + std::string(to_string(kind_of(s))) +
                                  " structure");
        return std::get<T>(std::move(s));
      });
}

}  // namespace

PYBIND11_MODULE(_psums, m) {
  m.doc() = "Succinct partial sums: prefix sum, update and search over k-bit arrays";

  py::register_exception<invalid_parameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<index_error>(m, "IndexOutOfRange", PyExc_IndexError);
  py::register_exception<value_range_error>(m, "ValueRangeError", PyExc_ValueError);
  py::register_exception<delta_too_large>(m, "DeltaTooLarge", PyExc_ValueError);
  py::register_exception<parse_error>(m, "ParseError", PyExc_ValueError);

  py::class_<space_report>(m, "SpaceReport")
      .def_readonly("components", &space_report::components)
      .def_readonly("payload_bits", &space_report::payload_bits)
      .def_readonly("metadata_bits", &space_report::metadata_bits)
      .def_readonly("bound_bits", &space_report::bound_bits)
      .def_readonly("bound_formula", &space_report::bound_formula)
      .def_readonly("bound_applies", &space_report::bound_applies)
      .def_property_readonly("within_bound", &space_report::within_bound);

  saveable(common<classic_fenwick>(m, "ClassicFenwick")
               .def(py::init<std::vector<std::uint64_t>, unsigned>(), py::arg("values"),
                    py::arg("k")));

  saveable(common<layered_fenwick>(m, "LayeredFenwick")
               .def(py::init<std::vector<std::uint64_t>, unsigned, std::uint64_t>(),
                    py::arg("values"), py::arg("k"), py::arg("b"))
               .def_property_readonly("b", [](const layered_fenwick& s) {
                 return s.geometry().b();
               }));

  saveable(common<sampled_fenwick>(m, "SampledFenwick")
               .def(py::init([](std::vector<std::uint64_t> values, unsigned k, std::uint64_t b,
                                std::optional<std::uint64_t> d, std::optional<double> epsilon) {
                      if (d && epsilon) throw invalid_parameter("give d or epsilon, not both");
                      if (d) return sampled_fenwick(std::move(values), k, b, *d);
                      return sampled_fenwick::with_epsilon(std::move(values), k, b,
                                                           epsilon.value_or(1.0));
                    }),
                    py::arg("values"), py::arg("k"), py::arg("b"), py::kw_only(),
                    py::arg("d") = py::none(), py::arg("epsilon") = py::none())
               .def_property_readonly("d", &sampled_fenwick::sample_rate));

  saveable(common<packed_fenwick>(m, "PackedFenwick")
               .def(py::init<std::vector<std::uint64_t>, unsigned, unsigned,
                             std::optional<std::uint64_t>>(),
                    py::arg("values"), py::arg("k"), py::arg("delta_bits") = 8, py::kw_only(),
                    py::arg("d") = py::none())
               .def_property_readonly("b", [](const packed_fenwick& s) { return s.params().b; })
               .def_property_readonly("d", [](const packed_fenwick& s) { return s.params().d; })
               .def_property_readonly("delta_bits",
                                      [](const packed_fenwick& s) { return s.params().delta_bits; })
               .def_property_readonly("max_pending", &packed_fenwick::max_pending_magnitude));

  common<naive_array>(m, "NaiveArray")
      .def(py::init<std::vector<std::uint64_t>, unsigned>(), py::arg("values"), py::arg("k"));

  m.def("sample_rate_for", &sample_rate_for, py::arg("n"), py::arg("b"), py::arg("epsilon"));

  m.def(
      "encode_array",
      [](std::vector<std::uint64_t> values, unsigned k) {
        const bytes b = encode_array({k, std::move(values)});
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      },
      py::arg("values"), py::arg("k"));
  m.def(
      "decode_array",
      [](const py::bytes& data) {
        const std::string raw = data;
        array_file a = decode_array({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
        return py::make_tuple(std::move(a.values), a.k);
      },
      py::arg("data"));
}
