#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <span>
#include <string>

#include "bandchol/band_matrix.hpp"
#include "bandchol/blocked.hpp"
#include "bandchol/errors.hpp"
#include "bandchol/flop_model.hpp"
#include "bandchol/kernels.hpp"
#include "bandchol/parallel.hpp"
#include "bandchol/reference.hpp"

namespace py = pybind11;
using namespace bandchol;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

PYBIND11_CONSTINIT py::gil_safe_call_once_and_store<py::object> base_error;
PYBIND11_CONSTINIT py::gil_safe_call_once_and_store<py::object> npd_error;
PYBIND11_CONSTINIT py::gil_safe_call_once_and_store<py::object> divisible_error;

BandedMatrix from_numpy(const FArray& dense, index_t bandwidth) {
  if (dense.ndim() != 2 || dense.shape(0) != dense.shape(1)) {
    throw py::value_error("expected a square 2-D array");
  }
  const index_t n = dense.shape(0);
  return BandedMatrix::from_dense(
      std::span<const double>(dense.data(), static_cast<std::size_t>(n * n)), n,
      bandwidth);
}

py::array_t<double> to_numpy(const BandedMatrix& a) {
  const std::vector<double> dense = a.to_dense();
  const auto n = static_cast<py::ssize_t>(a.dim());
  py::array_t<double, py::array::f_style> out({n, n});
  std::copy(dense.begin(), dense.end(), out.mutable_data());
  return out;
}

py::array_t<double> band_array(const BandedMatrix& a) {
  const auto ld = static_cast<py::ssize_t>(a.lead_dim());
  const auto n = static_cast<py::ssize_t>(a.dim());
  py::array_t<double, py::array::f_style> out({ld, n});
  std::copy(a.data().begin(), a.data().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_bandchol, m) {
  m.doc() = "Banded Cholesky factorization in LAPACK lower band storage";

  base_error.call_once_and_store_result([&] {
    return py::object(py::exception<Error>(m, "BandcholError", PyExc_RuntimeError));
  });
  npd_error.call_once_and_store_result([&] {
    return py::object(py::exception<NotPositiveDefinite>(
        m, "NotPositiveDefiniteError", base_error.get_stored().ptr()));
  });
  divisible_error.call_once_and_store_result([&] {
    return py::object(py::exception<BandwidthNotDivisible>(
        m, "BandwidthNotDivisibleError", base_error.get_stored().ptr()));
  });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const NotPositiveDefinite& e) {
      const py::object type = npd_error.get_stored();
      py::object exc = type(e.what());
      exc.attr("column") = e.column();
      PyErr_SetObject(type.ptr(), exc.ptr());
    } catch (const BandwidthNotDivisible& e) {
      py::set_error(divisible_error.get_stored(), e.what());
    } catch (const Error& e) {
      py::set_error(base_error.get_stored(), e.what());
    }
  });

  py::class_<BandedMatrix>(m, "BandedMatrix")
      .def(py::init<index_t, index_t>(), py::arg("dim"), py::arg("bandwidth"))
      .def_static("identity", &BandedMatrix::identity, py::arg("dim"),
                  py::arg("bandwidth"))
      .def_static("from_dense", &from_numpy, py::arg("dense"), py::arg("bandwidth"),
                  "Packs the lower band of a square array.")
      .def_property_readonly("dim", &BandedMatrix::dim)
      .def_property_readonly("bandwidth", &BandedMatrix::bandwidth)
      .def_property_readonly("band", &band_array,
                             "Copy of the (ldab, N) lower band storage.")
      .def("to_dense", &to_numpy, "Full symmetric matrix as a 2-D array.")
      .def("copy", [](const BandedMatrix& a) { return BandedMatrix(a); })
      .def("__getitem__",
           [](const BandedMatrix& a, std::pair<index_t, index_t> ij) {
             return a.get_symmetric(ij.first, ij.second);
           })
      .def("__setitem__",
           [](BandedMatrix& a, std::pair<index_t, index_t> ij, double v) {
             a.at(std::max(ij.first, ij.second), std::min(ij.first, ij.second)) = v;
           })
      .def("__repr__", [](const BandedMatrix& a) {
        return "BandedMatrix(dim=" + std::to_string(a.dim()) +
               ", bandwidth=" + std::to_string(a.bandwidth()) + ")";
      });

  m.def("generate_spd", &generate_spd, py::arg("dim"), py::arg("bandwidth"),
        py::arg("seed") = 0);
  m.def("residual_norm", &residual_norm, py::arg("original"), py::arg("factor"));
  m.def("pad_bandwidth", &pad_bandwidth, py::arg("a"), py::arg("bandwidth"));
  m.def("restrict_bandwidth", &restrict_bandwidth, py::arg("a"),
        py::arg("bandwidth"));
  m.def(
      "solve",
      [](const BandedMatrix& factor, const FArray& rhs) {
        const std::vector<double> x = solve_with_factor(
            factor, std::span<const double>(rhs.data(),
                                            static_cast<std::size_t>(rhs.size())));
        return py::array_t<double>(static_cast<py::ssize_t>(x.size()), x.data());
      },
      py::arg("factor"), py::arg("rhs"));

  m.def(
      "factor_reference",
      [](BandedMatrix& a, bool instrument) {
        FactorResult r;
        {
          py::gil_scoped_release release;
          r = factor_reference(a, instrument);
        }
        return r.flop_count;
      },
      py::arg("a"), py::arg("instrument") = false,
      "Factors in place; returns the executed operation count when instrumented.");
  m.def(
      "factor_blocked_serial",
      [](BandedMatrix& a, int grid_dim, const std::string& backend) {
        const KernelBackend& kb = backend_by_name(backend);
        py::gil_scoped_release release;
        factor_blocked_serial(a, grid_dim, kb);
      },
      py::arg("a"), py::arg("grid_dim"), py::arg("backend") = "native");
  m.def(
      "factor_blocked_parallel",
      [](BandedMatrix& a, int grid_dim, int workers, const std::string& backend) {
        const KernelBackend& kb = backend_by_name(backend);
        ExecPolicy policy;
        policy.worker_count = workers;
        py::gil_scoped_release release;
        factor_blocked_parallel(a, grid_dim, policy, kb);
      },
      py::arg("a"), py::arg("grid_dim"), py::arg("workers") = 1,
      py::arg("backend") = "native");

  m.def("flops_exact", [](index_t n, index_t k) { return flops_exact(n, k).value; },
        py::arg("dim"), py::arg("bandwidth"));
  m.def("flops_approx", [](index_t n, index_t k) { return flops_approx(n, k).value; },
        py::arg("dim"), py::arg("bandwidth"));
  m.def("count_flops_instrumented",
        [](index_t n, index_t k) { return count_flops_instrumented(n, k).value; },
        py::arg("dim"), py::arg("bandwidth"));
  m.def("select_grid_dim", &select_grid_dim, py::arg("bandwidth"), py::arg("cores"));
  m.def("physical_core_count", &physical_core_count);
  m.def("available_backends", &available_backends);
}
