#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "streamrec/analysis.hpp"
#include "streamrec/basis.hpp"
#include "streamrec/errors.hpp"
#include "streamrec/experiment.hpp"
#include "streamrec/oracle.hpp"
#include "streamrec/stream_solver.hpp"

namespace py = pybind11;
using namespace streamrec;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return Matrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return Vector(a.data(), a.data() + a.shape(0));
}

py::array_t<double> from_vector(const Vector& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> from_matrix(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

SampleBatch make_batch(long k, const Array& a, const Array& b, const Array& y) {
  SampleBatch batch;
  batch.k = k;
  batch.a = to_matrix(a);
  batch.b = to_matrix(b);
  batch.values = to_vector(y);
  batch.times.assign(batch.values.size(), 0.0);
  if (batch.a.rows() != batch.values.size() || batch.b.rows() != batch.values.size())
    throw std::invalid_argument("A, B and y need the same number of rows");
  return batch;
}

}  // namespace

PYBIND11_MODULE(_streamrec, m) {
  m.doc() = "Streaming least-squares reconstruction from non-uniform samples";

  py::register_exception<Error>(m, "StreamrecError", PyExc_RuntimeError);

  py::class_<PacketBasis>(m, "PacketBasis")
      .def_property_readonly("size", &PacketBasis::size)
      .def_property_readonly("eta", &PacketBasis::eta)
      .def("support", &PacketBasis::support)
      .def("eval", &PacketBasis::eval, py::arg("k"), py::arg("n"), py::arg("t"))
      .def(
          "evaluate",
          [](const PacketBasis& b, long k, double t) {
            Vector out(b.size());
            b.evaluate(k, t, out);
            return from_vector(out);
          },
          py::arg("k"), py::arg("t"))
      .def("gram", [](const PacketBasis& b) { return from_matrix(b.gram()); });

  m.def("build_lot", &build_lot, py::arg("n"), py::arg("eta") = 0.25);
  m.def(
      "build_shift_invariant", [](std::size_t n) { return build_shift_invariant(Generator::Daubechies4, n); },
      py::arg("n"));
  m.def(
      "slepian_eigenvalues",
      [](double omega, double eta, std::size_t n, std::size_t grid_size) {
        return from_vector(build_slepian_lot(omega, eta, n, grid_size).spectrum.eigenvalues);
      },
      py::arg("omega"), py::arg("eta"), py::arg("n"), py::arg("grid_size"));
  m.def("flatness_beta", &flatness_beta, py::arg("basis"), py::arg("grid_size"));

  py::class_<StreamSolver>(m, "StreamSolver")
      .def(py::init([](std::size_t n, std::optional<std::size_t> max_lag, std::optional<std::size_t> freeze_lag) {
             SolverOptions o;
             o.max_lag = max_lag;
             o.freeze_lag = freeze_lag;
             return StreamSolver(n, o);
           }),
           py::arg("n"), py::arg("max_lag") = py::none(), py::arg("freeze_lag") = py::none())
      .def(
          "push",
          [](StreamSolver& s, long k, const Array& a, const Array& b, const Array& y, double lambda) {
            s.push(make_batch(k, a, b, y), lambda);
          },
          py::arg("k"), py::arg("a"), py::arg("b"), py::arg("y"), py::arg("lam") = 0.0)
      .def("estimate", [](const StreamSolver& s, long k) { return from_vector(s.estimate(k)); })
      .def("full_backward_sweep",
           [](const StreamSolver& s) {
             py::list out;
             for (const auto& v : s.full_backward_sweep()) out.append(from_vector(v));
             return out;
           })
      .def("retained_packets", &StreamSolver::retained_packets)
      .def_property_readonly("first_index", &StreamSolver::first_index)
      .def_property_readonly("last_index", &StreamSolver::last_index)
      .def("checkpoint", &StreamSolver::checkpoint)
      .def_static("restore", &StreamSolver::restore);

  m.def(
      "solve_dense",
      [](const std::vector<std::tuple<Array, Array, Array>>& batches, const std::vector<double>& lambdas,
         std::size_t n) {
        std::vector<SampleBatch> bs;
        long k = 0;
        for (const auto& [a, b, y] : batches) bs.push_back(make_batch(k++, a, b, y));
        py::list out;
        for (const auto& v : solve_dense(make_problem(bs, lambdas, n))) out.append(from_vector(v));
        return out;
      },
      py::arg("batches"), py::arg("lambdas"), py::arg("n"));

  m.def(
      "epsilon_bound", [](double d, double t) { return epsilon_bound(d, t).epsilon; }, py::arg("delta"),
      py::arg("theta"));
  m.def("theorem_constant", &theorem_constant, py::arg("delta"), py::arg("theta"), py::arg("epsilon"),
        py::arg("lambda_inv"));

  m.def("preset_config", [](const std::string& name) { return config_to_json(preset_config(name)); });
  m.def("resolve_config", [](const std::string& text) { return config_to_json(config_from_json(text)); });
  m.def("simulate", [](const std::string& config) {
    const auto samples = simulate(config_from_json(config));
    Vector t, y;
    for (const auto& s : samples) {
      t.push_back(s.t);
      y.push_back(s.y);
    }
    return py::make_tuple(from_vector(t), from_vector(y));
  });
  m.def(
      "run_experiment",
      [](const std::string& config, const std::string& out_dir) {
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(config_from_json(config));
        }
        if (!out_dir.empty()) write_artifacts(r, out_dir);
        return summary_json(r);
      },
      py::arg("config"), py::arg("out_dir") = "");
}
