#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kronopt/bench.hpp"
#include "kronopt/community.hpp"
#include "kronopt/dcpf.hpp"
#include "kronopt/driver.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/eval.hpp"
#include "kronopt/kron.hpp"
#include "kronopt/milp.hpp"
#include "kronopt/mps.hpp"
#include "kronopt/network.hpp"

namespace py = pybind11;
using namespace kronopt;

namespace {

// Iteration-1 MILP over the whole network, written as MPS + name map.
void export_milp(const Network& net, const std::string& mps_path,
                 const std::string& map_path, double alpha, int q) {
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd theta_hat = solve_dc(net);
  OptiKronInstance inst;
  inst.active.resize(net.n());
  for (int i = 0; i < net.n(); ++i) inst.active[i] = i;
  inst.omega_prev = Eigen::MatrixXi::Identity(net.n(), net.n());
  inst.B_cur = B;
  inst.lambda_cur = adjacency_of(B);
  inst.P_cur = net.injections();
  inst.theta_hat = theta_hat;
  inst.alpha = alpha;
  inst.q = q;
  inst.M = choose_big_m(theta_hat);
  inst.ref = net.slack_index();
  kronopt::export_mps(build(inst).milp, mps_path, map_path);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DC Opti-KRON: optimal Kron-based reduction of DC power networks";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<ReductionError>(m, "ReductionError", PyExc_RuntimeError);

  py::class_<Bus>(m, "Bus")
      .def_readonly("id", &Bus::id)
      .def_readonly("injection_pu", &Bus::injection_pu)
      .def_readonly("is_slack", &Bus::is_slack);
  py::class_<Branch>(m, "Branch")
      .def_readonly("from_bus", &Branch::from)
      .def_readonly("to_bus", &Branch::to)
      .def_readonly("x", &Branch::x);

  py::class_<Network>(m, "Network")
      .def_static("from_json_text", &Network::from_json_text, py::arg("text"))
      .def_property_readonly("n", &Network::n)
      .def_property_readonly("base_mva", &Network::base_mva)
      .def_property_readonly("slack_index", &Network::slack_index)
      .def_property_readonly("buses", &Network::buses)
      .def_property_readonly("branches", &Network::branches)
      .def("index_of", &Network::index_of, py::arg("bus_id"))
      .def("id_of", &Network::id_of, py::arg("index"))
      .def("injections", &Network::injections)
      .def("to_json_text", &Network::to_json_text)
      .def("__repr__", [](const Network& net) {
        return "<kronopt.Network n=" + std::to_string(net.n()) + ">";
      });
  m.def("load_network", &load_network, py::arg("path"),
        "Parse a MATPOWER .m or native .json case file.");

  m.def("build_susceptance", &build_susceptance, py::arg("net"));
  m.def("adjacency_of", &adjacency_of, py::arg("B"), py::arg("tol") = 1e-9);
  m.def("solve_dc", py::overload_cast<const Network&>(&solve_dc), py::arg("net"));
  m.def("solve_dc",
        py::overload_cast<const Eigen::MatrixXd&, Eigen::VectorXd, int, double>(&solve_dc),
        py::arg("B"), py::arg("P"), py::arg("ref"), py::arg("theta_ref") = 0.0);
  m.def("branch_flows", &branch_flows, py::arg("net"), py::arg("theta"));

  m.def("kron_reduce", &kron_reduce, py::arg("B"), py::arg("keep"));
  m.def("kron_reduce_via_impedance", &kron_reduce_via_impedance, py::arg("B"),
        py::arg("keep"), py::arg("ref"));
  m.def("aggregate_injections", &aggregate_injections, py::arg("P"), py::arg("cmap"),
        py::arg("keep"));
  m.def("ward_injections", &ward_injections, py::arg("B"), py::arg("P"), py::arg("keep"));
  m.def("reduced_network", &reduced_network, py::arg("orig"), py::arg("keep"),
        py::arg("Bred"), py::arg("Pred"), py::arg("slack_pos"), py::arg("fill_tol") = 1e-9);

  py::class_<Partition>(m, "Partition")
      .def_readonly("labels", &Partition::labels)
      .def_readonly("k", &Partition::k)
      .def_readonly("q", &Partition::q);
  m.def("modularity",
        py::overload_cast<const Eigen::MatrixXd&, const std::vector<int>&>(&modularity),
        py::arg("W"), py::arg("labels"));
  m.def("modularity",
        py::overload_cast<const Eigen::MatrixXi&, const std::vector<int>&>(&modularity),
        py::arg("adj"), py::arg("labels"));
  m.def("detect_greedy", &detect_greedy, py::arg("adj"));
  m.def("detect_greedy_k", &detect_greedy_k, py::arg("adj"), py::arg("K"));
  m.def("detect_spectral", &detect_spectral, py::arg("B"), py::arg("k_min"),
        py::arg("k_max"), py::arg("seed") = 0);
  m.def("detect_spectral_k", &detect_spectral_k, py::arg("B"), py::arg("k"),
        py::arg("seed") = 0);

  py::class_<ReduceParams>(m, "ReduceParams")
      .def(py::init<>())
      .def_readwrite("alpha", &ReduceParams::alpha)
      .def_readwrite("q", &ReduceParams::q)
      .def_readwrite("method", &ReduceParams::method)
      .def_readwrite("weighted", &ReduceParams::weighted)
      .def_readwrite("seed", &ReduceParams::seed)
      .def_readwrite("max_iters", &ReduceParams::max_iters)
      .def_readwrite("jobs", &ReduceParams::jobs)
      .def_readwrite("k_min", &ReduceParams::k_min)
      .def_readwrite("k_max", &ReduceParams::k_max)
      .def_readwrite("node_limit", &ReduceParams::node_limit)
      .def_readwrite("time_limit_s", &ReduceParams::time_limit_s)
      .def_readwrite("deterministic", &ReduceParams::deterministic);
  py::class_<IterationLog>(m, "IterationLog")
      .def_readonly("community", &IterationLog::community)
      .def_readonly("iter", &IterationLog::iter)
      .def_readonly("eliminated", &IterationLog::eliminated)
      .def_readonly("objective", &IterationLog::objective)
      .def_readonly("ms", &IterationLog::ms)
      .def_readonly("optimal", &IterationLog::optimal);
  py::class_<ReductionResult>(m, "ReductionResult")
      .def_readonly("keep", &ReductionResult::keep)
      .def_readonly("cmap", &ReductionResult::cmap)
      .def_readonly("omega", &ReductionResult::omega)
      .def_readonly("reduced", &ReductionResult::reduced)
      .def_readonly("B_red", &ReductionResult::B_red)
      .def_readonly("P_red", &ReductionResult::P_red)
      .def_readonly("theta_hat", &ReductionResult::theta_hat)
      .def_readonly("partition", &ReductionResult::partition)
      .def_readonly("logs", &ReductionResult::logs)
      .def_readonly("optimal", &ReductionResult::optimal);
  m.def("reduce", &run, py::arg("net"), py::arg("params"),
        "Run the full Opti-KRON pipeline.");
  m.def("reconstruct", &reconstruct, py::arg("net"), py::arg("keep"),
        py::arg("omega_final"));
  m.def("iteration_log_csv", &iteration_log_csv, py::arg("logs"),
        py::arg("deterministic") = false);

  m.def("mice", &mice, py::arg("orig"), py::arg("reduced"), py::arg("omega_final"),
        py::arg("theta_hat"));
  py::class_<BaselineResult>(m, "BaselineResult")
      .def_readonly("reduced", &BaselineResult::reduced)
      .def_readonly("omega", &BaselineResult::omega)
      .def_readonly("centers", &BaselineResult::centers)
      .def_readonly("partition", &BaselineResult::partition);
  m.def("baseline_cd", &baseline_cd, py::arg("net"), py::arg("K"),
        py::arg("weighted") = false, py::arg("seed") = 0);
  m.def("baseline_cd_kron", &baseline_cd_kron, py::arg("net"), py::arg("K"),
        py::arg("weighted") = false, py::arg("seed") = 0);
  py::class_<ReductionReport>(m, "ReductionReport")
      .def_readonly("method", &ReductionReport::method)
      .def_readonly("level", &ReductionReport::level)
      .def_readonly("scenario", &ReductionReport::scenario)
      .def_readonly("cluster_ids", &ReductionReport::cluster_ids)
      .def_readonly("mice_rad", &ReductionReport::mice_rad)
      .def_readonly("outlier", &ReductionReport::outlier)
      .def_readonly("wall_s", &ReductionReport::wall_s);
  py::class_<CompareParams>(m, "CompareParams")
      .def(py::init<>())
      .def_readwrite("alphas", &CompareParams::alphas)
      .def_readwrite("multipliers", &CompareParams::multipliers)
      .def_readwrite("reduce", &CompareParams::reduce);
  m.def("compare", &compare, py::arg("net"), py::arg("params"));
  m.def("report_csv", &report_csv, py::arg("reports"));
  m.def("summary_json", &summary_json, py::arg("reports"),
        py::arg("deterministic") = false);

  m.def("choose_big_m", &choose_big_m, py::arg("theta_hat"));
  m.def("export_milp", &export_milp, py::arg("net"), py::arg("mps_path"),
        py::arg("map_path"), py::arg("alpha") = 0.0, py::arg("q") = 1);

  m.def("generate_rts96", &generate_rts96);
  m.def("generate_synth2383", &generate_synth2383, py::arg("seed") = 2383);
  m.def("to_matpower_text", &to_matpower_text, py::arg("net"), py::arg("name"));
}
