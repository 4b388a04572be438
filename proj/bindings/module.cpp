#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chemflow/cli.hpp"
#include "chemflow/config.hpp"
#include "chemflow/driver.hpp"
#include "chemflow/errors.hpp"
#include "chemflow/io.hpp"

namespace py = pybind11;
using namespace chemflow;

namespace {

std::vector<py::ssize_t> cell_shape(const Domain& d) {
    std::vector<py::ssize_t> shape;
    for (int a = 0; a < d.dim; ++a) shape.push_back(d.cells[a]);
    return shape;
}

py::array_t<double> scalar_values(const ScalarField& f) {
    py::array_t<double> out(cell_shape(f.domain()));
    std::copy(f.data().begin(), f.data().end(), out.mutable_data());
    return out;
}

void scalar_set(ScalarField& f, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (static_cast<std::size_t>(a.size()) != f.size())
        throw ConfigError("array size does not match the field");
    std::copy(a.data(), a.data() + a.size(), f.data().begin());
}

py::array_t<double> face_values(const VectorField& u, int axis) {
    const auto fd = u.face_dims(axis);
    std::vector<py::ssize_t> shape;
    for (int a = 0; a < u.dim(); ++a) shape.push_back(fd[a]);
    py::array_t<double> out(shape);
    std::copy(u.component(axis).begin(), u.component(axis).end(), out.mutable_data());
    return out;
}

void face_set(VectorField& u, int axis,
              const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (static_cast<std::size_t>(a.size()) != u.component(axis).size())
        throw ConfigError("array size does not match the face grid");
    std::copy(a.data(), a.data() + a.size(), u.component(axis).begin());
}

} // namespace

PYBIND11_MODULE(_chemflow, m) {
    m.doc() = "chemotaxis-Navier-Stokes finite-difference simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Domain>(m, "Domain")
        .def_readonly("dim", &Domain::dim)
        .def_property_readonly("lengths",
                               [](const Domain& d) {
                                   return std::vector<double>(d.length.begin(),
                                                              d.length.begin() + d.dim);
                               })
        .def_property_readonly("cells",
                               [](const Domain& d) {
                                   return std::vector<int>(d.cells.begin(),
                                                           d.cells.begin() + d.dim);
                               })
        .def_property_readonly("spacing",
                               [](const Domain& d) {
                                   return std::vector<double>(d.spacing.begin(),
                                                              d.spacing.begin() + d.dim);
                               })
        .def_property_readonly("volume", &Domain::volume);

    m.def("make_domain", &make_domain, py::arg("dim"), py::arg("lengths"), py::arg("cells"));

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init<const Domain&, double>(), py::arg("domain"), py::arg("value") = 0.0)
        .def_property_readonly("domain", &ScalarField::domain)
        .def_property("values", &scalar_values, &scalar_set);

    py::class_<VectorField>(m, "VectorField")
        .def(py::init<const Domain&>(), py::arg("domain"))
        .def_property_readonly("dim", &VectorField::dim)
        .def("component", &face_values, py::arg("axis"))
        .def("set_component", &face_set, py::arg("axis"), py::arg("values"))
        .def("enforce_no_slip", &VectorField::enforce_no_slip);

    py::class_<SimState>(m, "SimState")
        .def_readwrite("n", &SimState::n)
        .def_readwrite("c", &SimState::c)
        .def_readwrite("u", &SimState::u)
        .def_readwrite("P", &SimState::P)
        .def_readwrite("t", &SimState::t)
        .def_readwrite("eps", &SimState::eps);

    py::class_<PoissonSolverConfig>(m, "PoissonSolverConfig")
        .def(py::init<>())
        .def_readwrite("rel_tol", &PoissonSolverConfig::rel_tol)
        .def_readwrite("max_iter", &PoissonSolverConfig::max_iter);

    py::class_<ReactionParams>(m, "ReactionParams")
        .def(py::init<>())
        .def_readwrite("chi", &ReactionParams::chi)
        .def_readwrite("kappa", &ReactionParams::kappa)
        .def_readwrite("mu", &ReactionParams::mu)
        .def_readwrite("eps", &ReactionParams::eps)
        .def_readwrite("pos_tol", &ReactionParams::pos_tol);

    py::class_<YParams>(m, "YParams")
        .def_readonly("p", &YParams::p)
        .def_readonly("theta", &YParams::theta)
        .def_readonly("eta", &YParams::eta)
        .def_readonly("B", &YParams::B)
        .def_readonly("K", &YParams::K)
        .def_readonly("k1", &YParams::k1);

    py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
        .def_readonly("t", &DiagnosticsRecord::t)
        .def_readonly("mass_n", &DiagnosticsRecord::mass_n)
        .def_readonly("min_n", &DiagnosticsRecord::min_n)
        .def_readonly("max_n", &DiagnosticsRecord::max_n)
        .def_readonly("sup_c", &DiagnosticsRecord::sup_c)
        .def_readonly("int_c", &DiagnosticsRecord::int_c)
        .def_readonly("grad_c_sq", &DiagnosticsRecord::grad_c_sq)
        .def_readonly("kinetic", &DiagnosticsRecord::kinetic)
        .def_readonly("enstrophy_like", &DiagnosticsRecord::enstrophy_like)
        .def_readonly("F", &DiagnosticsRecord::F)
        .def_readonly("G", &DiagnosticsRecord::G)
        .def_readonly("y_p", &DiagnosticsRecord::y_p)
        .def_readonly("z_p", &DiagnosticsRecord::z_p)
        .def_readonly("clamp_flags", &DiagnosticsRecord::clamp_flags)
        .def_readonly("lp_n", &DiagnosticsRecord::lp_n)
        .def_readonly("lp_u", &DiagnosticsRecord::lp_u);

    py::class_<Violation>(m, "Violation")
        .def_readonly("t", &Violation::t)
        .def_readonly("what", &Violation::what);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("final_state", &RunResult::final_state)
        .def_readonly("records", &RunResult::records)
        .def_readonly("violations", &RunResult::violations)
        .def_readonly("wall_time", &RunResult::wall_time)
        .def_readonly("aborted", &RunResult::aborted);

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("output_dir", &RunConfig::output_dir)
        .def_readonly("scenario", &RunConfig::scenario)
        .def_property_readonly("params", [](const RunConfig& rc) { return rc.params; });

    py::class_<SimParams>(m, "SimParams");

    py::class_<EpsStudyResult>(m, "EpsStudyResult")
        .def_readonly("eps", &EpsStudyResult::eps)
        .def_readonly("distances", &EpsStudyResult::distances)
        .def_readonly("strictly_decreasing", &EpsStudyResult::strictly_decreasing);

    // pointwise model functions
    m.def("consumption_rate", &consumption_rate, py::arg("n"), py::arg("eps"));
    m.def("logistic_update", &logistic_update, py::arg("n"), py::arg("dt"), py::arg("kappa"),
          py::arg("mu"));
    m.def("homogeneous_oracle", &homogeneous_oracle, py::arg("n0"), py::arg("c0"), py::arg("eps"),
          py::arg("t"), py::arg("kappa"), py::arg("mu"));
    m.def("select_y_params", &select_y_params, py::arg("p"), py::arg("chi"), py::arg("kappa"),
          py::arg("mu"), py::arg("volume"));
    m.def("comparison_z", &comparison_z, py::arg("t"), py::arg("T"), py::arg("yT"),
          py::arg("y_params"), py::arg("kappa"));

    // discrete operators
    m.def("laplacian_neumann", &laplacian_neumann, py::arg("field"));
    m.def("divergence_faces_to_cells", &divergence_faces_to_cells, py::arg("faces"));
    m.def("gradient_cells_to_faces", &gradient_cells_to_faces, py::arg("field"));
    m.def(
        "poisson_solve_neumann",
        [](const ScalarField& rhs, const PoissonSolverConfig& cfg) {
            return poisson_solve_neumann(rhs, cfg);
        },
        py::arg("rhs"), py::arg("config") = PoissonSolverConfig{});
    m.def(
        "project_divergence_free",
        [](const VectorField& u, const PoissonSolverConfig& cfg) {
            return project_divergence_free(u, cfg);
        },
        py::arg("u"), py::arg("config") = PoissonSolverConfig{});
    m.def("yosida_smooth", &yosida_smooth, py::arg("u"), py::arg("eps"),
          py::arg("config") = PoissonSolverConfig{});

    // configuration and runs
    m.def("parse_config_text", &parse_config_text, py::arg("text"));
    m.def("parse_config_file", &parse_config_file, py::arg("path"));
    m.def(
        "run_config", [](const RunConfig& rc) { return run(rc.params); }, py::arg("config"),
        "run the scenario described by a parsed config (no file output)");
    m.def(
        "run_text", [](const std::string& text) { return run(parse_config_text(text).params); },
        py::arg("text"), "parse an inline config and run it");
    m.def(
        "epsilon_study_text",
        [](const std::string& text, const std::vector<double>& eps) {
            return epsilon_study(parse_config_text(text).params, eps);
        },
        py::arg("text"), py::arg("eps_list"));
    m.def("write_snapshot", &write_snapshot, py::arg("state"), py::arg("path"));
    m.def("read_snapshot", &read_snapshot, py::arg("path"));
    m.def(
        "cli_main",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv;
            argv.push_back("chemflow");
            for (const auto& a : args) argv.push_back(a.c_str());
            return cli_main(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"));
}
