#include "granuloma/config.hpp"
#include "granuloma/diagnostics.hpp"
#include "granuloma/error.hpp"
#include "granuloma/functionals.hpp"
#include "granuloma/model.hpp"
#include "granuloma/scenario.hpp"
#include "granuloma/semigroup.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace granuloma;

namespace {

BoxDomain domain_from(const std::vector<double>& extents, const std::vector<int>& cells)
{
    if (extents.size() != cells.size() || extents.empty() || extents.size() > 2) {
        throw InvalidArgument("extents and cells must both have length 1 or 2");
    }
    return extents.size() == 1 ? BoxDomain::line(extents[0], cells[0])
                               : BoxDomain::rectangle(extents[0], extents[1], cells[0], cells[1]);
}

py::array_t<double> to_array(const std::vector<double>& v)
{
    py::array_t<double> a(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
    auto out = a.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < out.shape(0); ++i) out(i) = v[static_cast<std::size_t>(i)];
    return a;
}

// Diagnostics as a dict of column arrays (zp_phi uses NaN when inactive).
py::dict trajectory_dict(const Trajectory& traj)
{
    std::vector<double> cols[11];
    for (const auto& r : traj) {
        const double vals[] = {r.t,       r.linf_u_minus_beta, r.w1q_v,     r.w1q_w,     r.linf_z,
                               r.l1_mass, r.linf_vw,           r.lq_grad_v, r.lq_grad_w, r.lp_z,
                               r.zp_phi.value_or(std::numeric_limits<double>::quiet_NaN())};
        for (int k = 0; k < 11; ++k) cols[k].push_back(vals[k]);
    }
    static const char* names[] = {"t",       "linf_u_minus_beta", "w1q_v",     "w1q_w",     "linf_z", "l1_mass",
                                  "linf_vw", "lq_grad_v",         "lq_grad_w", "lp_z",      "zp_phi"};
    py::dict d;
    for (int k = 0; k < 11; ++k) d[names[k]] = to_array(cols[k]);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Bindings for the granuloma chemotaxis simulator.";

    py::register_exception<Error>(m, "GranulomaError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init([](double beta, double mu, const std::string& f, int n, double q) {
                 ModelParams p;
                 p.beta = beta;
                 p.mu = mu;
                 p.f_kind = kinetics_from_string(f);
                 p.n = n;
                 p.q = q;
                 return p;
             }),
             py::arg("beta") = 2.0, py::arg("mu") = 0.4, py::arg("f") = "linear", py::arg("n") = 1,
             py::arg("q") = 4.0)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("mu", &ModelParams::mu)
        .def_readwrite("n", &ModelParams::n)
        .def_readwrite("q", &ModelParams::q)
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(beta=" + std::to_string(p.beta) + ", mu=" + std::to_string(p.mu) + ")";
        });

    m.def("reproduction_number", &reproduction_number, py::arg("params"));
    m.def("xi_interval", &xi_interval, py::arg("params"));
    m.def("gamma_sup", &gamma_sup, py::arg("params"), py::arg("xi"), py::arg("delta"), py::arg("lam"));
    m.def("s_integral", &s_integral, py::arg("a"), py::arg("rate"));
    m.def("regime", [](const ModelParams& p) { return to_string(classify(p)); }, py::arg("params"));

    m.def("kappa", py::overload_cast<double, double, double>(&kappa), py::arg("p"), py::arg("ell"),
          py::arg("w_star"));
    m.def("find_b0", &find_b0, py::arg("p"), py::arg("ell"));

    m.def(
        "neumann_lambda",
        [](const std::vector<double>& extents, const std::vector<int>& cells) {
            return neumann_lambda(domain_from(extents, cells));
        },
        py::arg("extents"), py::arg("cells"));
    m.def(
        "heat_apply",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f, double t,
           const std::vector<double>& extents) {
            std::vector<int> cells;
            for (py::ssize_t k = f.ndim() - 1; k >= 0; --k) cells.push_back(static_cast<int>(f.shape(k)));
            const BoxDomain d = domain_from(extents, cells);
            Field in(std::vector<double>(f.data(), f.data() + f.size()));
            py::array_t<double> out(f.request().shape);
            const Field h = heat_apply(in, t, d);
            std::copy(h.values.begin(), h.values.end(), out.mutable_data());
            return out;
        },
        py::arg("f"), py::arg("t"), py::arg("extents"),
        "Neumann heat semigroup; a 2D array is indexed [y, x].");

    m.def(
        "fit_rate",
        [](const std::vector<double>& t, const std::vector<double>& v, double tail) {
            if (t.size() != v.size()) throw InvalidArgument("t and values differ in length");
            std::vector<SeriesPoint> s;
            for (std::size_t i = 0; i < t.size(); ++i) s.push_back({t[i], v[i]});
            const RateFit f = fit_rate(s, tail);
            return py::make_tuple(f.C, f.rate, f.r2);
        },
        py::arg("t"), py::arg("values"), py::arg("tail_fraction") = 0.5, "Returns (C, rate, r2).");

    m.def(
        "ode_oracle",
        [](const std::array<double, 4>& y0, const ModelParams& p, double t_end) {
            const OdeSeries s = ode_oracle(y0, p, t_end);
            py::dict d;
            d["t"] = to_array(s.t);
            d["u"] = to_array(s.u);
            d["v"] = to_array(s.v);
            d["w"] = to_array(s.w);
            d["z"] = to_array(s.z);
            return d;
        },
        py::arg("y0"), py::arg("params"), py::arg("t_end"));

    m.def("parse_config", &parse_config_string, py::arg("text"),
          "Parses key = value text; returns an opaque config.");
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def("set", [](RunConfig& c, const std::string& k, const std::string& v) { set_config_value(c, k, v); })
        .def("text", &config_to_string)
        .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; });
    m.def("config_keys", &config_keys);

    m.def(
        "constants",
        [](const RunConfig& c) {
            py::dict d;
            for (const auto& [k, v] : constants_report(c)) d[py::str(k)] = v;
            return d;
        },
        py::arg("config"));

    m.def(
        "simulate",
        [](const RunConfig& c, const std::string& output_dir) {
            SimulationOutput out;
            {
                py::gil_scoped_release release;
                out = simulate(c, output_dir, c.k_hat.has_value());
            }
            py::dict d;
            d["termination"] = to_string(out.result.termination);
            d["rows"] = trajectory_dict(out.result.rows);
            py::list checks;
            for (const auto& r : out.checks) {
                py::dict cd;
                cd["check"] = r.name;
                cd["pass"] = r.pass;
                cd["indeterminate"] = r.indeterminate;
                cd["margin"] = r.margin;
                cd["notes"] = r.notes;
                checks.append(cd);
            }
            d["checks"] = checks;
            d["steps"] = out.result.dt.steps;
            return d;
        },
        py::arg("config"), py::arg("output_dir") = "",
        "Runs one configuration; envelope constants are resolved only when K-hat is configured.");
}
