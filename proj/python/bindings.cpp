#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "viewforge/canonical_views.hpp"
#include "viewforge/ra.hpp"
#include "viewforge/report.hpp"

namespace py = pybind11;
using namespace viewforge;

namespace {

// Results cross the boundary as JSON text; the Python side decodes them.
std::string parse(const std::string& text) {
    auto res = parse_workspace(text);
    Json j;
    j["ok"] = res.ok();
    Json diags = Json::array();
    for (const auto& d : res.diagnostics)
        diags.push_back({{"line", d.line}, {"column", d.column}, {"message", d.message}, {"hint", d.hint}});
    j["diagnostics"] = diags;
    if (res.ok()) j["workspace"] = print_workspace(res.workspace);
    return j.dump();
}

std::string design(const std::string& text, const std::string& query, const std::vector<std::string>& secrets,
                   const std::string& cls) {
    auto ws = load_workspace(text);
    return run_design(ws, query, secrets, parse_design_class(cls)).json.dump();
}

std::string determinacy(const std::string& text, const std::string& query, const std::string& dview) {
    auto ws = load_workspace(text);
    const auto& q = ws.query(query);
    const auto& dv = ws.dview(dview);
    Json j = report_header(ws, "determinacy");
    j["query"] = q.name;
    j["dview"] = dv.name;
    j["verdict"] = to_json(check_determinacy(q, dv, ws.rules), q, dv);
    return j.dump();
}

std::string disclosure(const std::string& text, const std::string& dview, const std::string& secret) {
    auto ws = load_workspace(text);
    const auto& dv = ws.dview(dview);
    const auto& p = ws.secret(secret);
    Json j = report_header(ws, "disclosure");
    j["dview"] = dv.name;
    j["verdict"] = to_json(check_un_disclosure_cq(dv, p, ws.schema, ws.rules), p, dv);
    return j.dump();
}

std::vector<std::string> canonical(const std::string& text, const std::string& query) {
    auto ws = load_workspace(text);
    std::vector<std::string> out;
    for (const auto& v : canonical_dview(ws.query(query), ws.schema).views) out.push_back(v.to_string());
    return out;
}

std::vector<std::string> to_ra(const std::string& text, const std::string& view) {
    auto ws = load_workspace(text);
    std::vector<std::string> out;
    for (const auto& v : compile_dcq_to_ra(ws.view(view))) out.push_back(v.to_string());
    return out;
}

std::string verify(const std::string& report) {
    Json out = Json::array();
    for (const auto& c : verify_report(Json::parse(report)))
        out.push_back({{"kind", c.kind}, {"path", c.path}, {"ok", c.ok}, {"detail", c.detail}});
    return out.dump();
}

}  // namespace

PYBIND11_MODULE(_viewforge, m) {
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    m.def("parse", &parse, py::arg("text"));
    m.def("design", &design, py::arg("text"), py::arg("query"), py::arg("secrets"), py::arg("cls") = "all");
    m.def("determinacy", &determinacy, py::arg("text"), py::arg("query"), py::arg("dview"));
    m.def("disclosure", &disclosure, py::arg("text"), py::arg("dview"), py::arg("secret"));
    m.def("canonical", &canonical, py::arg("text"), py::arg("query"));
    m.def("to_ra", &to_ra, py::arg("text"), py::arg("view"));
    m.def("verify", &verify, py::arg("report"));
}
