#include "finsler/json_io.hpp"

#include <sstream>

#include <json.hpp>

namespace finsler {

namespace {

using nlohmann::ordered_json;

Matrix parse_matrix(const ordered_json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw invalid_input(std::string(what) + ": expected a matrix");
    const auto rows = j.size();
    const auto cols = j.at(0).size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (!row.is_array() || row.size() != cols)
            throw invalid_input(std::string(what) + ": ragged matrix rows");
        for (std::size_t k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i),
                                                 static_cast<Eigen::Index>(k)) =
            row.at(k).get<double>();
    }
    return m;
}

Vector parse_vector(const ordered_json& j, const char* what) {
    if (!j.is_array()) throw invalid_input(std::string(what) + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) =
        j.at(i).get<double>();
    return v;
}

ordered_json parse(const std::string& text, const char* what) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw invalid_input(std::string(what) + ": malformed JSON");
    return j;
}

MinkowskiNorm norm_from(const ordered_json& j) {
    const std::string kind = j.value("kind", "");
    if (kind == "euclidean") return MinkowskiNorm::euclidean(parse_matrix(j.at("metric"), "norm"));
    if (kind == "randers")
        return MinkowskiNorm::randers(parse_matrix(j.at("metric"), "norm"),
                                      parse_vector(j.at("drift"), "norm drift"));
    throw invalid_input("norm: unknown kind \"" + kind + "\"");
}

ordered_json vector_to_json(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

} // namespace

MinkowskiNorm norm_from_json(const std::string& json_text) {
    return norm_from(parse(json_text, "norm"));
}

Manifold manifold_from_json(const std::string& json_text) {
    const ordered_json j = parse(json_text, "manifold");
    const std::string kind = j.value("kind", "");
    if (kind == "flat") return Manifold::flat(norm_from(j.at("norm")));
    if (kind == "riemannian") {
        const std::string metric = j.value("metric", "");
        if (metric == "poincare-disk") return Manifold::poincare_disk();
        throw invalid_input("manifold: unknown riemannian metric \"" + metric + "\"");
    }
    if (kind == "randers-field") {
        const std::string field = j.value("drift_field", "");
        if (field != "constant")
            throw invalid_input("manifold: unsupported drift_field \"" + field + "\"");
        return Manifold::flat(MinkowskiNorm::randers(parse_matrix(j.at("metric"), "manifold"),
                                                     parse_vector(j.at("drift"), "manifold")));
    }
    throw invalid_input("manifold: unknown kind \"" + kind + "\"");
}

WeightedMeasure measure_from_json(const std::string& json_text) {
    const ordered_json j = parse(json_text, "measure");
    if (!j.contains("atoms")) throw invalid_input("measure: missing \"atoms\"");
    std::vector<Atom> atoms;
    for (const auto& aj : j.at("atoms")) {
        Atom a;
        a.point = parse_vector(aj.at("point"), "measure atom");
        a.weight = aj.at("weight").get<double>();
        atoms.push_back(std::move(a));
    }
    return WeightedMeasure(std::move(atoms));
}

std::string solver_report_to_json(const solvers::SolverReport& report, bool include_trace) {
    ordered_json j;
    j["final_point"] = vector_to_json(report.final_point);
    j["final_objective"] = report.final_objective;
    j["final_grad_dual_norm"] = report.final_grad_dual_norm;
    j["iterations"] = report.iterations;
    j["iterates"] = report.trace.size();
    j["termination"] = solvers::to_string(report.termination);
    if (!std::isnan(report.step_constant)) {
        j["step_constant"] = report.step_constant;
        j["start_condition_met"] = report.start_condition_met;
        j["containment_ok"] = report.containment_ok;
    }
    if (report.collinear_support_risk) j["collinear_support_risk"] = true;
    if (include_trace) {
        ordered_json rows = ordered_json::array();
        for (const auto& r : report.trace) {
            ordered_json row;
            row["point"] = vector_to_json(r.point);
            row["objective"] = r.objective;
            row["grad_dual_norm"] = r.grad_dual_norm;
            if (!std::isnan(r.descent_slack)) row["descent_slack"] = r.descent_slack;
            if (!std::isnan(r.monotonic_delta)) row["monotonic_delta"] = r.monotonic_delta;
            rows.push_back(std::move(row));
        }
        j["trace"] = std::move(rows);
    }
    return j.dump(2);
}

std::string solver_report_to_csv(const solvers::SolverReport& report) {
    std::ostringstream os;
    os.precision(17);
    const Eigen::Index dim = report.final_point.size();
    os << "iteration";
    for (Eigen::Index d = 0; d < dim; ++d) os << ",x" << d;
    os << ",objective,grad_dual_norm\n";
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        const auto& r = report.trace[i];
        os << i;
        for (Eigen::Index d = 0; d < dim; ++d) os << "," << r.point(d);
        os << "," << r.objective << "," << r.grad_dual_norm << "\n";
    }
    return os.str();
}

} // namespace finsler
