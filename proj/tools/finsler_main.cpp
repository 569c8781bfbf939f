// Command-line front end: reads a self-describing problem file, runs the
// requested solver or diagnostic, and prints a JSON report on stdout.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include <finsler/bounds.hpp>
#include <finsler/json_io.hpp>
#include <finsler/manifold.hpp>
#include <finsler/measure.hpp>
#include <finsler/sampling.hpp>
#include <finsler/solvers.hpp>

namespace {

using nlohmann::ordered_json;
using namespace finsler;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct ProblemFile {
    Manifold manifold;
    std::optional<WeightedMeasure> measure;
    // solver section
    std::string algorithm;
    double p = 2.0;
    Vector x0;
    double tol = 1e-9;
    int max_iters = 10000;
    double dt = 1e-2;
    double horizon = 100.0;
    // bounds section
    bool has_bounds = false;
    CurvatureBounds curvature;
    bool auto_C = false;
    bool auto_D = false;
    double R = 1.0;
    Vector x0_ball;
};

Vector parse_coords(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw invalid_input("could not parse coordinate \"" + item + "\"");
        }
    }
    if (vals.empty()) throw invalid_input("empty coordinate list");
    Vector v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

Vector json_vector(const ordered_json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) =
        j.at(i).get<double>();
    return v;
}

ordered_json vector_json(const Vector& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

ProblemFile load_problem(const std::string& path, bool need_measure, bool need_solver,
                         bool need_bounds) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot read problem file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    ordered_json j = ordered_json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw invalid_input("malformed JSON in " + path);
    if (!j.contains("manifold")) throw invalid_input("problem file: missing \"manifold\"");

    ProblemFile pf{manifold_from_json(j.at("manifold").dump())};

    if (j.contains("measure"))
        pf.measure = measure_from_json(j.at("measure").dump());
    else if (need_measure)
        throw invalid_input("problem file: missing \"measure\"");

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        pf.algorithm = s.value("algorithm", "");
        pf.p = s.value("p", pf.algorithm == "median-flow" ? 1.0 : 2.0);
        if (s.contains("x0")) pf.x0 = json_vector(s.at("x0"));
        pf.tol = s.value("tol", pf.tol);
        pf.max_iters = s.value("max_iters", pf.max_iters);
        pf.dt = s.value("dt", pf.dt);
        pf.horizon = s.value("horizon", pf.horizon);
    } else if (need_solver) {
        throw invalid_input("problem file: missing \"solver\"");
    }

    if (j.contains("bounds")) {
        const auto& b = j.at("bounds");
        pf.has_bounds = true;
        pf.curvature.k = b.value("k", 0.0);
        pf.curvature.beta = b.value("beta", 0.0);
        pf.curvature.delta = b.value("delta", 0.0);
        pf.curvature.delta_prime = b.value("delta_prime", 0.0);
        pf.curvature.inj = b.value("inj", std::numeric_limits<double>::infinity());
        if (b.contains("C") && b.at("C").is_string()) {
            if (b.at("C").get<std::string>() != "auto")
                throw invalid_input("bounds: C must be a number or \"auto\"");
            pf.auto_C = true;
        } else {
            pf.curvature.C = b.value("C", 1.0);
        }
        if (b.contains("D") && b.at("D").is_string()) {
            if (b.at("D").get<std::string>() != "auto")
                throw invalid_input("bounds: D must be a number or \"auto\"");
            pf.auto_D = true;
        } else {
            pf.curvature.D = b.value("D", 1.0);
        }
        pf.R = b.value("R", 1.0);
        pf.x0_ball = b.contains("x0_ball") ? json_vector(b.at("x0_ball")) : pf.x0;
    } else if (need_bounds) {
        throw invalid_input("problem file: missing \"bounds\"");
    }

    if (need_solver) {
        if (pf.x0.size() != pf.manifold.dimension())
            throw invalid_input("solver: x0 missing or of wrong dimension");
        if (pf.algorithm == "median-flow") {
            if (pf.p != 1.0) throw invalid_input("median-flow requires p = 1");
        } else if (pf.algorithm == "mean-descent") {
            if (pf.p < 2.0)
                throw invalid_input(
                    "mean-descent requires p >= 2 with atomic measures; use mean-flow");
        } else if (pf.algorithm != "mean-flow" && !pf.algorithm.empty()) {
            throw invalid_input("unknown algorithm \"" + pf.algorithm + "\"");
        }
    }
    return pf;
}

// Resolve "auto" norm-ratio constants over the atoms plus the start point.
void resolve_auto_constants(ProblemFile& pf) {
    if (!pf.auto_C && !pf.auto_D) return;
    std::vector<Vector> region;
    if (pf.x0.size() == pf.manifold.dimension()) region.push_back(pf.x0);
    if (pf.measure)
        for (const Atom& a : pf.measure->atoms()) region.push_back(a.point);
    if (region.empty()) throw invalid_input("bounds: \"auto\" constants need a measure or x0");
    const auto cd = pf.manifold.norm_ratio_constants(region);
    if (pf.auto_C) pf.curvature.C = cd.C;
    if (pf.auto_D) pf.curvature.D = cd.D;
}

void emit_report(const solvers::SolverReport& rep, bool trace, const std::string& csv_path) {
    std::cout << solver_report_to_json(rep, trace) << "\n";
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) throw invalid_input("cannot write CSV file " + csv_path);
        out << solver_report_to_csv(rep);
    }
}

int run_mean(const std::string& file, bool trace, std::optional<double> tol_override,
             const std::string& csv_path) {
    ProblemFile pf = load_problem(file, true, true, false);
    if (pf.algorithm.empty()) pf.algorithm = "mean-descent";
    if (pf.algorithm == "median-flow")
        throw invalid_input("problem file requests median-flow; use the median subcommand");
    if (tol_override) pf.tol = *tol_override;

    solvers::SolverReport rep;
    if (pf.algorithm == "mean-descent") {
        if (!pf.has_bounds)
            throw invalid_input("mean-descent needs a \"bounds\" section (R, curvature data)");
        resolve_auto_constants(pf);
        bounds::MeanProblemBounds mp;
        mp.p = pf.p;
        mp.curvature = pf.curvature;
        mp.R = pf.R;
        mp.x0 = pf.x0_ball.size() == pf.manifold.dimension() ? pf.x0_ball : pf.x0;
        solvers::DescentOptions opts;
        opts.grad_tolerance = pf.tol;
        opts.max_iterations = pf.max_iters;
        rep = solvers::mean_gradient_descent(pf.manifold, *pf.measure, pf.p, pf.x0, mp, opts);
    } else {
        solvers::FlowOptions opts;
        opts.grad_tolerance = pf.tol;
        opts.max_iterations = pf.max_iters;
        opts.dt = pf.dt;
        opts.horizon = pf.horizon;
        rep = solvers::mean_gradient_flow(pf.manifold, *pf.measure, pf.p, pf.x0, opts);
    }
    emit_report(rep, trace, csv_path);
    return kExitOk;
}

int run_median(const std::string& file, bool trace, const std::string& csv_path) {
    ProblemFile pf = load_problem(file, true, true, false);
    if (!pf.algorithm.empty() && pf.algorithm != "median-flow")
        throw invalid_input("problem file requests " + pf.algorithm +
                            "; use the mean subcommand");
    solvers::FlowOptions opts;
    opts.grad_tolerance = pf.tol;
    opts.max_iterations = pf.max_iters;
    opts.dt = pf.dt;
    opts.horizon = pf.horizon;
    emit_report(solvers::median_flow(pf.manifold, *pf.measure, pf.x0, opts), trace, csv_path);
    return kExitOk;
}

int run_distance(const std::string& file, const std::string& from, const std::string& to) {
    ProblemFile pf = load_problem(file, false, false, false);
    const Vector a = parse_coords(from);
    const Vector b = parse_coords(to);
    ordered_json out;
    out["forward"] = pf.manifold.distance(a, b);
    out["backward"] = pf.manifold.distance(b, a);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int run_geodesic(const std::string& file, const std::string& from, const std::string& velocity,
                 int steps) {
    ProblemFile pf = load_problem(file, false, false, false);
    const Vector x = parse_coords(from);
    const Vector v = parse_coords(velocity);
    const auto sol = pf.manifold.exp_map(x, v, steps);
    ordered_json out;
    out["from"] = vector_json(x);
    out["velocity"] = vector_json(v);
    out["steps"] = sol.steps;
    out["speed_drift"] = sol.speed_drift;
    ordered_json rows = ordered_json::array();
    for (const auto& s : sol.trajectory) {
        ordered_json row;
        row["t"] = s.t;
        row["point"] = vector_json(s.point);
        row["velocity"] = vector_json(s.velocity);
        rows.push_back(std::move(row));
    }
    out["trajectory"] = std::move(rows);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

ordered_json finite_or_string(double v) {
    if (std::isinf(v)) return "infinity";
    return v;
}

int run_diagnose(const std::string& file) {
    ProblemFile pf = load_problem(file, true, true, true);
    resolve_auto_constants(pf);
    pf.curvature.validate();
    const auto& cb = pf.curvature;
    const Vector center = pf.x0_ball.size() == pf.manifold.dimension() ? pf.x0_ball : pf.x0;
    if (center.size() != pf.manifold.dimension())
        throw invalid_input("diagnose: needs x0 or x0_ball");

    const double p = pf.p > 1.0 ? pf.p : 2.0;
    const double r_unique = bounds::uniqueness_radius(p, cb.k, cb.delta, cb.C);
    const double exist = bounds::existence_ball(cb.C, pf.R);

    ordered_json out;
    out["R_unique"] = finite_or_string(r_unique);
    out["existence_radius"] = exist;

    try {
        out["C_H"] = bounds::step_constant_CH(pf.manifold, *pf.measure, p, cb, center, exist);
    } catch (const singular_majorant&) {
        out["C_H"] = "unbounded";
    }

    // small deterministic region: the ball center plus axis points at half
    // the existence radius
    std::vector<Vector> region{center};
    for (int d = 0; d < pf.manifold.dimension(); ++d) {
        Vector e = Vector::Zero(pf.manifold.dimension());
        e(d) = 0.5 * exist;
        if (pf.manifold.domain().contains(center + e)) region.push_back(center + e);
        if (pf.manifold.domain().contains(center - e)) region.push_back(center - e);
    }
    out["eta_minus_delta"] =
        bounds::median_convexity_margin(pf.manifold, *pf.measure, region, cb.k, cb.delta);

    out["support_condition_eq51"] = bounds::support_condition(p, cb.k, cb.delta, cb.C, pf.R);
    // both injectivity requirements, stated as given (one scales with the
    // radius formula, the other does not)
    out["inj_exceeds_R_unique"] = cb.inj > r_unique;
    out["inj_exceeds_C2_plus_C_plus_1"] = cb.inj > cb.C * cb.C + cb.C + 1.0;
    out["C"] = cb.C;
    out["D"] = cb.D;

    // second-variation sanity check of the supplied curvature data
    int checked = 0, within = 0;
    const auto dirs = sampling::unit_directions(pf.manifold.dimension(), 4);
    for (const Atom& a : pf.measure->atoms()) {
        if (pf.manifold.distance(center, a.point) <= 0.0) continue;
        for (const auto& d : dirs) {
            try {
                const auto diag = pf.manifold.second_variation_diag(center, a.point, d, p, cb);
                ++checked;
                if (diag.within_bounds) ++within;
            } catch (const std::exception&) {
                // skip configurations the comparison formulas do not cover
            }
        }
        if (checked >= 32) break;
    }
    ordered_json sv;
    sv["checked"] = checked;
    sv["within_bounds"] = within;
    out["second_variation"] = std::move(sv);

    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward p-means and medians of weighted point sets on Finsler manifolds"};
    app.require_subcommand(1);

    std::string file, from, to, velocity, csv_path;
    bool trace = false;
    std::optional<double> tol_override;
    int steps = Manifold::kDefaultSteps;

    auto* mean = app.add_subcommand("mean", "compute the p-mean of the problem's measure");
    mean->add_option("file", file)->required();
    mean->add_flag("--trace", trace, "include the iterate trace in the JSON report");
    mean->add_option("--tol", tol_override, "override the gradient tolerance");
    mean->add_option("--csv", csv_path, "write the iterate trace as CSV");

    auto* median = app.add_subcommand("median", "compute the median of the problem's measure");
    median->add_option("file", file)->required();
    median->add_flag("--trace", trace, "include the iterate trace in the JSON report");
    median->add_option("--csv", csv_path, "write the iterate trace as CSV");

    auto* distance = app.add_subcommand("distance", "forward and backward distances");
    distance->add_option("file", file)->required();
    distance->add_option("--from", from)->required();
    distance->add_option("--to", to)->required();

    auto* geodesic = app.add_subcommand("geodesic", "integrate a geodesic and print it");
    geodesic->add_option("file", file)->required();
    geodesic->add_option("--from", from)->required();
    geodesic->add_option("--velocity", velocity)->required();
    geodesic->add_option("--steps", steps);

    auto* diagnose = app.add_subcommand("diagnose", "existence/uniqueness/step diagnostics");
    diagnose->add_option("file", file)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (app.got_subcommand(mean)) return run_mean(file, trace, tol_override, csv_path);
        if (app.got_subcommand(median)) return run_median(file, trace, csv_path);
        if (app.got_subcommand(distance)) return run_distance(file, from, to);
        if (app.got_subcommand(geodesic)) return run_geodesic(file, from, velocity, steps);
        if (app.got_subcommand(diagnose)) return run_diagnose(file);
    } catch (const invalid_input& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitInput;
}
