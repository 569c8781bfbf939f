#pragma once

#include <string>

#include "finsler/manifold.hpp"
#include "finsler/measure.hpp"
#include "finsler/norm.hpp"
#include "finsler/solvers.hpp"

namespace finsler {

/// Norm spec from a JSON object:
///   {"kind":"euclidean","metric":[[...]]}
///   {"kind":"randers","metric":[[...]],"drift":[...]}
MinkowskiNorm norm_from_json(const std::string& json_text);

/// Manifold spec from a JSON object:
///   {"kind":"flat","norm":{...}}
///   {"kind":"riemannian","metric":"poincare-disk"}
///   {"kind":"randers-field","metric":[[...]],"drift_field":"constant","drift":[...]}
Manifold manifold_from_json(const std::string& json_text);

/// Measure from a JSON object: {"atoms":[{"point":[...],"weight":0.25},...]}
WeightedMeasure measure_from_json(const std::string& json_text);

/// Serialized solver report; includes the full iterate trace when requested.
std::string solver_report_to_json(const solvers::SolverReport& report, bool include_trace);

/// Iterate trace as CSV rows: iteration, point coordinates, objective,
/// gradient dual norm.
std::string solver_report_to_csv(const solvers::SolverReport& report);

} // namespace finsler
