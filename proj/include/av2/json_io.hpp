#pragma once

#include <string>

#include <json.hpp>

#include "av2/qdiff.hpp"
#include "av2/render.hpp"
#include "av2/thurston.hpp"

namespace av2 {

using json = nlohmann::json;

// complex <-> [re, im]; sphere points <-> [re, im] or the string "inf"
json complex_to_json(cx v);
cx complex_from_json(const json& j);
json point_to_json(const SpherePoint& p);
SpherePoint point_from_json(const json& j);

json params_to_json(const Av2Params& p);
Av2Params params_from_json(const json& j);

json portrait_to_json(const OrbitPortrait& p);
/// Strict: unknown fields are rejected.
OrbitPortrait portrait_from_json(const json& j);

json config_to_json(const MarkedConfiguration& c);
MarkedConfiguration config_from_json(const json& j);

json quaddiff_to_json(const QuadDiff& qd);
QuadDiff quaddiff_from_json(const json& j);

RenderSpec render_spec_from_json(const json& j);

/// CSV with columns n, alpha_re, alpha_im, beta_re, beta_im, eta,
/// eta_residual, min_sep, max_disp, systole_upper (one row per iteration).
std::string trace_csv(const SolveReport& report);

/// One configuration per line, including the initial one.
std::string trace_jsonl(const SolveReport& report);

/// Writes via a temp file + rename so failures leave no partial output.
void atomic_write_file(const std::string& path, const std::string& bytes);

/// Shortest decimal round-trip formatting used in all text outputs.
std::string format_double(double v);

}  // namespace av2
