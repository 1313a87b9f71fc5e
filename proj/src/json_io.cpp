#include "av2/json_io.hpp"

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <set>

namespace av2 {

namespace {

void require_fields(const json& j, const std::set<std::string>& allowed,
                    const std::set<std::string>& required, const std::string& what) {
    if (!j.is_object()) throw InvalidInput(what + ": expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw InvalidInput(what + ": unknown field '" + key + "'");
    for (const auto& key : required)
        if (!j.contains(key)) throw InvalidInput(what + ": missing field '" + key + "'");
}

}  // namespace

json complex_to_json(cx v) { return json::array({v.real(), v.imag()}); }

cx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InvalidInput("complex values must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json point_to_json(const SpherePoint& p) {
    if (p.is_inf()) return json("inf");
    return complex_to_json(p.value());
}

SpherePoint point_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return SpherePoint::infinity();
        throw InvalidInput("sphere points must be [re, im] or \"inf\"");
    }
    return SpherePoint(complex_from_json(j));
}

json params_to_json(const Av2Params& p) {
    return json{{"alpha", complex_to_json(p.alpha)}, {"beta", complex_to_json(p.beta)}};
}

Av2Params params_from_json(const json& j) {
    require_fields(j, {"alpha", "beta"}, {"alpha", "beta"}, "params");
    return {complex_from_json(j.at("alpha")), complex_from_json(j.at("beta"))};
}

json portrait_to_json(const OrbitPortrait& p) {
    json succ = json::object();
    for (const auto& [k, v] : p.successor) succ[k] = v;
    json br = json::object();
    for (const auto& [k, v] : p.branch_index) br[k] = v;
    return json{{"labels", p.labels}, {"successor", succ},    {"branch_index", br},
                {"zero", p.zero},     {"one", p.one},          {"inf", p.inf},
                {"lambda", p.lambda}, {"preperiod", p.preperiod}, {"period", p.period}};
}

OrbitPortrait portrait_from_json(const json& j) {
    const std::set<std::string> fields{"labels", "successor", "branch_index", "zero", "one",
                                       "inf",    "lambda",    "preperiod",    "period"};
    require_fields(j, fields, fields, "portrait");
    OrbitPortrait p;
    if (!j.at("labels").is_array()) throw InvalidInput("portrait: labels must be an array");
    for (const auto& l : j.at("labels")) {
        if (!l.is_string()) throw InvalidInput("portrait: labels must be strings");
        p.labels.push_back(l.get<std::string>());
    }
    if (!j.at("successor").is_object()) throw InvalidInput("portrait: successor must be an object");
    for (const auto& [k, v] : j.at("successor").items()) {
        if (!v.is_string()) throw InvalidInput("portrait: successor values must be labels");
        p.successor[k] = v.get<std::string>();
    }
    if (!j.at("branch_index").is_object())
        throw InvalidInput("portrait: branch_index must be an object");
    for (const auto& [k, v] : j.at("branch_index").items()) {
        if (!v.is_number_integer()) throw InvalidInput("portrait: branch indices must be integers");
        p.branch_index[k] = v.get<int>();
    }
    p.zero = j.at("zero").get<std::string>();
    p.one = j.at("one").get<std::string>();
    p.inf = j.at("inf").get<std::string>();
    p.lambda = j.at("lambda").get<std::string>();
    if (!j.at("preperiod").is_number_integer() || !j.at("period").is_number_integer())
        throw InvalidInput("portrait: preperiod/period must be integers");
    p.preperiod = j.at("preperiod").get<int>();
    p.period = j.at("period").get<int>();
    return p;
}

json config_to_json(const MarkedConfiguration& c) {
    json pos = json::object();
    for (const auto& [l, p] : c.positions) pos[l] = point_to_json(p);
    return json{{"positions", pos}};
}

MarkedConfiguration config_from_json(const json& j) {
    require_fields(j, {"positions"}, {"positions"}, "configuration");
    MarkedConfiguration c;
    for (const auto& [l, p] : j.at("positions").items()) c.positions[l] = point_from_json(p);
    return c;
}

json quaddiff_to_json(const QuadDiff& qd) {
    json poles = json::array(), num = json::array();
    for (const cx& p : qd.poles) poles.push_back(complex_to_json(p));
    for (const cx& q : qd.numerator) num.push_back(complex_to_json(q));
    return json{{"poles", poles}, {"numerator", num}};
}

QuadDiff quaddiff_from_json(const json& j) {
    require_fields(j, {"poles", "numerator"}, {"poles", "numerator"}, "quadratic differential");
    std::vector<cx> poles, num;
    for (const auto& p : j.at("poles")) poles.push_back(complex_from_json(p));
    for (const auto& q : j.at("numerator")) num.push_back(complex_from_json(q));
    return QuadDiff(std::move(poles), std::move(num));
}

RenderSpec render_spec_from_json(const json& j) {
    require_fields(j,
                   {"alpha", "center", "width", "height", "resolution", "max_iter", "escape_radius"},
                   {"alpha", "center", "width", "height", "resolution"}, "render spec");
    RenderSpec s;
    s.alpha = complex_from_json(j.at("alpha"));
    s.center = complex_from_json(j.at("center"));
    s.width = j.at("width").get<double>();
    s.height = j.at("height").get<double>();
    const auto& res = j.at("resolution");
    if (!res.is_array() || res.size() != 2) throw InvalidInput("render spec: resolution is [w, h]");
    s.px_w = res[0].get<int>();
    s.px_h = res[1].get<int>();
    if (j.contains("max_iter")) s.max_iter = j.at("max_iter").get<int>();
    if (j.contains("escape_radius")) s.escape_radius = j.at("escape_radius").get<double>();
    return s;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trace_csv(const SolveReport& report) {
    std::string out = "n,alpha_re,alpha_im,beta_re,beta_im,eta,eta_residual,min_sep,max_disp,systole_upper\n";
    for (const IterationState& s : report.trace) {
        if (!s.fitted) continue;  // the initial state has no fitted parameters
        out += std::to_string(s.n) + ',';
        out += format_double(s.fitted->alpha.real()) + ',';
        out += format_double(s.fitted->alpha.imag()) + ',';
        out += format_double(s.fitted->beta.real()) + ',';
        out += format_double(s.fitted->beta.imag()) + ',';
        out += std::to_string(s.diag.eta) + ',';
        out += format_double(s.diag.eta_residual) + ',';
        out += format_double(s.diag.min_sep) + ',';
        out += format_double(s.diag.max_disp) + ',';
        out += format_double(s.diag.systole_upper) + '\n';
    }
    return out;
}

std::string trace_jsonl(const SolveReport& report) {
    std::string out;
    for (const IterationState& s : report.trace) {
        json line = config_to_json(s.config);
        line["n"] = s.n;
        out += line.dump() + '\n';
    }
    return out;
}

void atomic_write_file(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw InvalidInput("cannot open for writing: " + tmp);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) {
            f.close();
            std::remove(tmp.c_str());
            throw InvalidInput("write failed: " + tmp);
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw InvalidInput("cannot move output into place: " + path);
    }
}

}  // namespace av2
