#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "av2/json_io.hpp"

namespace {

using av2::cx;
using av2::json;

json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw av2::InvalidInput("cannot read " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw av2::InvalidInput(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return j;
}

cx parse_complex_arg(const std::string& s) {
    // "re,im" or a bare real
    const auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw av2::InvalidInput("cannot parse complex value '" + s + "' (expected re,im)");
    }
}

int resolve_threads(int flag_threads) {
    int n = flag_threads;
    if (const char* env = std::getenv("AV2_THREADS")) {
        try {
            n = std::stoi(env);
        } catch (const std::exception&) {
            throw av2::InvalidInput("AV2_THREADS is not an integer");
        }
    }
    if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
    return std::clamp(n, 1, 64);
}

const char* orbit_status_name(av2::OrbitStatus s) {
    switch (s) {
        case av2::OrbitStatus::preperiodic: return "preperiodic";
        case av2::OrbitStatus::terminated_at_infinity: return "terminated_at_infinity";
        case av2::OrbitStatus::escaped: return "escaped";
        case av2::OrbitStatus::undecided: return "undecided";
    }
    return "undecided";
}

int cmd_solve(const std::string& portrait_file, double tol, int max_iter, const std::string& init,
              const std::string& trace_out, std::uint64_t seed) {
    av2::OrbitPortrait portrait;
    try {
        portrait = av2::portrait_from_json(read_json_file(portrait_file));
    } catch (const av2::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (const auto violations = av2::validate(portrait); !violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "violation: " << (v.label.empty() ? "" : v.label + ": ") << v.rule << "\n";
        return 1;
    }

    av2::SolveOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    av2::SolveReport report;
    try {
        av2::MarkedConfiguration start;
        if (init == "auto") {
            start = av2::auto_configuration(portrait);
        } else if (init == "random") {
            std::mt19937_64 rng(seed);
            start = av2::random_configuration(portrait, rng);
        } else {
            start = av2::config_from_json(read_json_file(init));
        }
        report = av2::solve(portrait, start, opts);
    } catch (const av2::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    if (!trace_out.empty()) {
        av2::atomic_write_file(trace_out + ".csv", av2::trace_csv(report));
        av2::atomic_write_file(trace_out + ".jsonl", av2::trace_jsonl(report));
    }

    switch (report.outcome) {
        case av2::SolveOutcome::converged: {
            std::cout << av2::params_to_json(*report.params).dump() << "\n";
            return 0;
        }
        case av2::SolveOutcome::degenerate: {
            json out{{"degenerate", report.reason}, {"n_steps", report.n_steps}};
            std::cout << out.dump() << "\n";
            return 2;
        }
        case av2::SolveOutcome::max_iterations: {
            json out{{"max_iterations", report.n_steps}};
            std::cout << out.dump() << "\n";
            return 3;
        }
    }
    return 1;
}

int cmd_orbit(const std::string& params_arg, const std::string& start_arg, int n, double tol) {
    av2::Av2Params params;
    try {
        params = av2::params_from_json(json::parse(params_arg));
        av2::OrbitOptions opts;
        opts.n_max = n;
        opts.tol = tol;
        const av2::OrbitResult r =
            av2::forward_orbit(params, av2::SpherePoint(parse_complex_arg(start_arg)), opts);
        json points = json::array();
        for (const auto& p : r.points) points.push_back(av2::point_to_json(p));
        json out{{"status", orbit_status_name(r.status)}, {"points", points}};
        if (r.status == av2::OrbitStatus::preperiodic) {
            out["preperiod"] = r.preperiod;
            out["period"] = r.period;
            out["residual"] = r.residual;
        }
        std::cout << out.dump() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_check(const std::string& params_arg, bool schwarzian, bool roundtrip, int samples,
              std::uint64_t seed) {
    av2::Av2Params params;
    try {
        params = av2::params_from_json(json::parse(params_arg));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (!schwarzian && !roundtrip) schwarzian = roundtrip = true;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-2.5, 2.5);
    std::uniform_int_distribution<int> branch(-5, 5);
    json out;
    bool pass = true;

    if (schwarzian) {
        double worst = 0.0;
        int used = 0;
        while (used < samples) {
            const cx s(box(rng), box(rng));
            const cx z = s / params.beta;  // keeps Re(beta z) moderate
            if (av2::pole_distance(params, z) < 0.25) continue;
            worst = std::max(worst, av2::schwarzian_residual(params, z));
            ++used;
        }
        out["schwarzian_max_residual"] = worst;
        pass = pass && worst < 1e-5;
    }
    if (roundtrip) {
        double worst = 0.0;
        const av2::SpherePoint lam = params.lambda();
        for (int i = 0; i < samples; ++i) {
            cx w(box(rng), box(rng));
            if (std::abs(w) < 1e-3) w += cx(1.0);
            if (lam.is_finite() && std::abs(w - lam.value()) < 1e-3) w += cx(0.5, 0.5);
            const int k = branch(rng);
            const cx z = av2::inverse(params, av2::SpherePoint(w), k);
            const av2::SpherePoint back = av2::eval(params, av2::SpherePoint(z));
            if (back.is_finite()) worst = std::max(worst, std::abs(back.value() - w));
        }
        out["inverse_roundtrip_max_error"] = worst;
        pass = pass && worst < 1e-10;
    }
    out["pass"] = pass;
    std::cout << out.dump() << "\n";
    return pass ? 0 : 1;
}

int cmd_transfer(const std::string& config_file, int basis_index, int K, double quad_tol) {
    try {
        const json j = read_json_file(config_file);
        if (!j.is_object() || !j.contains("params") || !j.contains("positions"))
            throw av2::InvalidInput("transfer input needs 'params' and 'positions'");
        const av2::Av2Params params = av2::params_from_json(j.at("params"));
        std::vector<cx> poles;
        for (const auto& [label, pos] : j.at("positions").items()) {
            const av2::SpherePoint p = av2::point_from_json(pos);
            if (p.is_finite()) poles.push_back(p.value());
        }
        av2::QuadOptions qopts;
        qopts.rel_tol = quad_tol;
        const int dim = static_cast<int>(poles.size()) - 2;
        if (dim < 1) throw av2::InvalidInput("transfer: need at least 4 marked points");
        json rows = json::array();
        for (int b = 0; b < dim; ++b) {
            if (basis_index >= 0 && b != basis_index) continue;
            const av2::QuadDiff qd = av2::basis_qd(poles, b);
            const double nq = av2::l1_norm(qd, qopts);
            const double ratio = av2::contraction_ratio(params, qd, K, qopts);
            rows.push_back(json{{"basis", b}, {"norm", nq}, {"ratio", ratio}});
        }
        std::cout << json{{"ratios", rows}}.dump() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_render(const std::string& spec_file, const std::string& out_path, int threads) {
    try {
        const av2::RenderSpec spec = av2::render_spec_from_json(read_json_file(spec_file));
        const auto rgb = av2::render(spec, resolve_threads(threads));
        av2::atomic_write_file(out_path, av2::ppm_encode(rgb, spec.px_w, spec.px_h));
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"post-singularly finite maps with two asymptotic values: solver and tools"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "solve a portrait for (alpha, beta)");
    std::string portrait_file, init = "auto", trace_out;
    double tol = 1e-11;
    int max_iter = 200;
    std::uint64_t seed = 1;
    solve->add_option("portrait", portrait_file, "portrait JSON file")->required();
    solve->add_option("--tol", tol, "convergence displacement tolerance")->capture_default_str();
    solve->add_option("--max-iter", max_iter, "iteration limit")->capture_default_str();
    solve->add_option("--init", init, "auto | random | configuration JSON file")
        ->capture_default_str();
    solve->add_option("--trace-out", trace_out, "prefix for trace CSV/JSONL files");
    solve->add_option("--seed", seed, "seed for --init random")->capture_default_str();

    auto* orbit = app.add_subcommand("orbit", "forward orbit of a point");
    std::string params_arg, start_arg = "0";
    int n = 256;
    double otol = 1e-9;
    orbit->add_option("params", params_arg, "params JSON, e.g. {\"alpha\":[1,0],\"beta\":[0,6.28]}")
        ->required();
    orbit->add_option("--start", start_arg, "starting point re,im")->capture_default_str();
    orbit->add_option("--n", n, "maximum iterations")->capture_default_str();
    orbit->add_option("--tol", otol, "recurrence tolerance")->capture_default_str();

    auto* check = app.add_subcommand("check", "identity checks for a family member");
    std::string cparams;
    bool schw = false, rt = false;
    int samples = 200;
    std::uint64_t cseed = 1;
    check->add_option("params", cparams, "params JSON")->required();
    check->add_flag("--schwarzian", schw, "Schwarzian residual sweep");
    check->add_flag("--inverse-roundtrip", rt, "inverse branch round-trip sweep");
    check->add_option("--samples", samples, "sweep size")->capture_default_str();
    check->add_option("--seed", cseed, "sweep seed")->capture_default_str();

    auto* transfer = app.add_subcommand("transfer", "transfer-operator contraction ratios");
    std::string config_file;
    int basis_index = -1, K = 64;
    double quad_tol = 1e-2;
    transfer->add_option("config", config_file, "JSON with params and marked positions")->required();
    transfer->add_option("--basis-index", basis_index, "restrict to one basis differential")
        ->capture_default_str();
    transfer->add_option("--K", K, "preimage truncation")->capture_default_str();
    transfer->add_option("--quad-tol", quad_tol, "quadrature relative tolerance")
        ->capture_default_str();

    auto* render = app.add_subcommand("render", "parameter-plane image (binary PPM)");
    std::string spec_file, out_path;
    int threads = 0;
    render->add_option("spec", spec_file, "render spec JSON")->required();
    render->add_option("out", out_path, "output .ppm path")->required();
    render->add_option("--threads", threads, "worker threads (0 = auto, AV2_THREADS overrides)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(portrait_file, tol, max_iter, init, trace_out, seed);
        if (orbit->parsed()) return cmd_orbit(params_arg, start_arg, n, otol);
        if (check->parsed()) return cmd_check(cparams, schw, rt, samples, cseed);
        if (transfer->parsed()) return cmd_transfer(config_file, basis_index, K, quad_tol);
        if (render->parsed()) return cmd_render(spec_file, out_path, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
