#include "plstomo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace plstomo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& path, int line, const std::string& key,
                            const std::string& value, const char* expected) {
    throw ConfigError(path + ":" + std::to_string(line) + ": key '" + key + "' expects " +
                      expected + ", got '" + value + "'");
}

double to_double(const std::string& path, int line, const std::string& key,
                 const std::string& value) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v))
        bad_value(path, line, key, value, "a finite number");
    return v;
}

int to_int(const std::string& path, int line, const std::string& key, const std::string& value) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        bad_value(path, line, key, value, "an integer");
    return v;
}

unsigned long long to_ull(const std::string& path, int line, const std::string& key,
                          const std::string& value) {
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size())
        bad_value(path, line, key, value, "a non-negative integer");
    return v;
}

std::vector<double> to_double_list(const std::string& path, int line, const std::string& key,
                                   const std::string& value) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        std::size_t comma = value.find(',', start);
        if (comma == std::string::npos) comma = value.size();
        const std::string field = trim(value.substr(start, comma - start));
        if (field.empty()) bad_value(path, line, key, value, "a comma-separated number list");
        out.push_back(to_double(path, line, key, field));
        start = comma + 1;
    }
    return out;
}

void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };

    if (cfg.nx < 1 || cfg.ny < 1) fail("grid.nx and grid.ny must be >= 1");
    if (!(cfg.pixel_size > 0.0)) fail("grid.pixel_size must be > 0");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (cfg.explicit_angles) {
        const auto& a = *cfg.explicit_angles;
        if (a.empty()) fail("geom.angles must be non-empty");
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (!(a[k] >= 0.0 && a[k] < two_pi)) fail("geom.angles must lie in [0, 2*pi)");
            if (k > 0 && !(a[k] > a[k - 1])) fail("geom.angles must be strictly increasing");
        }
    } else {
        if (cfg.n_angles < 1) fail("geom.n_angles must be >= 1");
        if (!(cfg.range_end > cfg.range_start)) fail("geom.range_end must exceed geom.range_start");
    }
    if (cfg.n_det && *cfg.n_det < 1) fail("geom.n_det must be >= 1");
    if (cfg.det_spacing && !(*cfg.det_spacing > 0.0)) fail("geom.det_spacing must be > 0");

    if (cfg.center_spacing < 1) fail("dict.center_spacing must be >= 1");
    if (cfg.sigma && !(*cfg.sigma > 0.0)) fail("dict.sigma must be > 0");
    if (cfg.beta_override && !(*cfg.beta_override > 0.0)) fail("dict.beta must be > 0");

    if (!(cfg.eps > 0.0)) fail("heaviside.eps must be > 0");

    if (cfg.max_iters < 0) fail("solver.max_iters must be >= 0");
    if (cfg.grad_tol && !(*cfg.grad_tol > 0.0)) fail("solver.grad_tol must be > 0");
    if (!(cfg.rel_obj_tol > 0.0)) fail("solver.rel_obj_tol must be > 0");
    if (!(cfg.lm_damping_init > 0.0)) fail("solver.lm_damping_init must be > 0");
    if (!(cfg.armijo_c > 0.0)) fail("solver.armijo_c must be > 0");
    if (!(cfg.armijo_shrink > 0.0 && cfg.armijo_shrink < 1.0))
        fail("solver.armijo_shrink must lie in (0,1)");
    if (cfg.max_backtracks < 0) fail("solver.max_backtracks must be >= 0");
    if (cfg.u_in == cfg.u_ex) fail("solver.u_in must differ from solver.u_ex");

    if (!cfg.init_spec.empty()) {
        const std::size_t colon = cfg.init_spec.find(':');
        const std::string kind = cfg.init_spec.substr(0, colon);
        if (colon == std::string::npos || (kind != "circle" && kind != "constant" && kind != "mask"))
            fail("solver.init must be circle:R, constant:V, or mask:PATH");
        const std::string arg = cfg.init_spec.substr(colon + 1);
        if (arg.empty()) fail("solver.init is missing its argument");
        if (kind == "circle" || kind == "constant") {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
            if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(v))
                fail("solver.init argument must be a finite number");
            if (kind == "circle" && !(v > 0.0)) fail("solver.init circle radius must be > 0");
        }
    }

    if (!cfg.phantom_kind.empty()) {
        config_phantom(cfg); // runs the per-kind validation
    } else if (!cfg.phantom_params.empty()) {
        fail("phantom.params given without phantom.kind");
    }

    if (!(cfg.noise_sigma >= 0.0)) fail("noise.sigma must be >= 0");
    if (cfg.baseline_iterations < 1) fail("baseline.iterations must be >= 1");
    if (!(cfg.baseline_relaxation > 0.0 && cfg.baseline_relaxation < 2.0))
        fail("baseline.relaxation must lie in (0, 2)");
    if (cfg.output_dir.empty()) fail("output_dir must be non-empty");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& path) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key");

        if (key == "experiment.name") cfg.experiment_name = value;
        else if (key == "grid.nx") cfg.nx = to_int(path, line_no, key, value);
        else if (key == "grid.ny") cfg.ny = to_int(path, line_no, key, value);
        else if (key == "grid.pixel_size") cfg.pixel_size = to_double(path, line_no, key, value);
        else if (key == "geom.angles") cfg.explicit_angles = to_double_list(path, line_no, key, value);
        else if (key == "geom.n_angles") cfg.n_angles = to_int(path, line_no, key, value);
        else if (key == "geom.range_start") cfg.range_start = to_double(path, line_no, key, value);
        else if (key == "geom.range_end") cfg.range_end = to_double(path, line_no, key, value);
        else if (key == "geom.n_det") cfg.n_det = to_int(path, line_no, key, value);
        else if (key == "geom.det_spacing") cfg.det_spacing = to_double(path, line_no, key, value);
        else if (key == "dict.center_spacing") cfg.center_spacing = to_int(path, line_no, key, value);
        else if (key == "dict.sigma") cfg.sigma = to_double(path, line_no, key, value);
        else if (key == "dict.beta") cfg.beta_override = to_double(path, line_no, key, value);
        else if (key == "heaviside.eps") cfg.eps = to_double(path, line_no, key, value);
        else if (key == "solver.max_iters") cfg.max_iters = to_int(path, line_no, key, value);
        else if (key == "solver.grad_tol") cfg.grad_tol = to_double(path, line_no, key, value);
        else if (key == "solver.rel_obj_tol") cfg.rel_obj_tol = to_double(path, line_no, key, value);
        else if (key == "solver.lm_damping_init") cfg.lm_damping_init = to_double(path, line_no, key, value);
        else if (key == "solver.armijo_c") cfg.armijo_c = to_double(path, line_no, key, value);
        else if (key == "solver.armijo_shrink") cfg.armijo_shrink = to_double(path, line_no, key, value);
        else if (key == "solver.max_backtracks") cfg.max_backtracks = to_int(path, line_no, key, value);
        else if (key == "solver.init") cfg.init_spec = value;
        else if (key == "solver.u_in") cfg.u_in = to_double(path, line_no, key, value);
        else if (key == "solver.u_ex") cfg.u_ex = to_double(path, line_no, key, value);
        else if (key == "phantom.kind") cfg.phantom_kind = value;
        else if (key == "phantom.params") cfg.phantom_params = to_double_list(path, line_no, key, value);
        else if (key == "noise.sigma") cfg.noise_sigma = to_double(path, line_no, key, value);
        else if (key == "seed") cfg.seed = to_ull(path, line_no, key, value);
        else if (key == "baseline.iterations") cfg.baseline_iterations = to_int(path, line_no, key, value);
        else if (key == "baseline.relaxation") cfg.baseline_relaxation = to_double(path, line_no, key, value);
        else if (key == "output_dir") cfg.output_dir = value;
        else
            throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }

    validate(cfg);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

ImageGrid config_grid(const ExperimentConfig& cfg) {
    return make_grid(cfg.nx, cfg.ny, cfg.pixel_size);
}

ScanGeometry config_geometry(const ExperimentConfig& cfg) {
    const ImageGrid grid = config_grid(cfg);
    std::vector<double> angles =
        cfg.explicit_angles ? *cfg.explicit_angles
                            : uniform_angles(cfg.n_angles, cfg.range_start, cfg.range_end);
    const int n_det = cfg.n_det.value_or(default_detector_count(grid));
    const double spacing = cfg.det_spacing.value_or(cfg.pixel_size);
    return make_geometry(std::move(angles), n_det, spacing);
}

RbfDictionary config_dictionary(const ExperimentConfig& cfg, const ImageGrid& grid) {
    const double sigma = cfg.sigma.value_or(1.5 * cfg.center_spacing * cfg.pixel_size);
    return make_dictionary(grid, cfg.center_spacing, sigma, cfg.beta_override);
}

SolverOptions config_solver_options(const ExperimentConfig& cfg) {
    SolverOptions opts;
    opts.max_iters = cfg.max_iters;
    opts.grad_tol = cfg.grad_tol;
    opts.rel_obj_tol = cfg.rel_obj_tol;
    opts.lm_damping_init = cfg.lm_damping_init;
    opts.line_search.c = cfg.armijo_c;
    opts.line_search.shrink = cfg.armijo_shrink;
    opts.line_search.max_backtracks = cfg.max_backtracks;
    opts.u_in = cfg.u_in;
    opts.u_ex = cfg.u_ex;
    opts.eps = cfg.eps;

    // mask:PATH is resolved by the command layer, which owns file access.
    if (!cfg.init_spec.empty()) {
        const std::size_t colon = cfg.init_spec.find(':');
        const std::string kind = cfg.init_spec.substr(0, colon);
        const std::string arg = cfg.init_spec.substr(colon + 1);
        if (kind == "circle") opts.init = InitSeed::centered_circle(std::stod(arg));
        else if (kind == "constant") opts.init = InitSeed::constant(std::stod(arg));
    }
    return opts;
}

PhantomSpec config_phantom(const ExperimentConfig& cfg) {
    const std::string& kind = cfg.phantom_kind;
    const std::vector<double>& p = cfg.phantom_params;
    if (kind == "disk") {
        if (p.size() != 3) throw ConfigError("phantom.params: disk expects cx,cy,r");
        return PhantomSpec::disk(p[0], p[1], p[2]);
    }
    if (kind == "two-disks") {
        if (p.empty()) return PhantomSpec::two_disks();
        if (p.size() != 6)
            throw ConfigError("phantom.params: two-disks expects cx1,cy1,r1,cx2,cy2,r2");
        return PhantomSpec::two_disks({p[0], p[1], p[2]}, {p[3], p[4], p[5]});
    }
    if (kind == "annulus") {
        if (p.size() != 2) throw ConfigError("phantom.params: annulus expects r_in,r_out");
        return PhantomSpec::annulus(p[0], p[1]);
    }
    if (kind == "blob-union") {
        if (p.empty() || p.size() % 3 != 0)
            throw ConfigError("phantom.params: blob-union expects cx,cy,r triplets");
        std::vector<Disk> disks;
        for (std::size_t k = 0; k < p.size(); k += 3) disks.push_back({p[k], p[k + 1], p[k + 2]});
        return PhantomSpec::blob_union(std::move(disks));
    }
    throw ConfigError("phantom.kind: unknown kind '" + kind + "'");
}

double config_angle_range(const ExperimentConfig& cfg) {
    if (cfg.explicit_angles) {
        const auto& a = *cfg.explicit_angles;
        return a.back() - a.front();
    }
    return cfg.range_end - cfg.range_start;
}

std::string dump_effective_config(const ExperimentConfig& cfg) {
    const ImageGrid grid = config_grid(cfg);
    const ScanGeometry geom = config_geometry(cfg);
    const double sigma = cfg.sigma.value_or(1.5 * cfg.center_spacing * cfg.pixel_size);
    const double beta = cfg.beta_override.value_or(1.0 / (std::numbers::sqrt2 * sigma));
    const double grad_tol = cfg.grad_tol.value_or(1e-6 * geom.measurement_count());
    std::string init = cfg.init_spec;
    if (init.empty())
        init = "circle:" + fmt(0.3 * std::min(grid.extent_x(), grid.extent_y()));

    std::string out;
    out += "experiment.name = " + cfg.experiment_name + "\n";
    out += "grid.nx = " + std::to_string(cfg.nx) + "\n";
    out += "grid.ny = " + std::to_string(cfg.ny) + "\n";
    out += "grid.pixel_size = " + fmt(cfg.pixel_size) + "\n";
    out += "geom.angles = ";
    for (std::size_t k = 0; k < geom.angles.size(); ++k)
        out += (k ? "," : "") + fmt(geom.angles[k]);
    out += "\n";
    out += "geom.n_det = " + std::to_string(geom.n_det) + "\n";
    out += "geom.det_spacing = " + fmt(geom.det_spacing) + "\n";
    out += "dict.center_spacing = " + std::to_string(cfg.center_spacing) + "\n";
    out += "dict.sigma = " + fmt(sigma) + "\n";
    out += "dict.beta = " + fmt(beta) + "\n";
    out += "heaviside.eps = " + fmt(cfg.eps) + "\n";
    out += "solver.max_iters = " + std::to_string(cfg.max_iters) + "\n";
    out += "solver.grad_tol = " + fmt(grad_tol) + "\n";
    out += "solver.rel_obj_tol = " + fmt(cfg.rel_obj_tol) + "\n";
    out += "solver.lm_damping_init = " + fmt(cfg.lm_damping_init) + "\n";
    out += "solver.armijo_c = " + fmt(cfg.armijo_c) + "\n";
    out += "solver.armijo_shrink = " + fmt(cfg.armijo_shrink) + "\n";
    out += "solver.max_backtracks = " + std::to_string(cfg.max_backtracks) + "\n";
    out += "solver.init = " + init + "\n";
    out += "solver.u_in = " + fmt(cfg.u_in) + "\n";
    out += "solver.u_ex = " + fmt(cfg.u_ex) + "\n";
    if (!cfg.phantom_kind.empty()) {
        out += "phantom.kind = " + cfg.phantom_kind + "\n";
        std::vector<double> params = cfg.phantom_params;
        if (cfg.phantom_kind == "two-disks" && params.empty()) {
            for (const Disk& d : default_two_disks(grid)) {
                params.push_back(d.cx);
                params.push_back(d.cy);
                params.push_back(d.r);
            }
        }
        if (!params.empty()) {
            out += "phantom.params = ";
            for (std::size_t k = 0; k < params.size(); ++k) out += (k ? "," : "") + fmt(params[k]);
            out += "\n";
        }
    }
    out += "noise.sigma = " + fmt(cfg.noise_sigma) + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "baseline.iterations = " + std::to_string(cfg.baseline_iterations) + "\n";
    out += "baseline.relaxation = " + fmt(cfg.baseline_relaxation) + "\n";
    out += "output_dir = " + cfg.output_dir + "\n";
    return out;
}

} // namespace plstomo
