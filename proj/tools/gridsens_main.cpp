// gridsens: contingency sensitivity analysis for networked linear systems
// with multiplicative link uncertainty.
//
// Subcommands: check, analyze, region, simulate, example.
// Exit codes: 0 success, 1 I/O or parse failure, 2 analysis/validation failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridsens/builtin.hpp"
#include "gridsens/errors.hpp"
#include "gridsens/format.hpp"
#include "gridsens/grid.hpp"
#include "gridsens/sensitivity.hpp"
#include "gridsens/stability.hpp"
#include "gridsens/version.hpp"

namespace {

using namespace gridsens;

bool log_enabled() {
    const char* level = std::getenv("GRIDSENS_LOG");
    return level && (std::string_view(level) == "debug" || std::string_view(level) == "info");
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[gridsens] " << msg << "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file '" + path + "'");
    out << content;
    if (!out) throw ParseError("write failed for '" + path + "'");
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
}

struct Inputs {
    std::string case_path;
    std::string config_path;
    int example = 0;  // 0 = use case/config
};

struct LoadedAnalysis {
    AssembledNetwork net;
    std::string case_name = "(builtin)";
    std::string config_name = "(none)";
    std::string config_hash;
};

LoadedAnalysis load_network(const Inputs& in) {
    LoadedAnalysis out;
    if (in.example != 0) {
        out.net = builtin_example(in.example);
        out.case_name = "example-" + std::to_string(in.example);
        out.config_hash = hex64(fnv1a(""));
        return out;
    }
    if (in.case_path.empty()) {
        throw ParseError("either --case or --example is required");
    }
    GridCase grid_case = parse_matpower(read_file(in.case_path));
    DynamicsConfig config;
    std::string config_bytes;
    if (!in.config_path.empty()) {
        config_bytes = read_file(in.config_path);
        config = parse_dynamics_config(config_bytes);
        out.config_name = in.config_path;
    }
    out.case_name = in.case_path;
    out.config_hash = hex64(fnv1a(config_bytes));
    out.net = build_grid_network(grid_case, config);
    return out;
}

std::vector<double> parse_sigma_list(const std::string& csv) {
    std::vector<double> out;
    std::string token;
    std::istringstream stream(csv);
    while (std::getline(stream, token, ',')) {
        double v = 0.0;
        if (!parse_double(token, v)) {
            throw AnalysisError("invalid sigma value '" + token + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw AnalysisError("--sigma list is empty");
    return out;
}

/// Hard gates for analysis: stable nominal map and non-degenerate links.
/// Observability flags are reported but advisory (a semi-definite Gramian
/// with a healthy injection gain still yields finite indices).
int hard_check(const AssumptionReport& report, std::ostream& os) {
    os << "nominal spectral radius: " << format_double(report.radius) << "\n";
    os << "smallest singular value: " << format_double(report.min_singular) << "\n";
    for (const auto& link : report.links) {
        os << "link " << link.id << ": observable=" << (link.observable ? "yes" : "no")
           << " injection_gain=" << format_double(link.injection_gain) << "\n";
    }
    int failures = 0;
    if (!(report.radius < 1.0)) {
        os << "FAIL: nominal map is not stable (spectral radius >= 1)\n";
        ++failures;
    }
    if (!(report.min_singular > 0.0)) {
        os << "FAIL: nominal map is singular\n";
        ++failures;
    }
    for (const auto& link : report.links) {
        if (!(link.injection_gain > 0.0)) {
            os << "FAIL: link " << link.id << " is degenerate (zero injection gain)\n";
            ++failures;
        }
    }
    return failures;
}

int cmd_check(const Inputs& in) {
    LoadedAnalysis loaded;
    if (in.example == 0 && !in.case_path.empty() && in.config_path.empty()) {
        // No contingencies: report on the bare grid model.
        GridCase grid_case = parse_matpower(read_file(in.case_path));
        DynamicsConfig config;
        ReducedModel model = build_reduced_model(grid_case, config);
        QuotientMap quotient = grid_quotient(model);
        loaded.net = AssembledNetwork{quotient.A.rows(), quotient.A, {}};
        loaded.case_name = in.case_path;
    } else {
        loaded = load_network(in);
    }
    AssumptionReport report = check_assumptions(loaded.net);
    const int failures = hard_check(report, std::cout);
    std::cout << (failures == 0 ? "check: PASS" : "check: FAIL") << "\n";
    return failures == 0 ? 0 : 2;
}

int cmd_analyze(const Inputs& in, const std::string& out_dir) {
    LoadedAnalysis loaded = load_network(in);
    AssumptionReport assumptions = check_assumptions(loaded.net);
    std::ostringstream check_log;
    if (hard_check(assumptions, check_log) != 0) {
        std::cerr << check_log.str();
        return 2;
    }
    SensitivityReport report = analyze_sensitivity(loaded.net);

    std::vector<size_t> rank_of(report.ids.size());
    for (size_t pos = 0; pos < report.ranking.size(); ++pos) {
        rank_of[report.ranking[pos]] = pos + 1;
    }
    std::string csv = "link,F,S,F_normalized,S_normalized,rank\n";
    for (size_t k = 0; k < report.ids.size(); ++k) {
        csv += report.ids[k];
        csv += ',';
        csv += format_double(report.F[k]);
        csv += ',';
        csv += format_double(report.S[k]);
        csv += ',';
        csv += format_double(report.normalized_F[k]);
        csv += ',';
        csv += format_double(report.normalized_S[k]);
        csv += ',';
        csv += std::to_string(rank_of[k]);
        csv += '\n';
    }

    std::string txt;
    txt += "gridsens sensitivity report\n";
    txt += "case: " + loaded.case_name + "\n";
    txt += "config: " + loaded.config_name + "\n";
    txt += "config_hash: " + loaded.config_hash + "\n";
    txt += "tool_version: " + std::string(kVersion) + "\n";
    txt += check_log.str();
    txt += "interaction_index: " + format_double(report.interaction) + "\n";
    txt += "ranking (most critical first):";
    for (size_t pos : report.ranking) txt += " " + report.ids[pos];
    txt += "\n";

    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/sensitivity.csv", csv);
    write_file(out_dir + "/report.txt", txt);
    std::cout << txt;
    log_line("wrote " + out_dir + "/sensitivity.csv");
    return 0;
}

int cmd_region(const Inputs& in, const std::string& out_dir, int angles, double tol) {
    LoadedAnalysis loaded = load_network(in);
    SensitivityReport sens = analyze_sensitivity(loaded.net);
    RegionResult region = feasibility_boundary(loaded.net, angles, tol);
    region.f_scaled = scaled_rectangle(region, sens.F[0], sens.F[1]);
    region.s_scaled = scaled_rectangle(region, sens.S[0], sens.S[1]);

    std::string boundary_csv = "angle,sigma1,sigma2\n";
    for (size_t k = 0; k < region.angles.size(); ++k) {
        boundary_csv += format_double(region.angles[k]);
        boundary_csv += ',';
        boundary_csv += format_double(region.boundary[k][0]);
        boundary_csv += ',';
        boundary_csv += format_double(region.boundary[k][1]);
        boundary_csv += '\n';
    }
    std::string rect_csv = "name,corner_sigma1,corner_sigma2,area\n";
    auto rect_row = [&](const char* name, const Rectangle& r) {
        rect_csv += name;
        rect_csv += ',';
        rect_csv += format_double(r.corner[0]);
        rect_csv += ',';
        rect_csv += format_double(r.corner[1]);
        rect_csv += ',';
        rect_csv += format_double(r.area);
        rect_csv += '\n';
    };
    rect_row("uniform", region.uniform_square);
    rect_row("f_scaled", region.f_scaled);
    rect_row("s_scaled", region.s_scaled);

    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/boundary.csv", boundary_csv);
    write_file(out_dir + "/rectangles.csv", rect_csv);
    std::cout << "siso bounds: " << format_double(region.siso_bounds[0]) << " "
              << format_double(region.siso_bounds[1]) << "\n"
              << rect_csv;
    return 0;
}

int cmd_simulate(const Inputs& in, const std::string& out_dir, const std::string& sigma_csv,
                 int trials, int horizon, std::uint64_t seed) {
    LoadedAnalysis loaded = load_network(in);
    std::vector<double> sigmas = parse_sigma_list(sigma_csv);
    if (sigmas.size() != loaded.net.links.size()) {
        throw AnalysisError("--sigma needs " + std::to_string(loaded.net.links.size()) +
                            " values, got " + std::to_string(sigmas.size()));
    }
    MonteCarloResult mc = monte_carlo_growth(loaded.net, sigmas, trials, horizon, seed);
    const double rho = mss_spectral_radius(loaded.net, sigmas);

    std::string csv = "t,mean_sq_norm\n";
    for (size_t t = 0; t < mc.mean_sq_norm.size(); ++t) {
        csv += std::to_string(t);
        csv += ',';
        csv += format_double(mc.mean_sq_norm[t]);
        csv += '\n';
    }
    csv += "# estimated_rate," + format_double(mc.estimate.rate) + "\n";
    csv += "# confidence_half_width," + format_double(mc.estimate.half_width) + "\n";
    csv += "# effective_horizon," + std::to_string(mc.estimate.effective_horizon) + "\n";
    csv += "# mss_spectral_radius," + format_double(rho) + "\n";
    csv += std::string("# classification,") + (rho < 1.0 ? "mss-stable" : "mss-unstable") + "\n";

    std::filesystem::create_directories(out_dir);
    write_file(out_dir + "/growth.csv", csv);
    std::cout << "estimated_rate: " << format_double(mc.estimate.rate)
              << " +/- " << format_double(mc.estimate.half_width)
              << "\nmss_spectral_radius: " << format_double(rho)
              << "\nclassification: " << (rho < 1.0 ? "mss-stable" : "mss-unstable") << "\n";
    return 0;
}

void print_row_vector(const char* name, const RowVector& v) {
    std::cout << name << " = [";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) std::cout << " ";
        std::cout << short_num(v(i));
    }
    std::cout << "]\n";
}

int cmd_example(int which) {
    AssembledNetwork net = builtin_example(which);
    std::cout << "example " << which << "\n";
    std::cout << "A =\n";
    for (Eigen::Index r = 0; r < net.A.rows(); ++r) {
        std::cout << " ";
        for (Eigen::Index c = 0; c < net.A.cols(); ++c) {
            std::cout << " " << short_num(net.A(r, c));
        }
        std::cout << "\n";
    }
    for (size_t k = 0; k < net.links.size(); ++k) {
        print_row_vector(("B" + std::to_string(k + 1)).c_str(),
                         net.links[k].B.transpose());
        print_row_vector(("C" + std::to_string(k + 1)).c_str(), net.links[k].C);
    }
    Spectrum spectrum = eigenvalues(net.A);
    std::vector<double> re(spectrum.eigenvalues.size());
    for (size_t i = 0; i < re.size(); ++i) re[i] = spectrum.eigenvalues(static_cast<Eigen::Index>(i)).real();
    std::sort(re.rbegin(), re.rend());
    std::cout << "eigenvalues:";
    for (double v : re) std::cout << " " << short_num(v);
    std::cout << "\n";

    SensitivityReport report = analyze_sensitivity(net);
    std::cout << "F =";
    for (double v : report.F) std::cout << " " << format_double(v);
    std::cout << "\nS =";
    for (double v : report.S) std::cout << " " << format_double(v);
    std::cout << "\ninteraction_index I = " << format_double(report.interaction) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gramian-based contingency sensitivity analysis"};
    app.require_subcommand(1);

    Inputs inputs;
    std::string out_dir = ".";
    std::string sigma_csv;
    int angles = 181;
    double tol = 1e-6;
    int trials = 1000;
    int horizon = 200;
    std::uint64_t seed = 12345;
    int example_id = 0;

    auto add_input_flags = [&](CLI::App* cmd, bool with_example) {
        cmd->add_option("--case", inputs.case_path, "MATPOWER case file");
        cmd->add_option("--config", inputs.config_path, "dynamics config JSON");
        if (with_example) {
            cmd->add_option("--example", inputs.example, "built-in example (1 or 2)");
        }
    };

    CLI::App* check = app.add_subcommand("check", "assumption checks");
    add_input_flags(check, true);

    CLI::App* analyze = app.add_subcommand("analyze", "contingency sensitivity report");
    add_input_flags(analyze, true);
    analyze->add_option("--out", out_dir, "output directory");

    CLI::App* region = app.add_subcommand("region", "two-uncertainty stability region");
    add_input_flags(region, true);
    region->add_option("--out", out_dir, "output directory");
    region->add_option("--angles", angles, "rays over [0, pi/2]");
    region->add_option("--tol", tol, "bisection tolerance on the ray radius");

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo growth estimate");
    add_input_flags(simulate, true);
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_option("--sigma", sigma_csv, "comma-separated sigma per link")->required();
    simulate->add_option("--trials", trials, "number of trials");
    simulate->add_option("--horizon", horizon, "simulation steps");
    simulate->add_option("--seed", seed, "root RNG seed");

    CLI::App* example = app.add_subcommand("example", "print a built-in example");
    example->add_option("id", example_id, "example id (1 or 2)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (check->parsed()) return cmd_check(inputs);
        if (analyze->parsed()) return cmd_analyze(inputs, out_dir);
        if (region->parsed()) return cmd_region(inputs, out_dir, angles, tol);
        if (simulate->parsed()) {
            return cmd_simulate(inputs, out_dir, sigma_csv, trials, horizon, seed);
        }
        if (example->parsed()) return cmd_example(example_id);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const AnalysisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
