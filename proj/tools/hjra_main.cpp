#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hjra/io.hpp"
#include "hjra/oracle.hpp"
#include "hjra/parallel.hpp"
#include "hjra/runner.hpp"
#include "hjra/scenario.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    int threads = 0;       // 0: take the scenario's value
    long record_every = 0; // 0: take the scenario's value
};

void add_common(CLI::App* cmd, CommonArgs& args)
{
    cmd->add_option("--scenario", args.scenario_path, "Scenario file")->required();
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--threads", args.threads, "Worker threads for node-parallel loops");
    cmd->add_option("--record-every", args.record_every, "Record/export every K-th step");
}

hjra::Scenario load(const CommonArgs& args)
{
    hjra::Scenario s = hjra::parse_scenario(args.scenario_path);
    if (args.threads > 0) s.threads = args.threads;
    if (args.record_every > 0) s.record_every = static_cast<std::size_t>(args.record_every);
    return s;
}

// Solver failures leave a diagnostic next to the outputs.
void write_diagnostic(const std::string& out_dir, const std::string& what)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream diag(out_dir + "/error.txt");
    diag << what << "\n";
}

int guarded(const std::string& out_dir, const std::function<void()>& body)
{
    try {
        body();
        return 0;
    } catch (const hjra::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_diagnostic(out_dir, e.what());
        return kExitValidation;
    } catch (const hjra::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        write_diagnostic(out_dir, e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_diagnostic(out_dir, e.what());
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reach-avoid set computation for differential games via Hamilton-Jacobi level sets"};
    app.require_subcommand(1);

    CommonArgs solve_args, alg_args, oracle_args;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Single-system backward reach-avoid solve");
    add_common(solve_cmd, solve_args);
    CLI::App* alg_cmd = app.add_subcommand("algorithm1", "Multi-aircraft target-window sweep with conflict detection");
    add_common(alg_cmd, alg_args);
    CLI::App* oracle_cmd = app.add_subcommand("oracle", "Brute-force dynamic-programming solve (ground truth)");
    add_common(oracle_cmd, oracle_args);

    std::string diff_a, diff_b;
    CLI::App* diff_cmd = app.add_subcommand("diff", "Compare two exported value tubes");
    diff_cmd->add_option("--a", diff_a, "First tube index.csv")->required();
    diff_cmd->add_option("--b", diff_b, "Second tube index.csv")->required();

    CLI11_PARSE(app, argc, argv);

    if (solve_cmd->parsed()) {
        return guarded(solve_args.out_dir, [&] {
            const hjra::Scenario s = load(solve_args);
            const hjra::RunReport report = hjra::run_solve(s, solve_args.out_dir);
            std::cout << "wrote " << report.outputs.size() << " files to " << solve_args.out_dir << " ("
                      << report.warnings << " warnings)\n";
        });
    }
    if (alg_cmd->parsed()) {
        return guarded(alg_args.out_dir, [&] {
            const hjra::Scenario s = load(alg_args);
            const hjra::RunReport report = hjra::run_algorithm1_scenario(s, alg_args.out_dir);
            std::cout << "wrote " << report.outputs.size() << " files to " << alg_args.out_dir << " ("
                      << report.warnings << " warnings)\n";
        });
    }
    if (oracle_cmd->parsed()) {
        return guarded(oracle_args.out_dir, [&] {
            const hjra::Scenario s = load(oracle_args);
            const hjra::RunReport report = hjra::run_oracle(s, oracle_args.out_dir);
            std::cout << "wrote " << report.outputs.size() << " files to " << oracle_args.out_dir << " ("
                      << report.warnings << " warnings)\n";
        });
    }
    if (diff_cmd->parsed()) {
        return guarded(".", [&] {
            const hjra::ValueTube a = hjra::read_tube_csv(diff_a);
            const hjra::ValueTube b = hjra::read_tube_csv(diff_b);
            const hjra::TubeDiff diff = hjra::compare_tubes(a, b);
            std::cout << "frames_compared = " << diff.compared_frames << "\n"
                      << "linf = " << hjra::format_double(diff.linf) << "\n"
                      << "mask_mismatch_cells = " << diff.mask_mismatch_cells << "\n";
        });
    }
    return 0;
}
