#include "emstress/commands.hpp"
#include "emstress/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace emstress;

int main(int argc, char** argv)
{
    CLI::App app{"Electromigration stress in interconnect trees: finite-difference reference and STPINN solver"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<unsigned long long> seed;
    std::optional<int> threads;
    std::string format;
    app.add_option("-c,--config", config_path, "YAML run configuration")->check(CLI::ExistingFile);
    app.add_option("--set", overrides, "Override a key, e.g. --set training.adam_iters=100")->take_all();
    app.add_option("--seed", seed, "Seed for sampling and weight initialization");
    app.add_option("--threads", threads, "Worker threads (default: EMSTRESS_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--format", format, "'header' prints the CSV schemas; 'config' prints every config key")
        ->check(CLI::IsMember({"header", "config"}));

    auto* solve = app.add_subcommand("solve-fdm", "Finite-difference stress profiles and nucleation time");
    auto* train = app.add_subcommand("train", "Train the network; writes checkpoint and loss history");
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a grid or point list");
    auto* compare = app.add_subcommand("compare", "Compare a checkpoint with the finite-difference solution");

    EvalOptions eval_opts;
    double ratio = 1.0;
    eval->add_option("--checkpoint", eval_opts.checkpoint, "Checkpoint (default: output.checkpoint)");
    eval->add_option("--points", eval_opts.points_file, "CSV of segment_id,x_m,t_s")->check(CLI::ExistingFile);
    auto* ratio_opt = eval->add_option("--ratio", ratio, "Diffusivity ratio D_a*/D_a")->check(CLI::PositiveNumber);
    eval->add_option("-o,--output", eval_opts.output, "Output CSV (default: output.eval_csv)");

    CompareOptions cmp_opts;
    compare->add_option("--checkpoint", cmp_opts.checkpoint, "Checkpoint (default: output.checkpoint)");
    compare->add_option("--speed-points", cmp_opts.speed_points, "Random queries for the timing comparison")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (format == "header") {
        std::cout << csv_schemas();
        return 0;
    }
    if (format == "config") {
        std::cout << config_reference();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 1;
    }

    try {
        if (threads)
            set_thread_count(*threads);
        if (seed) {
            overrides.push_back("sampling.seed=" + std::to_string(*seed));
            overrides.push_back("training.seed=" + std::to_string(*seed));
        }
        if (config_path.empty())
            throw ConfigError("--config is required");
        const RunConfig config = load_config(config_path, overrides);

        if (*solve)
            return cmd_solve_fdm(config, std::cout);
        if (*train)
            return cmd_train(config, std::cout);
        if (*eval) {
            if (ratio_opt->count())
                eval_opts.ratio = ratio;
            return cmd_eval(config, eval_opts, std::cout);
        }
        if (*compare)
            return cmd_compare(config, cmp_opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "emstress: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
