#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vqalab/app/gradsuite.hpp"
#include "vqalab/app/orchestrator.hpp"
#include "vqalab/app/plotdata.hpp"

namespace {

using namespace vqalab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void print_breakdown(const data::EvalBreakdown& b, data::MetricMode mode) {
    std::printf("metric=%s\n", data::metric_mode_name(mode));
    std::printf("all     %6.2f  (n=%zu)\n", b.all, b.n_all);
    std::printf("yes_no  %6.2f  (n=%zu)\n", b.yes_no, b.n_yes_no);
    std::printf("number  %6.2f  (n=%zu)\n", b.number, b.n_number);
    std::printf("other   %6.2f  (n=%zu)\n", b.other, b.n_other);
}

int cmd_gen_data(const std::string& config, const std::string& out) {
    data::DatasetConfig cfg = app::load_dataset_config(config);
    auto records = data::generate_dataset(cfg);
    data::save_dataset(records, out);
    std::size_t yn = 0, num = 0, oth = 0;
    for (const auto& r : records) {
        if (r.question_type == data::QuestionType::yes_no) ++yn;
        else if (r.question_type == data::QuestionType::number) ++num;
        else ++oth;
    }
    std::printf("wrote %zu records to %s (yes_no=%zu number=%zu other=%zu)\n", records.size(),
                out.c_str(), yn, num, oth);
    return kExitOk;
}

app::RunConfig load_run(const std::string& config, const std::string& metric) {
    app::RunConfig cfg = app::load_run_config(config);
    if (!metric.empty()) cfg.metric = data::metric_mode_from_name(metric);
    return cfg;
}

int cmd_train(const std::string& config, const std::string& out, const std::string& metric) {
    app::RunConfig cfg = load_run(config, metric);
    auto records = data::load_dataset(cfg.dataset_path);
    app::RunResult res = app::run_experiment(cfg, records);
    std::string prefix = out.empty() ? "run" : out;
    auto params = res.model.parameters();
    models::save_checkpoint(prefix + ".ckpt", app::checkpoint_header(cfg), params);
    app::write_loss_csv(res.loss_log, prefix + "_loss.csv");
    std::printf("checkpoint: %s.ckpt\nloss log:   %s_loss.csv\n", prefix.c_str(),
                prefix.c_str());
    print_breakdown(res.breakdown, cfg.metric);
    return kExitOk;
}

int cmd_eval(const std::string& config, const std::string& checkpoint,
             const std::string& metric) {
    app::RunConfig cfg = load_run(config, metric);
    auto records = data::load_dataset(cfg.dataset_path);
    app::TrainedModel model = app::build_model(cfg);
    auto params = model.parameters();
    models::load_checkpoint(checkpoint, params);
    auto val = app::split_train_val(records).second;
    auto b = data::evaluate_model(
        [&model](const data::VqaRecord& rec) { return model.predict(rec); }, val, cfg.metric);
    print_breakdown(b, cfg.metric);
    return kExitOk;
}

int cmd_ablate(const std::string& config, const std::string& preset, const std::string& seeds,
               std::size_t jobs, const std::string& out, const std::string& metric) {
    app::RunConfig base = load_run(config, metric);
    auto seed_list = app::parse_seed_list(seeds);
    std::vector<app::RunConfig> grid =
        preset.empty() ? std::vector<app::RunConfig>{base} : app::preset_grid(preset, base);
    auto records = data::load_dataset(base.dataset_path);
    std::string path = out.empty() ? "results.csv" : out;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write results csv: " + path);
    app::run_ablation(grid, seed_list, records, jobs, os);
    std::printf("wrote %zu rows to %s\n", grid.size() * seed_list.size(), path.c_str());
    return kExitOk;
}

int cmd_plot_data(const std::string& config, const std::string& out) {
    auto files = app::write_plot_data(config, out.empty() ? "plot" : out);
    for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
    return kExitOk;
}

int cmd_gradcheck(const std::string& seeds) {
    auto seed_list = app::parse_seed_list(seeds.empty() ? "1,2,3,4,5" : seeds);
    auto results = app::run_grad_suite(seed_list);
    constexpr double kTol = 1e-4;
    bool ok = true;
    for (const auto& r : results) {
        bool pass = r.report.passed(kTol);
        ok = ok && pass;
        std::printf("%-22s seed=%llu max_rel_err=%.3e entries=%zu %s\n", r.name.c_str(),
                    static_cast<unsigned long long>(r.seed), r.report.max_rel_err,
                    r.report.entries_checked, pass ? "PASS" : "FAIL");
    }
    if (!ok) throw NumericalError("gradient check failed (tolerance 1e-4)");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Desk-scale VQA classification laboratory"};
    cli.require_subcommand(1);

    std::string config, out, seeds = "1,2,3", preset, metric, checkpoint;
    std::size_t jobs = 0;

    auto* gen = cli.add_subcommand("gen-data", "Generate a synthetic JSONL dataset");
    gen->add_option("--config", config, "Dataset config file")->required();
    gen->add_option("--out", out, "Output JSONL path")->required();

    auto* train = cli.add_subcommand("train", "Train one configured model");
    train->add_option("--config", config, "Run config file")->required();
    train->add_option("--out", out, "Output prefix (default: run)");
    train->add_option("--metric", metric, "strict or official");

    auto* eval = cli.add_subcommand("eval", "Evaluate a checkpoint on the validation split");
    eval->add_option("--config", config, "Run config file")->required();
    eval->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
    eval->add_option("--metric", metric, "strict or official");

    auto* ablate = cli.add_subcommand("ablate", "Run an ablation grid to CSV");
    ablate->add_option("--config", config, "Base run config file")->required();
    ablate->add_option("--preset", preset, "table1 or table2");
    ablate->add_option("--seeds", seeds, "Comma-separated seed list (default 1,2,3)");
    ablate->add_option("--jobs", jobs, "Worker count (default: hardware threads)");
    ablate->add_option("--out", out, "Results CSV path (default: results.csv)");
    ablate->add_option("--metric", metric, "strict or official");

    auto* plot = cli.add_subcommand("plot-data", "Emit gnuplot data from a results/loss CSV");
    plot->add_option("--config", config, "Input CSV path")->required();
    plot->add_option("--out", out, "Output file prefix (default: plot)");

    auto* grad = cli.add_subcommand("gradcheck", "Finite-difference gradient suite");
    grad->add_option("--seeds", seeds, "Comma-separated seed list (default 1,2,3,4,5)");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(config, out);
        if (train->parsed()) return cmd_train(config, out, metric);
        if (eval->parsed()) return cmd_eval(config, checkpoint, metric);
        if (ablate->parsed()) return cmd_ablate(config, preset, seeds, jobs, out, metric);
        if (plot->parsed()) return cmd_plot_data(config, out);
        if (grad->parsed()) return cmd_gradcheck(seeds);
    } catch (const vqalab::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const vqalab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
