#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vqalab/app/config.hpp"
#include "vqalab/models/autoencoder.hpp"
#include "vqalab/models/checkpoint.hpp"
#include "vqalab/train/trainers.hpp"

namespace vqalab::app {

// A built (possibly trained) model behind one predict/parameters surface.
struct TrainedModel {
    Method method = Method::gan;
    std::shared_ptr<train::GanClsState> gan;  // gan and g_classifier
    std::shared_ptr<train::AutoencoderVqaModel> autoenc;
    std::shared_ptr<train::AttentionVqaModel> attention;

    int predict(const data::VqaRecord& rec) const;
    std::vector<nn::Var> parameters() const;
};

// Seeded, untrained model matching the config.
TrainedModel build_model(const RunConfig& cfg);

models::CheckpointHeader checkpoint_header(const RunConfig& cfg);

// First 80% train, last 20% validation.
std::pair<std::vector<data::VqaRecord>, std::vector<data::VqaRecord>> split_train_val(
    const std::vector<data::VqaRecord>& records);

struct RunResult {
    TrainedModel model;
    std::vector<train::LossRow> loss_log;
    data::EvalBreakdown breakdown;  // on the validation split
};

RunResult run_experiment(const RunConfig& cfg, const std::vector<data::VqaRecord>& records);

void write_loss_csv(const std::vector<train::LossRow>& log, const std::string& path);

// ---- ablation grids --------------------------------------------------------

extern const char* const kResultsCsvHeader;

// Built-in grids: "table1" (8 method rows) and "table2" (4 pretraining rows).
// Axis fields of `base` are overridden per row; dims and budgets pass through.
std::vector<RunConfig> preset_grid(const std::string& preset, const RunConfig& base);

// Runs |grid| x |seeds| experiments on a worker pool and writes one CSV row
// each, in grid order. A failed run becomes a row with its error in the status
// column; the grid keeps going.
void run_ablation(const std::vector<RunConfig>& grid, const std::vector<std::uint64_t>& seeds,
                  const std::vector<data::VqaRecord>& records, std::size_t jobs,
                  std::ostream& out);

}  // namespace vqalab::app
