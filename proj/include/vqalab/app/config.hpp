#pragma once

#include <map>
#include <string>
#include <vector>

#include "vqalab/data/dataset.hpp"
#include "vqalab/data/metric.hpp"
#include "vqalab/fusion/fusion.hpp"
#include "vqalab/models/coattention.hpp"
#include "vqalab/models/generator.hpp"
#include "vqalab/train/gan_cls.hpp"

namespace vqalab::app {

// Flat key=value config text. Blank lines and '#' comments allowed; duplicate
// keys rejected.
using KvMap = std::map<std::string, std::string>;
KvMap parse_kv_text(const std::string& text);
KvMap parse_kv_file(const std::string& path);

enum class Method { g_classifier, gan, autoencoder, attention };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct RunConfig {
    Method method = Method::gan;
    models::GeneratorArch arch = models::GeneratorArch::full;
    fusion::Strategy strategy = fusion::Strategy::simple;
    models::NoiseMode noise_mode = models::NoiseMode::N0;
    nn::InitTag init = nn::InitTag::I1;
    train::PretrainPlan pretrain;
    models::Combiner combiner = models::Combiner::addition;

    // Dims.
    std::size_t d_i = 32;
    std::size_t d_f = 64;
    std::size_t noise_dim = 8;   // Z
    std::size_t d_s = 128;
    std::size_t answer_vocab = 32;  // K
    std::size_t vocab = 32;         // question token vocabulary
    std::size_t embed_dim = 16;
    std::size_t rnn_hidden = 32;
    std::size_t regions = 4;
    std::vector<std::size_t> g_hidden = {256, 256, 256};
    std::vector<std::size_t> d_hidden = {256, 128};
    std::size_t code_dim = 16;          // autoencoder bottleneck
    std::size_t att_dim = 32;           // attention projection width
    std::size_t att_sketch_dim = 64;

    double alpha = 0.01;
    std::size_t batch = 32;
    std::size_t steps = 2000;
    double dropout = 0.1;
    double lambda = 1.0;            // autoencoder classification weight
    double disc_noise_start = 0.1;  // sigma_d schedule
    double disc_noise_end = 0.0;
    bool descent_updates = false;
    bool layernorm = false;

    std::uint64_t seed = 1;
    std::string dataset_path;
    data::MetricMode metric = data::MetricMode::strict;

    void validate() const;  // throws ConfigError naming the bad field
};

// Typed construction; unknown keys and malformed values name the field.
RunConfig run_config_from_kv(const KvMap& kv);
data::DatasetConfig dataset_config_from_kv(const KvMap& kv);

// File loaders; VFL_SEED in the environment overrides the config seed.
RunConfig load_run_config(const std::string& path);
data::DatasetConfig load_dataset_config(const std::string& path);

std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace vqalab::app
