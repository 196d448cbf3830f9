#include "vqalab/app/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace vqalab::app {

using nn::Rng;
using nn::Var;

int TrainedModel::predict(const data::VqaRecord& rec) const {
    switch (method) {
        case Method::g_classifier:
        case Method::gan:
            return train::predict_generator(gan->encoder, gan->generator, rec);
        case Method::autoencoder:
            return autoenc->predict(rec);
        case Method::attention:
            return attention->predict(rec);
    }
    throw ConfigError("TrainedModel::predict: bad method");
}

std::vector<Var> TrainedModel::parameters() const {
    switch (method) {
        case Method::g_classifier:
        case Method::gan:
            return gan->all_params();
        case Method::autoencoder:
            return autoenc->parameters();
        case Method::attention:
            return attention->parameters();
    }
    throw ConfigError("TrainedModel::parameters: bad method");
}

TrainedModel build_model(const RunConfig& cfg) {
    cfg.validate();
    TrainedModel m;
    m.method = cfg.method;
    nn::InitMode init{cfg.init, cfg.seed};
    switch (cfg.method) {
        case Method::g_classifier:
        case Method::gan: {
            auto st = std::make_shared<train::GanClsState>();
            train::VqaEncoderConfig enc;
            enc.vocab = cfg.vocab;
            enc.embed_dim = cfg.embed_dim;
            enc.rnn_hidden = cfg.rnn_hidden;
            enc.d_i = cfg.d_i;
            enc.strategy = cfg.strategy;
            enc.d_f = cfg.d_f;
            enc.d_s = cfg.d_s;
            enc.init = init;
            st->encoder = train::VqaEncoder(enc, 1);

            models::GeneratorSpec gs;
            gs.arch = cfg.arch;
            gs.noise_mode = cfg.noise_mode;
            gs.noise_dim = cfg.noise_dim;
            gs.fused_dim = st->encoder.out_dim();
            gs.answer_vocab = cfg.answer_vocab;
            gs.hidden = cfg.g_hidden;
            gs.dropout_rate = cfg.dropout;
            gs.layernorm = cfg.layernorm;
            gs.init = init;
            st->generator = models::Generator(gs, 2);

            models::DiscriminatorSpec ds;
            ds.hidden = cfg.d_hidden;
            ds.answer_vocab = cfg.answer_vocab;
            ds.condition_dim = st->encoder.out_dim();
            ds.input_noise_std = cfg.disc_noise_start;
            ds.dropout_rate = cfg.dropout;
            ds.layernorm = cfg.layernorm;
            ds.init = init;
            st->discriminator = models::Discriminator(ds, 3);

            st->config.alpha = cfg.alpha;
            st->config.batch = cfg.batch;
            st->config.steps = cfg.steps;
            st->config.disc_noise_start = cfg.disc_noise_start;
            st->config.disc_noise_end = cfg.disc_noise_end;
            st->config.descent_updates = cfg.descent_updates;
            st->seed = cfg.seed;
            m.gan = st;
            break;
        }
        case Method::autoencoder: {
            auto am = std::make_shared<train::AutoencoderVqaModel>();
            am->rnn = nn::RnnEncoder(cfg.vocab, cfg.embed_dim, cfg.rnn_hidden, init, 11);
            models::AutoencoderSpec as;
            as.input_dim = cfg.d_i + cfg.rnn_hidden;
            as.code_dim = cfg.code_dim;
            as.answer_vocab = cfg.answer_vocab;
            as.dropout_rate = cfg.dropout;
            as.init = init;
            am->autoencoder = models::AutoencoderClassifier(as, 12);
            m.autoenc = am;
            break;
        }
        case Method::attention: {
            models::CoattentionSpec cs;
            cs.word_dim = cfg.embed_dim;
            cs.region_dim = cfg.d_i / cfg.regions;
            cs.att_dim = cfg.att_dim;
            cs.sketch_dim = cfg.att_sketch_dim;
            cs.answer_vocab = cfg.answer_vocab;
            cs.combiner = cfg.combiner;
            cs.dropout_rate = cfg.dropout;
            cs.init = init;
            m.attention = std::make_shared<train::AttentionVqaModel>(
                train::make_attention_model(cfg.vocab, cfg.embed_dim, cfg.regions, cs, 21));
            break;
        }
    }
    return m;
}

models::CheckpointHeader checkpoint_header(const RunConfig& cfg) {
    models::CheckpointHeader h;
    h.arch_tag = static_cast<std::uint32_t>(cfg.method) * 100u +
                 static_cast<std::uint32_t>(cfg.arch) * 10u +
                 static_cast<std::uint32_t>(cfg.noise_mode);
    h.init_tag = cfg.init == nn::InitTag::I1 ? 1u : 2u;
    h.seed = cfg.seed;
    h.dims = {cfg.d_i,        cfg.d_f,      cfg.noise_dim, cfg.d_s,
              cfg.answer_vocab, cfg.vocab,  cfg.embed_dim, cfg.rnn_hidden,
              cfg.regions,    cfg.code_dim, cfg.att_dim,   cfg.att_sketch_dim};
    return h;
}

std::pair<std::vector<data::VqaRecord>, std::vector<data::VqaRecord>> split_train_val(
    const std::vector<data::VqaRecord>& records) {
    if (records.size() < 5) throw ConfigError("need at least 5 records for an 80/20 split");
    std::size_t n_train = records.size() * 4 / 5;
    return {std::vector<data::VqaRecord>(records.begin(), records.begin() + n_train),
            std::vector<data::VqaRecord>(records.begin() + n_train, records.end())};
}

namespace {

std::vector<const data::VqaRecord*> draw_batch(const std::vector<data::VqaRecord>& dataset,
                                               std::size_t batch, Rng& rng) {
    std::vector<const data::VqaRecord*> out(batch);
    for (auto& p : out) p = &dataset[rng.below(dataset.size())];
    return out;
}

std::vector<train::LossRow> rows_from(const std::vector<double>& losses) {
    std::vector<train::LossRow> rows;
    rows.reserve(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i) rows.push_back({i, losses[i], 0.0, 0});
    return rows;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg, const std::vector<data::VqaRecord>& records) {
    auto [train_set, val_set] = split_train_val(records);
    RunResult res;
    res.model = build_model(cfg);
    Rng rng(Rng::derive(cfg.seed, 0x7EA1));

    switch (cfg.method) {
        case Method::g_classifier: {
            // Baseline: the generator trained as a plain classifier, no
            // discriminator and no input-noise regularizer.
            train::PretrainPlan plan;
            plan.pretrain_generator = true;
            plan.g_input_noise_std = 0.0;
            plan.pretrain_steps = cfg.steps;
            res.loss_log = rows_from(
                train::pretrain_generator(*res.model.gan, train_set, plan, rng));
            break;
        }
        case Method::gan: {
            train::GanClsState& st = *res.model.gan;
            if (cfg.pretrain.pretrain_generator) {
                Rng pre(Rng::derive(cfg.seed, 0x9EE0));
                train::pretrain_generator(st, train_set, cfg.pretrain, pre);
            }
            if (cfg.pretrain.pretrain_discriminator) {
                Rng pre(Rng::derive(cfg.seed, 0x9EE1));
                train::pretrain_discriminator(st, train_set, cfg.pretrain, pre);
            }
            for (std::size_t s = 0; s < cfg.steps; ++s) {
                auto batch = draw_batch(train_set, cfg.batch, rng);
                train::gan_cls_step(st, batch, rng);
            }
            res.loss_log = st.loss_log;
            break;
        }
        case Method::autoencoder: {
            train::AutoencoderTrainConfig tc{cfg.alpha, cfg.batch, cfg.steps, cfg.lambda};
            res.loss_log = train::train_autoencoder_vqa(*res.model.autoenc, train_set, tc, rng);
            break;
        }
        case Method::attention: {
            train::AttentionTrainConfig tc{cfg.alpha, cfg.batch, cfg.steps};
            res.loss_log = train::train_attention(*res.model.attention, train_set, tc, rng);
            break;
        }
    }

    const TrainedModel& model = res.model;
    res.breakdown = data::evaluate_model(
        [&model](const data::VqaRecord& rec) { return model.predict(rec); }, val_set,
        cfg.metric);
    return res;
}

void write_loss_csv(const std::vector<train::LossRow>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write loss csv: " + path);
    out << "step,l_d,l_g,saturation\n";
    char buf[128];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%ld\n", row.step, row.l_d, row.l_g,
                      row.saturation);
        out << buf;
    }
}

// ---- ablation ---------------------------------------------------------------

const char* const kResultsCsvHeader =
    "method,arch,noise,init,pretrain_G,pretrain_D,combiner,all,yes_no,number,other,seed,steps,"
    "wall_ms,status";

std::vector<RunConfig> preset_grid(const std::string& preset, const RunConfig& base) {
    std::vector<RunConfig> grid;
    auto row = [&](Method method, models::GeneratorArch arch, models::NoiseMode noise,
                   bool pre_g, bool pre_d, models::Combiner comb) {
        RunConfig c = base;
        c.method = method;
        c.arch = arch;
        c.noise_mode = noise;
        c.pretrain.pretrain_generator = pre_g;
        c.pretrain.pretrain_discriminator = pre_d;
        c.combiner = comb;
        grid.push_back(c);
    };
    using models::Combiner;
    using models::GeneratorArch;
    using models::NoiseMode;
    if (preset == "table1") {
        row(Method::g_classifier, GeneratorArch::simp, NoiseMode::N0, false, false,
            Combiner::addition);
        row(Method::g_classifier, GeneratorArch::full, NoiseMode::N0, false, false,
            Combiner::addition);
        row(Method::gan, GeneratorArch::simp, NoiseMode::N0, true, false, Combiner::addition);
        row(Method::gan, GeneratorArch::full, NoiseMode::N0, true, false, Combiner::addition);
        row(Method::gan, GeneratorArch::full, NoiseMode::N2, true, false, Combiner::addition);
        row(Method::autoencoder, base.arch, base.noise_mode, false, false, Combiner::addition);
        row(Method::attention, base.arch, base.noise_mode, false, false, Combiner::addition);
        row(Method::attention, base.arch, base.noise_mode, false, false, Combiner::mcb);
    } else if (preset == "table2") {
        row(Method::gan, GeneratorArch::full, NoiseMode::N2, false, false, Combiner::addition);
        row(Method::gan, GeneratorArch::full, NoiseMode::N2, true, false, Combiner::addition);
        row(Method::gan, GeneratorArch::full, NoiseMode::N2, false, true, Combiner::addition);
        row(Method::gan, GeneratorArch::full, NoiseMode::N2, true, true, Combiner::addition);
    } else {
        throw ConfigError("unknown preset: " + preset + " (expected table1 or table2)");
    }
    return grid;
}

namespace {

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

struct RowOut {
    std::string text;
};

std::string format_row(const RunConfig& cfg, std::uint64_t seed,
                       const data::EvalBreakdown& b, double wall_ms,
                       const std::string& status) {
    bool gen = cfg.method == Method::g_classifier || cfg.method == Method::gan;
    bool att = cfg.method == Method::attention;
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f,%.2f,%.2f", b.all, b.yes_no, b.number, b.other);
    os << method_name(cfg.method) << ',' << (gen ? models::arch_name(cfg.arch) : "-") << ','
       << (gen ? models::noise_mode_name(cfg.noise_mode) : "-") << ','
       << nn::init_tag_name(cfg.init) << ','
       << (cfg.method == Method::gan && cfg.pretrain.pretrain_generator ? "1" : "0") << ','
       << (cfg.method == Method::gan && cfg.pretrain.pretrain_discriminator ? "1" : "0") << ','
       << (att ? models::combiner_name(cfg.combiner) : "-") << ',' << buf << ',' << seed << ','
       << cfg.steps << ',' << static_cast<long long>(wall_ms) << ',' << sanitize(status);
    return os.str();
}

}  // namespace

void run_ablation(const std::vector<RunConfig>& grid, const std::vector<std::uint64_t>& seeds,
                  const std::vector<data::VqaRecord>& records, std::size_t jobs,
                  std::ostream& out) {
    if (grid.empty()) throw ConfigError("ablation grid is empty");
    if (seeds.empty()) throw ConfigError("ablation seed list is empty");

    struct Job {
        RunConfig cfg;
        std::uint64_t seed;
    };
    std::vector<Job> jobs_list;
    for (const RunConfig& cfg : grid)
        for (std::uint64_t seed : seeds) {
            Job j{cfg, seed};
            j.cfg.seed = seed;
            jobs_list.push_back(std::move(j));
        }

    std::vector<RowOut> rows(jobs_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs_list.size()) return;
            const Job& job = jobs_list[i];
            auto t0 = std::chrono::steady_clock::now();
            data::EvalBreakdown b;
            std::string status = "ok";
            try {
                b = run_experiment(job.cfg, records).breakdown;
            } catch (const std::exception& e) {
                status = e.what();
            }
            double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
            rows[i].text = format_row(job.cfg, job.seed, b, ms, status);
        }
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, jobs_list.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Single appender, fixed grid order: reruns differ only in wall_ms.
    out << kResultsCsvHeader << '\n';
    for (const RowOut& row : rows) out << row.text << '\n';
}

}  // namespace vqalab::app
