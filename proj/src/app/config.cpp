#include "vqalab/app/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vqalab::app {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Typed accessors over a KvMap; consumed keys are tracked so leftovers can be
// reported as unknown.
struct KvReader {
    const KvMap& kv;
    std::map<std::string, bool> used;

    explicit KvReader(const KvMap& m) : kv(m) {}

    const std::string* find(const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) return nullptr;
        used[key] = true;
        return &it->second;
    }

    std::string str(const std::string& key, const std::string& fallback) {
        const std::string* v = find(key);
        return v ? *v : fallback;
    }

    double num(const std::string& key, double fallback) {
        const std::string* v = find(key);
        if (!v) return fallback;
        std::size_t pos = 0;
        double out = 0.0;
        try {
            out = std::stod(*v, &pos);
        } catch (const std::exception&) {
            throw ConfigError("config field '" + key + "': expected a number, got '" + *v + "'");
        }
        if (pos != v->size())
            throw ConfigError("config field '" + key + "': expected a number, got '" + *v + "'");
        return out;
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        double v = num(key, static_cast<double>(fallback));
        if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
            throw ConfigError("config field '" + key + "': expected a non-negative integer");
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& key, bool fallback) {
        const std::string* v = find(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1") return true;
        if (*v == "false" || *v == "0") return false;
        throw ConfigError("config field '" + key + "': expected true/false, got '" + *v + "'");
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback) {
        const std::string* v = find(key);
        if (!v) return fallback;
        std::vector<std::size_t> out;
        std::stringstream ss(*v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                throw ConfigError("config field '" + key + "': empty list element");
            try {
                out.push_back(static_cast<std::size_t>(std::stoull(item)));
            } catch (const std::exception&) {
                throw ConfigError("config field '" + key + "': expected integers, got '" + item +
                                  "'");
            }
        }
        if (out.empty()) throw ConfigError("config field '" + key + "': empty list");
        return out;
    }

    void reject_unknown(const std::string& what) const {
        for (const auto& [key, value] : kv) {
            (void)value;
            if (!used.count(key))
                throw ConfigError(what + ": unknown config field '" + key + "'");
        }
    }
};

template <typename Enum>
Enum named(KvReader& r, const std::string& key, const std::string& fallback,
           Enum (*from_name)(const std::string&)) {
    std::string v = r.str(key, fallback);
    try {
        return from_name(v);
    } catch (const ConfigError&) {
        throw ConfigError("config field '" + key + "': unrecognized value '" + v + "'");
    }
}

void apply_seed_override(std::uint64_t& seed) {
    const char* env = std::getenv("VFL_SEED");
    if (!env || !*env) return;
    try {
        seed = std::stoull(env);
    } catch (const std::exception&) {
        throw ConfigError(std::string("VFL_SEED: expected an integer, got '") + env + "'");
    }
}

}  // namespace

KvMap parse_kv_text(const std::string& text) {
    KvMap out;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (out.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        out[key] = value;
    }
    return out;
}

KvMap parse_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_kv_text(buf.str());
}

const char* method_name(Method m) {
    switch (m) {
        case Method::g_classifier: return "g_classifier";
        case Method::gan: return "gan";
        case Method::autoencoder: return "autoencoder";
        case Method::attention: return "attention";
    }
    throw ConfigError("method_name: bad enum");
}

Method method_from_name(const std::string& name) {
    if (name == "g_classifier") return Method::g_classifier;
    if (name == "gan") return Method::gan;
    if (name == "autoencoder") return Method::autoencoder;
    if (name == "attention") return Method::attention;
    throw ConfigError("unknown method: " + name);
}

void RunConfig::validate() const {
    auto positive = [](std::size_t v, const char* field) {
        if (v == 0) throw ConfigError(std::string("config field '") + field + "' must be > 0");
    };
    positive(d_i, "d_i");
    positive(d_f, "d_f");
    positive(answer_vocab, "answer_vocab");
    positive(vocab, "vocab");
    positive(embed_dim, "embed_dim");
    positive(rnn_hidden, "rnn_hidden");
    positive(regions, "regions");
    positive(batch, "batch");
    positive(att_dim, "att_dim");
    positive(code_dim, "code_dim");
    if (d_i % regions != 0)
        throw ConfigError("config field 'd_i' must be divisible by 'regions'");
    if (strategy == fusion::Strategy::mcb || combiner == models::Combiner::mcb) {
        auto pow2 = [](std::size_t v) { return v != 0 && (v & (v - 1)) == 0; };
        if (strategy == fusion::Strategy::mcb && !pow2(d_s))
            throw ConfigError("config field 'd_s' must be a power of two for mcb fusion");
        if (combiner == models::Combiner::mcb && !pow2(att_sketch_dim))
            throw ConfigError("config field 'att_sketch_dim' must be a power of two");
    }
    if (noise_mode == models::NoiseMode::N1) positive(noise_dim, "noise_dim");
    if (alpha < 0.0) throw ConfigError("config field 'alpha' must be >= 0");
    if (dropout < 0.0 || dropout >= 1.0)
        throw ConfigError("config field 'dropout' must lie in [0, 1)");
    if (lambda < 0.0) throw ConfigError("config field 'lambda' must be >= 0");
    if (disc_noise_start < 0.0 || disc_noise_end < 0.0)
        throw ConfigError("config field 'disc_noise_start/end' must be >= 0");
    if (method == Method::autoencoder && code_dim >= d_i + rnn_hidden)
        throw ConfigError("config field 'code_dim' must be < d_i + rnn_hidden");
    if (dataset_path.empty())
        throw ConfigError("config field 'dataset' is required");
}

RunConfig run_config_from_kv(const KvMap& kv) {
    KvReader r(kv);
    RunConfig c;
    c.method = named(r, "method", "gan", &method_from_name);
    c.arch = named(r, "arch", "full", &models::arch_from_name);
    c.strategy = named(r, "fusion", "simple", &fusion::strategy_from_name);
    c.noise_mode = named(r, "noise", "N0", &models::noise_mode_from_name);
    c.init = named(r, "init", "I1", &nn::init_tag_from_name);
    c.combiner = named(r, "combiner", "addition", &models::combiner_from_name);
    c.metric = named(r, "metric", "strict", &data::metric_mode_from_name);

    c.pretrain.pretrain_generator = r.flag("pretrain_G", false);
    c.pretrain.pretrain_discriminator = r.flag("pretrain_D", false);
    c.pretrain.pretrain_steps = r.count("pretrain_steps", 500);
    c.pretrain.g_input_noise_std = r.num("pretrain_g_noise", 0.1);
    c.pretrain.d_input_noise_std = r.num("pretrain_d_noise", 0.1);

    c.d_i = r.count("d_i", c.d_i);
    c.d_f = r.count("d_f", c.d_f);
    c.noise_dim = r.count("noise_dim", c.noise_dim);
    c.d_s = r.count("d_s", c.d_s);
    c.answer_vocab = r.count("answer_vocab", c.answer_vocab);
    c.vocab = r.count("vocab", c.vocab);
    c.embed_dim = r.count("embed_dim", c.embed_dim);
    c.rnn_hidden = r.count("rnn_hidden", c.rnn_hidden);
    c.regions = r.count("regions", c.regions);
    c.g_hidden = r.counts("g_hidden", c.g_hidden);
    c.d_hidden = r.counts("d_hidden", c.d_hidden);
    c.code_dim = r.count("code_dim", c.code_dim);
    c.att_dim = r.count("att_dim", c.att_dim);
    c.att_sketch_dim = r.count("att_sketch_dim", c.att_sketch_dim);

    c.alpha = r.num("alpha", c.alpha);
    c.batch = r.count("batch", c.batch);
    c.steps = r.count("steps", c.steps);
    c.dropout = r.num("dropout", c.dropout);
    c.lambda = r.num("lambda", c.lambda);
    c.disc_noise_start = r.num("disc_noise_start", c.disc_noise_start);
    c.disc_noise_end = r.num("disc_noise_end", c.disc_noise_end);
    c.descent_updates = r.flag("descent_updates", false);
    c.layernorm = r.flag("layernorm", false);

    c.seed = r.count("seed", 1);
    c.dataset_path = r.str("dataset", "");
    r.reject_unknown("run config");
    c.validate();
    return c;
}

data::DatasetConfig dataset_config_from_kv(const KvMap& kv) {
    KvReader r(kv);
    data::DatasetConfig c;
    c.n_records = r.count("n", c.n_records);
    c.d_i = r.count("d_i", c.d_i);
    c.vocab_size = r.count("vocab", c.vocab_size);
    c.answer_vocab = r.count("answer_vocab", c.answer_vocab);
    c.mix_yes_no = r.num("mix_yes_no", c.mix_yes_no);
    c.mix_number = r.num("mix_number", c.mix_number);
    c.mix_other = r.num("mix_other", c.mix_other);
    c.prior_skew = r.num("prior_skew", c.prior_skew);
    c.annotator_agreement = r.num("agreement", c.annotator_agreement);
    c.seed = r.count("seed", c.seed);
    c.regions = r.count("regions", c.regions);
    c.content_classes = r.count("content_classes", c.content_classes);
    c.feature_noise = r.num("feature_noise", c.feature_noise);
    r.reject_unknown("dataset config");
    c.validate();
    return c;
}

RunConfig load_run_config(const std::string& path) {
    RunConfig c = run_config_from_kv(parse_kv_file(path));
    apply_seed_override(c.seed);
    return c;
}

data::DatasetConfig load_dataset_config(const std::string& path) {
    data::DatasetConfig c = dataset_config_from_kv(parse_kv_file(path));
    apply_seed_override(c.seed);
    return c;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw ConfigError("--seeds: expected integers, got '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("--seeds: empty seed list");
    return out;
}

}  // namespace vqalab::app
