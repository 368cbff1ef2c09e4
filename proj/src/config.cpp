#include "stpnrca/config.hpp"

#include <stdexcept>

namespace stpnrca {

using io::json;

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["generator"] = {{"family", c.generator.family},
                    {"anomaly", c.generator.anomaly},
                    {"recipe_file", c.generator.recipe_file},
                    {"recipe_seed", c.generator.recipe_seed},
                    {"train_length", c.generator.train_length},
                    {"test_length", c.generator.test_length},
                    {"burn_in", c.generator.burn_in},
                    {"delay", c.generator.delay},
                    {"out_degree", c.generator.out_degree},
                    {"radius_target", c.generator.radius_target},
                    {"noise_variance", c.generator.noise_variance},
                    {"holdout_per_mode", c.generator.holdout_per_mode}};
  j["stpn"] = {{"alphabet", c.stpn.alphabet},
               {"depth", c.stpn.depth},
               {"window", c.stpn.window},
               {"stride", c.stpn.stride}};
  j["threshold"] = {{"policy", c.threshold.policy},
                    {"global", c.threshold.global},
                    {"min_separation", c.threshold.min_separation}};
  j["rbm"] = {{"n_hidden", c.rbm.n_hidden},
              {"epochs", c.rbm.epochs},
              {"learning_rate", c.rbm.learning_rate},
              {"cd_steps", c.rbm.cd_steps},
              {"batch_size", c.rbm.batch_size},
              {"init_sigma", c.rbm.init_sigma},
              {"seed", c.rbm.seed}};
  j["detect"] = {{"bins", c.detect.bins},
                 {"range_margin", c.detect.range_margin},
                 {"bootstrap", c.detect.bootstrap},
                 {"quantile", c.detect.quantile},
                 {"threshold", c.detect.threshold}};
  j["s3"] = {{"eps_improve", c.s3.eps_improve},
             {"kappa", c.s3.kappa},
             {"budget", c.s3.budget},
             {"batch_mode", c.s3.batch_mode}};
  j["a3"] = {{"k_min", c.a3.corpus.k_min},
             {"k_max", c.a3.corpus.k_max},
             {"clean_fraction", c.a3.corpus.clean_fraction},
             {"samples_per_vector", c.a3.corpus.samples_per_vector},
             {"corpus_seed", c.a3.corpus.seed},
             {"hidden", c.a3.mlp.hidden},
             {"learning_rate", c.a3.mlp.learning_rate},
             {"batch_size", c.a3.mlp.batch_size},
             {"max_epochs", c.a3.mlp.max_epochs},
             {"patience", c.a3.mlp.patience},
             {"validation_fraction", c.a3.mlp.validation_fraction},
             {"seed", c.a3.mlp.seed},
             {"threshold", c.a3.threshold}};
  j["var"] = {{"lag", c.var.lag}, {"ratio", c.var.ratio}};
  j["jobs"] = c.jobs;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.name = j.value("name", c.name);
  c.seed = j.value("seed", c.seed);
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    c.generator.family = g.value("family", c.generator.family);
    c.generator.anomaly = g.value("anomaly", c.generator.anomaly);
    c.generator.recipe_file = g.value("recipe_file", c.generator.recipe_file);
    c.generator.recipe_seed = g.value("recipe_seed", c.generator.recipe_seed);
    c.generator.train_length = g.value("train_length", c.generator.train_length);
    c.generator.test_length = g.value("test_length", c.generator.test_length);
    c.generator.burn_in = g.value("burn_in", c.generator.burn_in);
    c.generator.delay = g.value("delay", c.generator.delay);
    c.generator.out_degree = g.value("out_degree", c.generator.out_degree);
    c.generator.radius_target = g.value("radius_target", c.generator.radius_target);
    c.generator.noise_variance = g.value("noise_variance", c.generator.noise_variance);
    c.generator.holdout_per_mode = g.value("holdout_per_mode", c.generator.holdout_per_mode);
  }
  if (j.contains("stpn")) {
    const auto& s = j.at("stpn");
    c.stpn.alphabet = s.value("alphabet", c.stpn.alphabet);
    c.stpn.depth = s.value("depth", c.stpn.depth);
    c.stpn.window = s.value("window", c.stpn.window);
    c.stpn.stride = s.value("stride", c.stpn.stride);
  }
  if (j.contains("threshold")) {
    const auto& t = j.at("threshold");
    c.threshold.policy = t.value("policy", c.threshold.policy);
    c.threshold.global = t.value("global", c.threshold.global);
    c.threshold.min_separation = t.value("min_separation", c.threshold.min_separation);
  }
  if (j.contains("rbm")) {
    const auto& r = j.at("rbm");
    c.rbm.n_hidden = r.value("n_hidden", c.rbm.n_hidden);
    c.rbm.epochs = r.value("epochs", c.rbm.epochs);
    c.rbm.learning_rate = r.value("learning_rate", c.rbm.learning_rate);
    c.rbm.cd_steps = r.value("cd_steps", c.rbm.cd_steps);
    c.rbm.batch_size = r.value("batch_size", c.rbm.batch_size);
    c.rbm.init_sigma = r.value("init_sigma", c.rbm.init_sigma);
    c.rbm.seed = r.value("seed", c.rbm.seed);
  }
  if (j.contains("detect")) {
    const auto& d = j.at("detect");
    c.detect.bins = d.value("bins", c.detect.bins);
    c.detect.range_margin = d.value("range_margin", c.detect.range_margin);
    c.detect.bootstrap = d.value("bootstrap", c.detect.bootstrap);
    c.detect.quantile = d.value("quantile", c.detect.quantile);
    c.detect.threshold = d.value("threshold", c.detect.threshold);
  }
  if (j.contains("s3")) {
    const auto& s = j.at("s3");
    c.s3.eps_improve = s.value("eps_improve", c.s3.eps_improve);
    c.s3.kappa = s.value("kappa", c.s3.kappa);
    c.s3.budget = s.value("budget", c.s3.budget);
    c.s3.batch_mode = s.value("batch_mode", c.s3.batch_mode);
  }
  if (j.contains("a3")) {
    const auto& a = j.at("a3");
    c.a3.corpus.k_min = a.value("k_min", c.a3.corpus.k_min);
    c.a3.corpus.k_max = a.value("k_max", c.a3.corpus.k_max);
    c.a3.corpus.clean_fraction = a.value("clean_fraction", c.a3.corpus.clean_fraction);
    c.a3.corpus.samples_per_vector =
        a.value("samples_per_vector", c.a3.corpus.samples_per_vector);
    c.a3.corpus.seed = a.value("corpus_seed", c.a3.corpus.seed);
    c.a3.mlp.hidden = a.value("hidden", c.a3.mlp.hidden);
    c.a3.mlp.learning_rate = a.value("learning_rate", c.a3.mlp.learning_rate);
    c.a3.mlp.batch_size = a.value("batch_size", c.a3.mlp.batch_size);
    c.a3.mlp.max_epochs = a.value("max_epochs", c.a3.mlp.max_epochs);
    c.a3.mlp.patience = a.value("patience", c.a3.mlp.patience);
    c.a3.mlp.validation_fraction = a.value("validation_fraction", c.a3.mlp.validation_fraction);
    c.a3.mlp.seed = a.value("seed", c.a3.mlp.seed);
    c.a3.threshold = a.value("threshold", c.a3.threshold);
  }
  if (j.contains("var")) {
    const auto& v = j.at("var");
    c.var.lag = v.value("lag", c.var.lag);
    c.var.ratio = v.value("ratio", c.var.ratio);
  }
  c.jobs = j.value("jobs", c.jobs);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return config_from_json(io::read_json(path));
}

std::string config_hash(const ExperimentConfig& config) {
  return io::hash_hex(config_to_json(config).dump());
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  if (name == "table1") {
    c.generator.family = "5node";
    c.generator.anomaly = "pattern-break";
    c.rbm.epochs = 120;
    c.rbm.seed = 21;
    c.a3.mlp.hidden = {64, 64, 64};
    c.a3.mlp.max_epochs = 60;
    c.a3.mlp.patience = 8;
    return c;
  }
  if (name == "table2-5node") {
    c.generator.family = "5node";
    c.generator.anomaly = "node-delay";
    c.generator.delay = 50;
    c.rbm.epochs = 120;
    c.s3.batch_mode = true;
    return c;
  }
  if (name == "table2-30node") {
    c.generator.family = "30node";
    c.generator.anomaly = "node-delay";
    c.generator.delay = 50;
    c.rbm.n_hidden = 256;
    c.rbm.epochs = 80;
    c.s3.batch_mode = true;
    return c;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace stpnrca
