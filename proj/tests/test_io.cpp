#include <doctest.h>

#include <filesystem>

#include "stpnrca/io.hpp"
#include "stpnrca/rng.hpp"

using namespace stpnrca;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("stpnrca_io_" + std::to_string(Rng(std::random_device{}()).raw()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("series csv round trip") {
  TempDir tmp;
  Rng rng(1);
  Eigen::MatrixXd series(37, 4);
  for (Eigen::Index t = 0; t < series.rows(); ++t) {
    for (Eigen::Index c = 0; c < series.cols(); ++c) series(t, c) = rng.gaussian() * 1e3;
  }
  series(5, 2) = 1e-17;  // tiny magnitudes survive
  io::write_series_csv(tmp.path / "series.csv", series);
  const Eigen::MatrixXd back = io::read_series_csv(tmp.path / "series.csv");
  CHECK(back == series);  // shortest round-trip text is exact

  const std::string text = io::read_text(tmp.path / "series.csv");
  CHECK(text.rfind("t,x1,x2,x3,x4\n", 0) == 0);
}

TEST_CASE("dataset round trip") {
  TempDir tmp;
  const auto modes = build_five_node_modes(2);
  SyntheticDataset ds = simulate_var(modes[0].model, 120, 60, 5);
  ds.meta.mode_id = modes[0].mode_id;
  ds.meta.anomaly.kind = AnomalyKind::pattern_break;
  ds.meta.anomaly.broken_patterns = {{0, 1}};
  ds.truth.anomalous_patterns = {{0, 1}};
  io::save_dataset(tmp.path / "d", ds, "deadbeef");

  const SyntheticDataset back = io::load_dataset(tmp.path / "d");
  CHECK(back.series == ds.series);
  CHECK(back.meta.mode_id == "mode1");
  CHECK(back.meta.seed == 5);
  CHECK(back.meta.burn_in == 60);
  CHECK(back.meta.anomaly.kind == AnomalyKind::pattern_break);
  REQUIRE(back.truth.anomalous_patterns.size() == 1);
  CHECK(back.truth.anomalous_patterns[0] == Edge{0, 1});
  for (int k = 0; k < 2; ++k) CHECK(back.meta.model.A[k] == ds.meta.model.A[k]);
}

TEST_CASE("recipes round trip") {
  TempDir tmp;
  const auto modes = build_five_node_modes(3);
  io::save_recipes(tmp.path / "recipes.json", modes);
  const auto back = io::load_recipes(tmp.path / "recipes.json");
  REQUIRE(back.size() == modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    CHECK(back[m].mode_id == modes[m].mode_id);
    CHECK(back[m].edges == modes[m].edges);
    for (int k = 0; k < modes[m].model.p; ++k) {
      CHECK(back[m].model.A[k] == modes[m].model.A[k]);
    }
  }
}

TEST_CASE("rbm model round trip") {
  TempDir tmp;
  Rng rng(4);
  Eigen::MatrixXd data(20, 6);
  for (Eigen::Index r = 0; r < 20; ++r) {
    for (Eigen::Index c = 0; c < 6; ++c) data(r, c) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  RbmTrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 7;
  const RbmModel model = train_rbm(data, cfg);
  FreeEnergyReference ref = nominal_reference(model, data, {});
  ref.kld_threshold = 0.123;
  io::save_rbm(tmp.path / "rbm.json", model, ref, "cafe");

  const auto [back, back_ref] = io::load_rbm(tmp.path / "rbm.json");
  CHECK(back.w == model.w);
  CHECK(back.b == model.b);
  CHECK(back.c == model.c);
  CHECK(back_ref.f_tilde == ref.f_tilde);
  CHECK(back_ref.hist.edges == ref.hist.edges);
  CHECK(back_ref.hist.counts == ref.hist.counts);
  CHECK(back_ref.kld_threshold == 0.123);
  CHECK(back_ref.pooled_mean == ref.pooled_mean);
}

TEST_CASE("mlp model round trip") {
  TempDir tmp;
  Rng rng(5);
  Eigen::MatrixXd nominal(4, 5);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 5; ++c) nominal(r, c) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  FlipCorpusConfig ccfg;
  ccfg.samples_per_vector = 10;
  const FlipCorpus corpus = generate_flip_corpus(nominal, ccfg);
  MlpConfig mcfg;
  mcfg.hidden = {7};
  mcfg.max_epochs = 3;
  const MlpModel model = train_mlp(corpus, mcfg);
  io::save_mlp(tmp.path / "mlp.json", model);

  const MlpModel back = io::load_mlp(tmp.path / "mlp.json");
  CHECK(back.layer_sizes == model.layer_sizes);
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    CHECK(back.weights[l] == model.weights[l]);
    CHECK(back.biases[l] == model.biases[l]);
  }
  // loaded model computes identical outputs
  Eigen::VectorXd v(5);
  for (int i = 0; i < 5; ++i) v(i) = i % 2;
  CHECK(mlp_forward(back, v) == mlp_forward(model, v));
}

TEST_CASE("corpus binary round trip") {
  TempDir tmp;
  Rng rng(6);
  Eigen::MatrixXd nominal(6, 9);
  for (Eigen::Index r = 0; r < 6; ++r) {
    for (Eigen::Index c = 0; c < 9; ++c) nominal(r, c) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  FlipCorpusConfig cfg;
  cfg.samples_per_vector = 12;
  cfg.clean_fraction = 0.375;
  cfg.seed = 99;
  const FlipCorpus corpus = generate_flip_corpus(nominal, cfg);
  io::save_corpus(tmp.path / "corpus.bin", corpus);

  const FlipCorpus back = io::load_corpus(tmp.path / "corpus.bin");
  CHECK(back.width == corpus.width);
  CHECK(back.inputs == corpus.inputs);
  CHECK(back.labels == corpus.labels);
  CHECK(back.config.seed == 99);
  CHECK(back.config.clean_fraction == 0.375);
}

TEST_CASE("var fit round trip") {
  TempDir tmp;
  const auto modes = build_five_node_modes(7);
  const SyntheticDataset ds = simulate_var(modes[0].model, 2000, 200, 8);
  const VarFit fit = fit_var(ds.series, 2);
  io::save_var_fit(tmp.path / "fit.json", fit);
  const VarFit back = io::load_var_fit(tmp.path / "fit.json");
  CHECK(back.n == fit.n);
  CHECK(back.p == fit.p);
  for (int k = 0; k < 2; ++k) CHECK(back.A[k] == fit.A[k]);
  CHECK(back.resid_cov == fit.resid_cov);
  CHECK(back.sample_count == fit.sample_count);
}

TEST_CASE("feature file round trip") {
  TempDir tmp;
  const auto modes = build_five_node_modes(9);
  const SyntheticDataset ds = simulate_var(modes[0].model, 800, 200, 9);
  const auto schemes = fit_partitions(ds.series, 3, PartitionKind::mep);
  StpnConfig cfg;
  io::FeatureFile file;
  file.config = cfg;
  file.schemes = schemes;
  file.thresholds = Eigen::MatrixXd::Constant(5, 5, 0.1);
  file.graphs = extract_windows(ds.series, schemes, cfg);
  for (const auto& g : file.graphs) file.bits.push_back(binarize(g, file.thresholds));
  file.config_hash = "beef";
  io::save_features(tmp.path / "features.json", file);

  const io::FeatureFile back = io::load_features(tmp.path / "features.json");
  CHECK(back.config.window == cfg.window);
  CHECK(back.thresholds == file.thresholds);
  REQUIRE(back.graphs.size() == file.graphs.size());
  for (std::size_t w = 0; w < file.graphs.size(); ++w) {
    CHECK(back.graphs[w].lambda == file.graphs[w].lambda);
    CHECK(back.bits[w].bits == file.bits[w].bits);
    CHECK(back.graphs[w].window_start == file.graphs[w].window_start);
  }
  CHECK(back.schemes.size() == 5);
  CHECK(back.schemes[0].boundaries == schemes[0].boundaries);
}

TEST_CASE("report json shape") {
  RootCauseReport report;
  report.f_start = -1.0;
  report.f_end = -5.0;
  report.f_tilde = -5.5;
  report.stopped_by = "no_improving_flip";
  report.flips = {{7, 2.5}, {0, 1.5}};
  const io::json j = io::report_to_json(report, 3, 4);
  CHECK(j.at("window") == 4);
  CHECK(j.at("F_start") == -1.0);
  CHECK(j.at("F_end") == -5.0);
  CHECK(j.at("F_tilde") == -5.5);
  CHECK(j.at("stopped_by") == "no_improving_flip");
  REQUIRE(j.at("flips").size() == 2);
  CHECK(j.at("flips").at(0).at("pattern") == io::json::array({2, 1}));  // 7 = 2*3+1
  CHECK(j.at("flips").at(0).at("deltaF") == 2.5);
}

TEST_CASE("atomic writes leave no partial files") {
  TempDir tmp;
  io::write_text_atomic(tmp.path / "a.txt", "hello");
  CHECK(io::read_text(tmp.path / "a.txt") == "hello");
  CHECK_FALSE(fs::exists(tmp.path / "a.txt.tmp"));
}

TEST_CASE("hashing is stable") {
  CHECK(io::fnv1a("") == 14695981039346656037ULL);
  CHECK(io::hash_hex("abc") == io::hash_hex("abc"));
  CHECK(io::hash_hex("abc") != io::hash_hex("abd"));
}
