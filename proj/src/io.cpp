#include "stpnrca/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stpnrca/eval.hpp"

namespace stpnrca::io {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
    out.close();
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json_atomic(const fs::path& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

json read_json(const fs::path& path) { return json::parse(read_text(path)); }

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& text) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.size();
  const auto cols = rows ? j.at(0).size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j.at(i).at(c).get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

void write_series_csv(const fs::path& path, const Eigen::MatrixXd& series) {
  std::ostringstream out;
  out << "t";
  for (Eigen::Index c = 0; c < series.cols(); ++c) out << ",x" << (c + 1);
  out << "\n";
  for (Eigen::Index t = 0; t < series.rows(); ++t) {
    out << t;
    for (Eigen::Index c = 0; c < series.cols(); ++c) {
      out << ',' << format_double(series(t, c));
    }
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

Eigen::MatrixXd read_series_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty series file: " + path.string());
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ','));

  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // drop the time index
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    ++rows;
  }
  if (values.size() != static_cast<std::size_t>(rows * cols)) {
    throw std::runtime_error("ragged series file: " + path.string());
  }
  Eigen::MatrixXd series(rows, cols);
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      series(t, c) = values[static_cast<std::size_t>(t * cols + c)];
    }
  }
  return series;
}

json var_model_to_json(const VarModel& model) {
  json j;
  j["n"] = model.n;
  j["p"] = model.p;
  json lags = json::array();
  for (const auto& a : model.A) lags.push_back(matrix_to_json(a));
  j["A"] = std::move(lags);
  j["noise_cov"] = matrix_to_json(model.noise_cov);
  j["seed"] = model.seed;
  return j;
}

VarModel var_model_from_json(const json& j) {
  VarModel model;
  model.n = j.at("n").get<int>();
  model.p = j.at("p").get<int>();
  for (const auto& a : j.at("A")) model.A.push_back(matrix_from_json(a));
  model.noise_cov = matrix_from_json(j.at("noise_cov"));
  model.seed = j.at("seed").get<std::uint64_t>();
  return model;
}

namespace {

json edges_to_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back(json::array({e.from, e.to}));
  return out;
}

std::vector<Edge> edges_from_json(const json& j) {
  std::vector<Edge> out;
  for (const auto& e : j) out.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  return out;
}

const char* anomaly_kind_name(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::pattern_break: return "pattern-break";
    case AnomalyKind::node_delay: return "node-delay";
    default: return "none";
  }
}

AnomalyKind anomaly_kind_parse(const std::string& name) {
  if (name == "pattern-break") return AnomalyKind::pattern_break;
  if (name == "node-delay") return AnomalyKind::node_delay;
  return AnomalyKind::none;
}

}  // namespace

void save_dataset(const fs::path& dir, const SyntheticDataset& ds,
                  const std::string& config_hash) {
  fs::create_directories(dir);
  write_series_csv(dir / "series.csv", ds.series);

  json meta;
  meta["model"] = var_model_to_json(ds.meta.model);
  meta["anomaly"] = {{"kind", anomaly_kind_name(ds.meta.anomaly.kind)},
                     {"broken_patterns", edges_to_json(ds.meta.anomaly.broken_patterns)},
                     {"node", ds.meta.anomaly.node},
                     {"delay", ds.meta.anomaly.delay}};
  meta["seed"] = ds.meta.seed;
  meta["burn_in"] = ds.meta.burn_in;
  meta["mode_id"] = ds.meta.mode_id;
  meta["truth"] = {{"anomalous_patterns", edges_to_json(ds.truth.anomalous_patterns)},
                   {"fault_node", ds.truth.fault_node}};
  if (!config_hash.empty()) meta["config_hash"] = config_hash;
  write_json_atomic(dir / "meta.json", meta);
}

SyntheticDataset load_dataset(const fs::path& dir) {
  SyntheticDataset ds;
  ds.series = read_series_csv(dir / "series.csv");
  const json meta = read_json(dir / "meta.json");
  ds.meta.model = var_model_from_json(meta.at("model"));
  const auto& anomaly = meta.at("anomaly");
  ds.meta.anomaly.kind = anomaly_kind_parse(anomaly.at("kind").get<std::string>());
  ds.meta.anomaly.broken_patterns = edges_from_json(anomaly.at("broken_patterns"));
  ds.meta.anomaly.node = anomaly.at("node").get<int>();
  ds.meta.anomaly.delay = anomaly.at("delay").get<int>();
  ds.meta.seed = meta.at("seed").get<std::uint64_t>();
  ds.meta.burn_in = meta.at("burn_in").get<int>();
  ds.meta.mode_id = meta.at("mode_id").get<std::string>();
  ds.truth.anomalous_patterns = edges_from_json(meta.at("truth").at("anomalous_patterns"));
  ds.truth.fault_node = meta.at("truth").at("fault_node").get<int>();
  return ds;
}

void save_recipes(const fs::path& path, const std::vector<GraphMode>& modes) {
  json out;
  out["modes"] = json::array();
  for (const GraphMode& mode : modes) {
    json m;
    m["mode_id"] = mode.mode_id;
    m["n"] = mode.model.n;
    m["p"] = mode.model.p;
    m["seed"] = mode.model.seed;
    m["noise_cov"] = matrix_to_json(mode.model.noise_cov);
    json edges = json::array();
    for (const Edge& e : mode.edges) {
      json coef = json::array();
      for (const auto& a : mode.model.A) coef.push_back(a(e.to, e.from));
      edges.push_back({{"from", e.from}, {"to", e.to}, {"coef", std::move(coef)}});
    }
    m["edges"] = std::move(edges);
    out["modes"].push_back(std::move(m));
  }
  write_json_atomic(path, out);
}

std::vector<GraphMode> load_recipes(const fs::path& path) {
  const json in = read_json(path);
  std::vector<GraphMode> modes;
  for (const auto& m : in.at("modes")) {
    GraphMode mode;
    mode.mode_id = m.at("mode_id").get<std::string>();
    mode.model.n = m.at("n").get<int>();
    mode.model.p = m.at("p").get<int>();
    mode.model.seed = m.value("seed", std::uint64_t{0});
    mode.model.noise_cov = matrix_from_json(m.at("noise_cov"));
    mode.model.A.assign(static_cast<std::size_t>(mode.model.p),
                        Eigen::MatrixXd::Zero(mode.model.n, mode.model.n));
    for (const auto& e : m.at("edges")) {
      Edge edge{e.at("from").get<int>(), e.at("to").get<int>()};
      mode.edges.push_back(edge);
      const auto& coef = e.at("coef");
      for (std::size_t k = 0; k < coef.size(); ++k) {
        mode.model.A[k](edge.to, edge.from) = coef.at(k).get<double>();
      }
    }
    modes.push_back(std::move(mode));
  }
  return modes;
}

namespace {

json scheme_to_json(const PartitionScheme& s) {
  return {{"kind", s.kind == PartitionKind::mep ? "mep" : "uniform"},
          {"alphabet", s.alphabet},
          {"boundaries", s.boundaries}};
}

PartitionScheme scheme_from_json(const json& j) {
  PartitionScheme s;
  s.kind = j.at("kind").get<std::string>() == "mep" ? PartitionKind::mep : PartitionKind::uniform;
  s.alphabet = j.at("alphabet").get<int>();
  s.boundaries = j.at("boundaries").get<std::vector<double>>();
  return s;
}

}  // namespace

void save_features(const fs::path& path, const FeatureFile& file) {
  json j;
  j["header"] = {{"alphabet", file.config.alphabet},
                 {"depth", file.config.depth},
                 {"window", file.config.window},
                 {"stride", file.config.stride},
                 {"flattening", "source-major"},
                 {"thresholds", matrix_to_json(file.thresholds)}};
  json schemes = json::array();
  for (const auto& s : file.schemes) schemes.push_back(scheme_to_json(s));
  j["header"]["schemes"] = std::move(schemes);
  if (!file.config_hash.empty()) j["header"]["config_hash"] = file.config_hash;

  json windows = json::array();
  for (std::size_t w = 0; w < file.graphs.size(); ++w) {
    json entry;
    entry["window_start"] = file.graphs[w].window_start;
    entry["window_len"] = file.graphs[w].window_len;
    entry["lambda"] = matrix_to_json(file.graphs[w].lambda);
    json bits = json::array();
    for (std::uint8_t b : file.bits[w].bits) bits.push_back(static_cast<int>(b));
    entry["bits"] = std::move(bits);
    windows.push_back(std::move(entry));
  }
  j["windows"] = std::move(windows);
  write_json_atomic(path, j);
}

FeatureFile load_features(const fs::path& path) {
  const json j = read_json(path);
  FeatureFile file;
  const auto& header = j.at("header");
  file.config.alphabet = header.at("alphabet").get<int>();
  file.config.depth = header.at("depth").get<int>();
  file.config.window = header.at("window").get<int>();
  file.config.stride = header.at("stride").get<int>();
  file.thresholds = matrix_from_json(header.at("thresholds"));
  for (const auto& s : header.at("schemes")) file.schemes.push_back(scheme_from_json(s));
  file.config_hash = header.value("config_hash", "");

  for (const auto& entry : j.at("windows")) {
    PatternGraph g;
    g.window_start = entry.at("window_start").get<int>();
    g.window_len = entry.at("window_len").get<int>();
    g.lambda = matrix_from_json(entry.at("lambda"));
    BinaryPatternVector v;
    v.window_start = g.window_start;
    v.window_len = g.window_len;
    for (const auto& b : entry.at("bits")) {
      v.bits.push_back(static_cast<std::uint8_t>(b.get<int>()));
    }
    file.graphs.push_back(std::move(g));
    file.bits.push_back(std::move(v));
  }
  return file;
}

namespace {

json histogram_to_json(const Histogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}};
}

Histogram histogram_from_json(const json& j) {
  Histogram h;
  h.edges = j.at("edges").get<std::vector<double>>();
  h.counts = j.at("counts").get<std::vector<double>>();
  return h;
}

}  // namespace

void save_rbm(const fs::path& path, const RbmModel& model, const FreeEnergyReference& reference,
              const std::string& config_hash) {
  json j;
  j["n_visible"] = model.n_visible;
  j["n_hidden"] = model.n_hidden;
  json w = json::array();  // row-major
  for (Eigen::Index r = 0; r < model.w.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.w.cols(); ++c) w.push_back(model.w(r, c));
  }
  j["W"] = std::move(w);
  j["b"] = vector_to_json(model.b);
  j["c"] = vector_to_json(model.c);
  j["training"] = {{"epochs", model.train_config.epochs},
                   {"learning_rate", model.train_config.learning_rate},
                   {"cd_steps", model.train_config.cd_steps},
                   {"batch_size", model.train_config.batch_size},
                   {"init_sigma", model.train_config.init_sigma},
                   {"seed", model.train_config.seed},
                   {"final_recon_error", model.final_recon_error}};
  j["reference"] = {{"mode_ids", reference.mode_ids},
                    {"mode_mean", reference.mode_mean},
                    {"mode_std", reference.mode_std},
                    {"f_tilde", reference.f_tilde},
                    {"sigma", reference.sigma},
                    {"pooled_mean", reference.pooled_mean},
                    {"hist", histogram_to_json(reference.hist)},
                    {"kld_threshold", reference.kld_threshold}};
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  write_json_atomic(path, j);
}

std::pair<RbmModel, FreeEnergyReference> load_rbm(const fs::path& path) {
  const json j = read_json(path);
  RbmModel model;
  model.n_visible = j.at("n_visible").get<int>();
  model.n_hidden = j.at("n_hidden").get<int>();
  model.w.resize(model.n_hidden, model.n_visible);
  const auto& w = j.at("W");
  for (Eigen::Index r = 0; r < model.w.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.w.cols(); ++c) {
      model.w(r, c) = w.at(static_cast<std::size_t>(r * model.w.cols() + c)).get<double>();
    }
  }
  model.b = vector_from_json(j.at("b"));
  model.c = vector_from_json(j.at("c"));
  const auto& tr = j.at("training");
  model.train_config.epochs = tr.at("epochs").get<int>();
  model.train_config.learning_rate = tr.at("learning_rate").get<double>();
  model.train_config.cd_steps = tr.at("cd_steps").get<int>();
  model.train_config.batch_size = tr.at("batch_size").get<int>();
  model.train_config.init_sigma = tr.at("init_sigma").get<double>();
  model.train_config.seed = tr.at("seed").get<std::uint64_t>();
  model.train_config.n_hidden = model.n_hidden;
  model.final_recon_error = tr.at("final_recon_error").get<double>();

  FreeEnergyReference ref;
  const auto& r = j.at("reference");
  ref.mode_ids = r.at("mode_ids").get<std::vector<std::string>>();
  ref.mode_mean = r.at("mode_mean").get<std::vector<double>>();
  ref.mode_std = r.at("mode_std").get<std::vector<double>>();
  ref.f_tilde = r.at("f_tilde").get<double>();
  ref.sigma = r.at("sigma").get<double>();
  ref.pooled_mean = r.value("pooled_mean", 0.0);
  ref.hist = histogram_from_json(r.at("hist"));
  ref.kld_threshold = r.at("kld_threshold").get<double>();
  return {std::move(model), std::move(ref)};
}

void save_mlp(const fs::path& path, const MlpModel& model, const std::string& config_hash) {
  json j;
  j["layers"] = model.layer_sizes;
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    json w = json::array();
    for (Eigen::Index r = 0; r < model.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < model.weights[l].cols(); ++c) {
        w.push_back(model.weights[l](r, c));
      }
    }
    weights.push_back(std::move(w));
    biases.push_back(vector_to_json(model.biases[l]));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["training"] = {{"learning_rate", model.train_config.learning_rate},
                   {"batch_size", model.train_config.batch_size},
                   {"max_epochs", model.train_config.max_epochs},
                   {"patience", model.train_config.patience},
                   {"validation_fraction", model.train_config.validation_fraction},
                   {"seed", model.train_config.seed},
                   {"best_validation_loss", model.best_validation_loss},
                   {"best_epoch", model.best_epoch},
                   {"epochs_run", model.epochs_run}};
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  write_json_atomic(path, j);
}

MlpModel load_mlp(const fs::path& path) {
  const json j = read_json(path);
  MlpModel model;
  model.layer_sizes = j.at("layers").get<std::vector<int>>();
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    const auto rows = static_cast<Eigen::Index>(model.layer_sizes[l + 1]);
    const auto cols = static_cast<Eigen::Index>(model.layer_sizes[l]);
    Eigen::MatrixXd w(rows, cols);
    const auto& flat = weights.at(l);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        w(r, c) = flat.at(static_cast<std::size_t>(r * cols + c)).get<double>();
      }
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(vector_from_json(biases.at(l)));
    model.train_config.hidden.assign(model.layer_sizes.begin() + 1, model.layer_sizes.end() - 1);
  }
  const auto& tr = j.at("training");
  model.train_config.learning_rate = tr.at("learning_rate").get<double>();
  model.train_config.batch_size = tr.at("batch_size").get<int>();
  model.train_config.max_epochs = tr.at("max_epochs").get<int>();
  model.train_config.patience = tr.at("patience").get<int>();
  model.train_config.validation_fraction = tr.at("validation_fraction").get<double>();
  model.train_config.seed = tr.at("seed").get<std::uint64_t>();
  model.best_validation_loss = tr.at("best_validation_loss").get<double>();
  model.best_epoch = tr.at("best_epoch").get<int>();
  model.epochs_run = tr.at("epochs_run").get<int>();
  return model;
}

void save_corpus(const fs::path& path, const FlipCorpus& corpus) {
  std::ostringstream out(std::ios::binary);
  const char magic[8] = {'A', '3', 'C', 'O', 'R', 'P', '0', '1'};
  out.write(magic, 8);
  const auto put_u64 = [&out](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  put_u64(static_cast<std::uint64_t>(corpus.width));
  put_u64(static_cast<std::uint64_t>(corpus.inputs.rows()));
  put_u64(corpus.config.seed);
  put_u64(static_cast<std::uint64_t>(corpus.config.k_min));
  put_u64(static_cast<std::uint64_t>(corpus.config.k_max));
  put_u64(static_cast<std::uint64_t>(corpus.config.samples_per_vector));
  const std::string frac = format_double(corpus.config.clean_fraction);
  put_u64(frac.size());
  out.write(frac.data(), static_cast<std::streamsize>(frac.size()));
  for (Eigen::Index s = 0; s < corpus.inputs.rows(); ++s) {
    for (Eigen::Index i = 0; i < corpus.inputs.cols(); ++i) {
      out.put(static_cast<char>(corpus.inputs(s, i)));
    }
  }
  for (Eigen::Index s = 0; s < corpus.labels.rows(); ++s) {
    for (Eigen::Index i = 0; i < corpus.labels.cols(); ++i) {
      out.put(static_cast<char>(corpus.labels(s, i)));
    }
  }
  write_text_atomic(path, out.str());
}

FlipCorpus load_corpus(const fs::path& path) {
  const std::string data = read_text(path);
  std::size_t pos = 0;
  const auto need = [&](std::size_t nbytes) {
    if (pos + nbytes > data.size()) throw std::runtime_error("corpus file truncated");
  };
  need(8);
  if (data.compare(0, 8, "A3CORP01") != 0) throw std::runtime_error("bad corpus magic");
  pos = 8;
  const auto get_u64 = [&]() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos + static_cast<std::size_t>(i)]))
           << (8 * i);
    }
    pos += 8;
    return v;
  };
  FlipCorpus corpus;
  corpus.width = static_cast<int>(get_u64());
  const auto count = static_cast<Eigen::Index>(get_u64());
  corpus.config.seed = get_u64();
  corpus.config.k_min = static_cast<int>(get_u64());
  corpus.config.k_max = static_cast<int>(get_u64());
  corpus.config.samples_per_vector = static_cast<int>(get_u64());
  const auto frac_len = get_u64();
  need(frac_len);
  corpus.config.clean_fraction = std::stod(data.substr(pos, frac_len));
  pos += frac_len;

  corpus.inputs.resize(count, corpus.width);
  corpus.labels.resize(count, corpus.width);
  const auto total = static_cast<std::size_t>(count) * static_cast<std::size_t>(corpus.width);
  need(2 * total);
  for (Eigen::Index s = 0; s < count; ++s) {
    for (Eigen::Index i = 0; i < corpus.width; ++i) {
      corpus.inputs(s, i) = static_cast<std::uint8_t>(data[pos++]);
    }
  }
  for (Eigen::Index s = 0; s < count; ++s) {
    for (Eigen::Index i = 0; i < corpus.width; ++i) {
      corpus.labels(s, i) = static_cast<std::uint8_t>(data[pos++]);
    }
  }
  return corpus;
}

void save_var_fit(const fs::path& path, const VarFit& fit, const std::string& config_hash) {
  json j;
  j["n"] = fit.n;
  j["p"] = fit.p;
  json lags = json::array();
  for (const auto& a : fit.A) lags.push_back(matrix_to_json(a));
  j["A"] = std::move(lags);
  j["intercept"] = vector_to_json(fit.intercept);
  j["resid_cov"] = matrix_to_json(fit.resid_cov);
  j["sample_count"] = fit.sample_count;
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  write_json_atomic(path, j);
}

VarFit load_var_fit(const fs::path& path) {
  const json j = read_json(path);
  VarFit fit;
  fit.n = j.at("n").get<int>();
  fit.p = j.at("p").get<int>();
  for (const auto& a : j.at("A")) fit.A.push_back(matrix_from_json(a));
  fit.intercept = vector_from_json(j.at("intercept"));
  fit.resid_cov = matrix_from_json(j.at("resid_cov"));
  fit.sample_count = j.at("sample_count").get<long>();
  return fit;
}

json report_to_json(const RootCauseReport& report, int n, int window_id,
                    const std::string& method) {
  json flips = json::array();
  for (const FlipStep& step : report.flips) {
    const Edge e = pattern_of_index(step.pattern, n);
    flips.push_back({{"pattern", json::array({e.from, e.to})}, {"deltaF", step.delta_f}});
  }
  return {{"method", method},
          {"window", window_id},
          {"flips", std::move(flips)},
          {"F_start", report.f_start},
          {"F_end", report.f_end},
          {"F_tilde", report.f_tilde},
          {"stopped_by", report.stopped_by}};
}

}  // namespace stpnrca::io
