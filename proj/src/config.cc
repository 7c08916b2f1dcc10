#include "gfse/config.h"


#include "gfse/graph_io.h"

namespace gfse {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const json& defaults, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!defaults.contains(it.key())) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

template <class V>
void read(const json& j, const char* key, V& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<V>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

}  // namespace

json to_json(const GfseConfig& c) {
  return {{"d", c.d},
          {"layers", c.layers},
          {"heads", c.heads},
          {"hidden", c.hidden},
          {"out_dim", c.out_dim},
          {"embed_dim", c.embed_dim},
          {"motif_k", c.motif_k},
          {"gin_eps", c.gin_eps},
          {"use_mpnn", c.use_mpnn},
          {"use_attention", c.use_attention},
          {"attention_bias", c.attention_bias},
          {"static_edges", c.static_edges},
          {"dtype", c.dtype}};
}

json to_json(const CorpusSpec& c) {
  return {{"families", c.families},
          {"graphs_per_family", c.graphs_per_family},
          {"min_nodes", c.min_nodes},
          {"max_nodes", c.max_nodes},
          {"seed", c.seed}};
}

json to_json(const TrainConfig& c) {
  return {{"model", to_json(c.model)},
          {"corpus", to_json(c.corpus)},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"tau", c.tau},
          {"margin", c.margin},
          {"spd_pairs_per_node", c.spd_pairs_per_node},
          {"gcl_negatives", c.gcl_negatives},
          {"gcl_include_positive", c.gcl_include_positive},
          {"val_fraction", c.val_fraction},
          {"seed", c.seed}};
}

GfseConfig model_config_from_json(const json& j) {
  GfseConfig c;
  reject_unknown(j, to_json(c), "model");
  read(j, "d", c.d, "model");
  read(j, "layers", c.layers, "model");
  read(j, "heads", c.heads, "model");
  read(j, "hidden", c.hidden, "model");
  read(j, "out_dim", c.out_dim, "model");
  read(j, "embed_dim", c.embed_dim, "model");
  read(j, "motif_k", c.motif_k, "model");
  read(j, "gin_eps", c.gin_eps, "model");
  read(j, "use_mpnn", c.use_mpnn, "model");
  read(j, "use_attention", c.use_attention, "model");
  read(j, "attention_bias", c.attention_bias, "model");
  read(j, "static_edges", c.static_edges, "model");
  read(j, "dtype", c.dtype, "model");
  c.validate();
  return c;
}

CorpusSpec corpus_spec_from_json(const json& j) {
  CorpusSpec c;
  reject_unknown(j, to_json(c), "corpus");
  read(j, "families", c.families, "corpus");
  read(j, "graphs_per_family", c.graphs_per_family, "corpus");
  read(j, "min_nodes", c.min_nodes, "corpus");
  read(j, "max_nodes", c.max_nodes, "corpus");
  read(j, "seed", c.seed, "corpus");
  c.validate();
  return c;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  reject_unknown(j, to_json(c), "train");
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("corpus")) c.corpus = corpus_spec_from_json(j.at("corpus"));
  read(j, "lr", c.lr, "train");
  read(j, "batch_size", c.batch_size, "train");
  read(j, "max_epochs", c.max_epochs, "train");
  read(j, "patience", c.patience, "train");
  read(j, "tau", c.tau, "train");
  read(j, "margin", c.margin, "train");
  read(j, "spd_pairs_per_node", c.spd_pairs_per_node, "train");
  read(j, "gcl_negatives", c.gcl_negatives, "train");
  read(j, "gcl_include_positive", c.gcl_include_positive, "train");
  read(j, "val_fraction", c.val_fraction, "train");
  read(j, "seed", c.seed, "train");
  c.validate();
  return c;
}

TrainConfig read_train_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return train_config_from_json(j);
}

void TrainConfig::validate() const {
  model.validate();
  corpus.validate();
  if (!(lr > 0)) throw ConfigError("lr must be positive");
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (patience == 0) throw ConfigError("patience must be positive");
  if (!(tau > 0)) throw ConfigError("tau must be positive");
  if (margin < 0) throw ConfigError("margin must be non-negative");
  if (spd_pairs_per_node == 0) throw ConfigError("spd_pairs_per_node must be positive");
  if (gcl_negatives == 0) throw ConfigError("gcl_negatives must be positive");
  if (!(val_fraction > 0 && val_fraction < 1)) throw ConfigError("val_fraction must lie in (0, 1)");
}

}  // namespace gfse
