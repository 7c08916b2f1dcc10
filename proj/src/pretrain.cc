#include "gfse/pretrain.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <type_traits>

#include <json.hpp>

#include "gfse/graph_io.h"
#include "gfse/rng.h"

namespace gfse {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSplitStream = 0x5b117;
constexpr std::uint64_t kEvalStream = 0xe7a1;
constexpr std::uint64_t kEpochStream = 0xe90c;
constexpr const char* kTaskNames[kNumTasks] = {"spd", "mc", "cd", "gcl"};

template <class T>
std::vector<double> values(const ad::Tensor<T>& t) {
  return {t.data().begin(), t.data().end()};
}

template <class T>
ad::Tensor<T> mean_of(const std::vector<ad::Tensor<T>>& xs) {
  std::vector<ad::Tensor<T>> rows;
  for (const auto& x : xs) rows.push_back(ad::reshape(x, {1, 1}));
  return ad::scale(ad::sum(ad::concat_rows(rows)), T(1) / static_cast<T>(xs.size()));
}

struct GraphSample {
  PairList spd_pairs;
  std::vector<double> spd_targets;
  CdPairs cd_pairs;
};

GraphSample sample_graph(const CorpusGraph& g, const TrainConfig& cfg, std::mt19937_64& rng) {
  GraphSample s;
  s.spd_pairs = sample_spd_pairs(g.labels.spd, cfg.spd_pairs_per_node * g.graph.num_nodes(), rng);
  s.spd_targets = spd_targets(g.labels.spd, s.spd_pairs);
  s.cd_pairs = sample_cd_pairs(g.labels.community, rng);
  return s;
}

template <class T>
struct GraphLosses {
  ad::Tensor<T> out, spd, mc, cd, z_graph;
};

template <class T>
GraphLosses<T> graph_losses(const GfseModel<T>& model, const typename GfseModel<T>::Bound& b,
                            const TrainConfig& cfg, const CorpusGraph& g, const GraphTensors& gt,
                            std::mt19937_64& rng) {
  auto s = sample_graph(g, cfg, rng);
  GraphLosses<T> l;
  l.out = model.forward(b, gt);
  l.spd = loss_spd(model.spd_head(b, l.out, s.spd_pairs.i, s.spd_pairs.j), s.spd_targets);
  l.mc = loss_motif(model.motif_head(b, l.out), g.labels.motif);
  l.cd = loss_cd(model.cd_embed(b, l.out), s.cd_pairs, cfg.margin);
  l.z_graph = model.gcl_embed(b, l.out);
  return l;
}

GclOptions gcl_options(const TrainConfig& cfg) {
  return {cfg.tau, cfg.gcl_negatives, cfg.gcl_include_positive};
}

template <class T>
std::array<double, kNumTasks> sigma2_of(const GfseModel<T>& model) {
  std::array<double, kNumTasks> out{};
  const auto& s = model.params().at("unc.s").value;
  for (std::size_t t = 0; t < kNumTasks; ++t) out[t] = std::exp(static_cast<double>(s[t]));
  return out;
}

void check_losses(const std::array<double, kNumTasks>& l, bool gcl_nonneg, const std::string& where) {
  for (std::size_t t = 0; t < kNumTasks; ++t) {
    if (!std::isfinite(l[t])) throw TrainError(where + ": " + kTaskNames[t] + " loss is not finite");
    if (l[t] < 0 && (t != kTaskGcl || gcl_nonneg))
      throw TrainError(where + ": " + kTaskNames[t] + " loss is negative (" + std::to_string(l[t]) + ")");
  }
}

std::vector<GraphTensors> prepare_all(const Corpus& corpus, std::size_t d) {
  std::vector<GraphTensors> out(corpus.graphs.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = prepare_graph(corpus.graphs[k].graph, d);
  return out;
}

template <class T>
EpochMetrics evaluate_cached(const GfseModel<T>& model, const TrainConfig& cfg, const Corpus& corpus,
                             const std::vector<GraphTensors>& cache, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw TrainError("evaluation set is empty");
  EpochMetrics m;
  std::array<double, kNumTasks> sums{};
  std::vector<double> z_graphs;
  std::vector<std::uint32_t> tags;
  for (std::size_t k : indices) {
    const auto& g = corpus.graphs[k];
    std::mt19937_64 rng(mix_seed(cfg.seed ^ kEvalStream, k));
    ad::Tape<T> tape;
    auto b = model.bind(tape, false);
    auto l = graph_losses(model, b, cfg, g, cache[k], rng);
    sums[kTaskSpd] += l.spd.item();
    sums[kTaskMc] += l.mc.item();
    sums[kTaskCd] += l.cd.item();
    auto zg = values(l.z_graph);
    z_graphs.insert(z_graphs.end(), zg.begin(), zg.end());
    tags.push_back(g.tag);

    auto z = values(model.cd_embed(b, l.out));
    m.acc_cd += acc_cd(z, model.config().embed_dim, g.labels.community.assignment);
    auto edges = g.graph.edges();
    PairList ep;
    for (auto [u, v] : edges) {
      ep.i.push_back(u);
      ep.j.push_back(v);
    }
    auto pred = values(model.spd_head(b, l.out, ep.i, ep.j));
    m.mse_spd += mean_squared_error(pred, spd_targets(g.labels.spd, ep));
    m.mae_mc += mae_mc(values(model.motif_head(b, l.out)), g.labels.motif);
  }
  auto count = static_cast<double>(indices.size());
  m.acc_cd /= count;
  m.mse_spd /= count;
  m.mae_mc /= count;
  m.acc_gcl = acc_gcl(z_graphs, model.config().embed_dim, tags);

  ad::Tape<T> tape;
  std::mt19937_64 rng(mix_seed(cfg.seed ^ kEvalStream, corpus.graphs.size()));
  auto z = tape.constant({indices.size(), model.config().embed_dim}, std::vector<T>(z_graphs.begin(), z_graphs.end()));
  sums[kTaskGcl] = loss_gcl(z, tags, gcl_options(cfg), rng).item() * count;
  const auto& s = model.params().at("unc.s").value;
  for (std::size_t t = 0; t < kNumTasks; ++t) {
    m.loss[t] = sums[t] / count;
    m.loss_total += std::exp(-static_cast<double>(s[t])) * m.loss[t] + static_cast<double>(s[t]) / 2.0;
  }
  m.sigma2 = sigma2_of(model);
  return m;
}

std::string format_number(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string format_number(float x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string EpochMetrics::json() const {
  nlohmann::ordered_json j;
  j["epoch"] = epoch;
  j["loss_total"] = loss_total;
  for (std::size_t t = 0; t < kNumTasks; ++t) j[std::string("loss_") + kTaskNames[t]] = loss[t];
  for (std::size_t t = 0; t < kNumTasks; ++t) j[std::string("sigma2_") + kTaskNames[t]] = sigma2[t];
  j["acc_cd"] = acc_cd;
  j["acc_gcl"] = acc_gcl;
  j["mse_spd"] = mse_spd;
  j["mae_mc"] = mae_mc;
  return j.dump();
}

EpochMetrics EpochMetrics::from_json(std::string_view line) {
  auto j = json::parse(line);
  EpochMetrics m;
  m.epoch = j.at("epoch").get<std::size_t>();
  m.loss_total = j.at("loss_total").get<double>();
  for (std::size_t t = 0; t < kNumTasks; ++t) {
    m.loss[t] = j.at(std::string("loss_") + kTaskNames[t]).get<double>();
    m.sigma2[t] = j.at(std::string("sigma2_") + kTaskNames[t]).get<double>();
  }
  m.acc_cd = j.at("acc_cd").get<double>();
  m.acc_gcl = j.at("acc_gcl").get<double>();
  m.mse_spd = j.at("mse_spd").get<double>();
  m.mae_mc = j.at("mae_mc").get<double>();
  return m;
}

std::vector<EpochMetrics> read_metrics_log(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<EpochMetrics> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(EpochMetrics::from_json(line));
  return out;
}

Split split_corpus(const Corpus& corpus, double val_fraction, std::uint64_t seed) {
  Split s;
  std::mt19937_64 rng(mix_seed(seed, kSplitStream));
  for (std::uint32_t f = 0; f < corpus.families.size(); ++f) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < corpus.graphs.size(); ++k)
      if (corpus.graphs[k].tag == f) members.push_back(k);
    std::shuffle(members.begin(), members.end(), rng);
    auto nval = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(members.size()))));
    if (members.size() < nval + 2)
      throw TrainError("family " + corpus.families[f] + " has " + std::to_string(members.size()) +
                       " graphs; need at least " + std::to_string(nval + 2));
    s.val.insert(s.val.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(nval));
    s.train.insert(s.train.end(), members.begin() + static_cast<std::ptrdiff_t>(nval), members.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  return s;
}

std::vector<std::vector<std::size_t>> make_batches(const Corpus& corpus, const std::vector<std::size_t>& pool,
                                                   std::size_t batch_size, std::mt19937_64& rng) {
  std::size_t nf = corpus.families.size();
  std::vector<std::vector<std::size_t>> fam(nf);
  for (std::size_t k : pool) fam[corpus.graphs[k].tag].push_back(k);
  std::size_t per = std::max<std::size_t>(2, batch_size / nf);
  std::size_t nb = 0;
  bool first = true;
  for (auto& f : fam) {
    if (f.empty()) continue;
    std::shuffle(f.begin(), f.end(), rng);
    nb = first ? f.size() / per : std::min(nb, f.size() / per);
    first = false;
  }
  nb = std::max<std::size_t>(nb, 1);
  std::vector<std::vector<std::size_t>> batches(nb);
  for (const auto& f : fam)
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t lo = f.size() * b / nb, hi = f.size() * (b + 1) / nb;
      batches[b].insert(batches[b].end(), f.begin() + static_cast<std::ptrdiff_t>(lo),
                        f.begin() + static_cast<std::ptrdiff_t>(hi));
    }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

template <class T>
EpochMetrics evaluate(const GfseModel<T>& model, const TrainConfig& cfg, const Corpus& corpus,
                      const std::vector<std::size_t>& indices) {
  std::vector<GraphTensors> cache(corpus.graphs.size());
  for (std::size_t k : indices) cache[k] = prepare_graph(corpus.graphs[k].graph, model.config().d);
  return evaluate_cached(model, cfg, corpus, cache, indices);
}

template <class T>
TrainResult<T> train(const TrainConfig& cfg, const Corpus& corpus, const TrainOptions& opt) {
  cfg.validate();
  if (corpus.graphs.empty()) throw TrainError("corpus is empty");
  if (corpus.families.size() < 2) throw TrainError("corpus needs at least 2 families");
  for (const auto& g : corpus.graphs)
    if (g.labels.motif.k != cfg.model.motif_k)
      throw TrainError("motif labels have k=" + std::to_string(g.labels.motif.k) + ", model expects " +
                       std::to_string(cfg.model.motif_k));
  auto cache = prepare_all(corpus, cfg.model.d);
  auto split = split_corpus(corpus, cfg.val_fraction, cfg.seed);

  TrainResult<T> res{GfseModel<T>(cfg.model, cfg.seed), {}, false, 0};
  ad::Adam<T> adam(ad::AdamConfig{cfg.lr});
  double best = 0;
  std::size_t bad = 0;
  std::size_t start = 0;
  json config_json = to_json(cfg);

  if (opt.resume_from) {
    auto ck = load_checkpoint<T>(*opt.resume_from);
    if (!ck.resume) throw TrainError("checkpoint has no optimizer state; cannot resume");
    json state = json::parse(ck.resume->train_json);
    auto saved = state.at("config");
    saved["max_epochs"] = config_json["max_epochs"];
    saved["patience"] = config_json["patience"];
    if (saved != config_json) throw TrainError("resume: training config differs from the checkpoint's");
    res.model = GfseModel<T>(ck.config, std::move(ck.params));
    adam.restore(ck.resume->adam_step, std::move(ck.resume->m), std::move(ck.resume->v));
    best = state.at("best").get<double>();
    bad = state.at("bad").get<std::size_t>();
    for (const auto& line : state.at("log")) res.log.push_back(EpochMetrics::from_json(line.get<std::string>()));
    start = ck.epoch;
    res.steps = ck.step;
    if (state.at("stopped").get<bool>()) {
      res.early_stopped = true;
      return res;
    }
  }

  auto persist = [&](std::size_t epoch, bool stopped) {
    if (opt.log_out) {
      std::string text;
      for (const auto& m : res.log) text += m.json() + "\n";
      write_file_atomic(*opt.log_out, text);
    }
    if (opt.checkpoint_out) {
      json state{{"config", config_json}, {"best", best}, {"bad", bad}, {"stopped", stopped}, {"log", json::array()}};
      for (const auto& m : res.log) state["log"].push_back(m.json());
      Checkpoint<T> ck{res.model.config(), res.model.params(), res.steps, epoch,
                       ResumeState{state.dump(), adam.steps(), adam.first_moment(), adam.second_moment()}};
      save_checkpoint(*opt.checkpoint_out, ck);
    }
    if (opt.on_epoch) opt.on_epoch(res.log.back());
  };

  if (!opt.resume_from) {
    auto m0 = evaluate_cached(res.model, cfg, corpus, cache, split.val);
    check_losses(m0.loss, cfg.gcl_include_positive, "epoch 0");
    res.log.push_back(m0);
    best = m0.loss_total;
    persist(0, false);
  }

  auto gcl = gcl_options(cfg);
  for (std::size_t epoch = start + 1; epoch <= cfg.max_epochs; ++epoch) {
    std::mt19937_64 rng(mix_seed(cfg.seed ^ kEpochStream, epoch));
    auto batches = make_batches(corpus, split.train, cfg.batch_size, rng);
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      std::string where = "epoch " + std::to_string(epoch) + " batch " + std::to_string(bi);
      try {
        ad::Tape<T> tape;
        auto b = res.model.bind(tape, true);
        std::vector<ad::Tensor<T>> spd, mc, cd, zg;
        std::vector<std::uint32_t> tags;
        for (std::size_t k : batches[bi]) {
          auto l = graph_losses(res.model, b, cfg, corpus.graphs[k], cache[k], rng);
          spd.push_back(l.spd);
          mc.push_back(l.mc);
          cd.push_back(l.cd);
          zg.push_back(l.z_graph);
          tags.push_back(corpus.graphs[k].tag);
        }
        std::array<ad::Tensor<T>, kNumTasks> losses{mean_of(spd), mean_of(mc), mean_of(cd),
                                                    loss_gcl(ad::concat_rows(zg), tags, gcl, rng)};
        std::array<double, kNumTasks> lv{};
        for (std::size_t t = 0; t < kNumTasks; ++t) lv[t] = losses[t].item();
        check_losses(lv, cfg.gcl_include_positive, where);
        auto total = combined_loss(losses, b("unc.s"));
        tape.backward(total);
        adam.step(res.model.params(), ad::collect_grads(b.tensors()));
        ++res.steps;
      } catch (const ad::NumericError& e) {
        throw TrainError(where + ": diverged (" + e.what() + ")");
      }
    }
    for (const auto& p : res.model.params())
      for (T x : p.value)
        if (!std::isfinite(x)) throw TrainError("epoch " + std::to_string(epoch) + ": parameter " + p.name + " is not finite");

    auto m = evaluate_cached(res.model, cfg, corpus, cache, split.val);
    m.epoch = epoch;
    check_losses(m.loss, cfg.gcl_include_positive, "epoch " + std::to_string(epoch) + " validation");
    res.log.push_back(m);
    if (m.loss_total < best) {
      best = m.loss_total;
      bad = 0;
    } else {
      ++bad;
    }
    bool stop = bad >= cfg.patience;
    persist(epoch, stop);
    if (stop) {
      res.early_stopped = true;
      break;
    }
  }
  return res;
}

template <class T>
std::string export_pse(const GfseModel<T>& model, const Graph& g) {
  auto gt = prepare_graph(g, model.config().d);
  std::vector<double> v;
  if constexpr (std::is_same_v<T, double>) {
    v = model.encode(gt);
  } else {
    ad::ParamSet<double> wide;
    for (std::size_t p = 0; p < model.params().size(); ++p) {
      const auto& src = model.params()[p];
      wide.add(src.name, src.shape, {src.value.begin(), src.value.end()});
    }
    auto cfg = model.config();
    cfg.dtype = "f64";
    v = GfseModel<double>(cfg, std::move(wide)).encode(gt);
  }
  std::size_t cols = model.config().out_dim;
  std::string out;
  for (std::size_t i = 0; i < gt.n; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out += ',';
      out += format_number(v[i * cols + j]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<double>> parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++lineno;
    std::vector<double> row;
    std::size_t p = 0;
    while (!line.empty() && p <= line.size()) {
      std::size_t q = line.find(',', p);
      if (q == std::string_view::npos) q = line.size();
      auto cell = line.substr(p, q - p);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      double x = 0;
      auto r = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (cell.empty() || r.ec != std::errc() || r.ptr != cell.data() + cell.size())
        throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad number \"" + std::string(cell) + "\"");
      row.push_back(x);
      p = q + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
    pos = end + 1;
  }
  return rows;
}

std::string matrix_csv(const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out += ',';
      out += format_number(r[j]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<double>> augment_features(const std::vector<std::vector<double>>& x,
                                                  const std::vector<std::vector<double>>& pse) {
  if (x.size() != pse.size())
    throw std::invalid_argument("row count mismatch: features have " + std::to_string(x.size()) +
                                " rows, encodings have " + std::to_string(pse.size()));
  auto out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].insert(out[i].end(), pse[i].begin(), pse[i].end());
  return out;
}

template TrainResult<float> train(const TrainConfig&, const Corpus&, const TrainOptions&);
template TrainResult<double> train(const TrainConfig&, const Corpus&, const TrainOptions&);
template EpochMetrics evaluate(const GfseModel<float>&, const TrainConfig&, const Corpus&, const std::vector<std::size_t>&);
template EpochMetrics evaluate(const GfseModel<double>&, const TrainConfig&, const Corpus&, const std::vector<std::size_t>&);
template std::string export_pse(const GfseModel<float>&, const Graph&);
template std::string export_pse(const GfseModel<double>&, const Graph&);

}  // namespace gfse
