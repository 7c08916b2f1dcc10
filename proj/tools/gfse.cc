#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfse/canon.h"
#include "gfse/checkpoint.h"
#include "gfse/config.h"
#include "gfse/corpus.h"
#include "gfse/gradcheck.h"
#include "gfse/graph_io.h"
#include "gfse/labels.h"
#include "gfse/losses.h"
#include "gfse/pretrain.h"
#include "gfse/rng.h"
#include "gfse/seg_wl.h"
#include "gfse/walk_encoding.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gfse;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kMissingInput = 3, kFormat = 4, kFailure = 5 };

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  2  usage error (unknown flag, bad flag value)\n"
    "  3  missing input file\n"
    "  4  input format violation (graph6, JSON, CSV, corpus, checkpoint)\n"
    "  5  runtime failure (training divergence, numeric error, failed check)\n";

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingFileError(p);
}

void set_workers(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

std::vector<Graph> load_graphs(const fs::path& p) {
  require_file(p);
  try {
    return read_graphs(p);
  } catch (const Graph6Error& e) {
    throw FormatError(e.what());
  } catch (const json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  } catch (const GraphError& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

std::vector<std::vector<double>> load_csv(const fs::path& p) {
  require_file(p);
  try {
    return parse_matrix_csv(read_text_file(p));
  } catch (const std::invalid_argument& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

json load_json(const fs::path& p) {
  require_file(p);
  try {
    return json::parse(read_text_file(p));
  } catch (const json::exception& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

void emit(bool as_json, const json& report, const std::string& human) {
  if (as_json) std::cout << report.dump() << '\n';
  else std::cout << human;
}

struct Common {
  bool json = false;
  std::uint64_t seed = 0;
  int workers = 0;
};

void add_json(CLI::App* app, Common& c) { app->add_flag("--json", c.json, "Print a JSON report to stdout"); }
void add_seed(CLI::App* app, Common& c) { app->add_option("--seed", c.seed, "Random seed")->capture_default_str(); }
void add_workers(CLI::App* app, Common& c, const char* dflt) {
  app->add_option("--workers", c.workers, std::string("Worker threads (default ") + dflt + ")");
}

// convert

struct ConvertArgs {
  Common c;
  fs::path input, out;
};

void run_convert(const ConvertArgs& a) {
  auto graphs = load_graphs(a.input);
  std::string text;
  if (a.out.extension() == ".json") {
    text = write_graph_json(graphs);
  } else {
    for (const auto& g : graphs) text += write_graph6(g) + '\n';
  }
  write_file_atomic(a.out, text);
  emit(a.c.json, {{"graphs", graphs.size()}, {"out", a.out.string()}},
       "converted " + std::to_string(graphs.size()) + " graphs to " + a.out.string() + "\n");
}

// enumerate

struct EnumerateArgs {
  Common c;
  std::size_t nodes = 0;
  bool connected = false;
  fs::path out;
};

void run_enumerate(const EnumerateArgs& a) {
  set_workers(a.c.workers);
  auto t0 = std::chrono::steady_clock::now();
  auto fam = enumerate_graphs(a.nodes, a.connected);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_graph6_file(a.out, fam.graphs);
  emit(a.c.json,
       {{"nodes", a.nodes}, {"connected", a.connected}, {"graphs", fam.graphs.size()}, {"seconds", secs}},
       std::to_string(fam.graphs.size()) + " graphs on " + std::to_string(a.nodes) + " nodes written to " +
           a.out.string() + "\n");
}

// wl-test

struct WlArgs {
  Common c;
  std::string scheme = "wl";
  std::size_t dim = 0;
  fs::path input;
  std::string srg;
};

SrgParams parse_srg(const std::string& s) {
  std::vector<std::size_t> v;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoul(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--srg", "expected n,k,lambda,mu");
    }
  }
  if (v.size() != 4) throw CLI::ValidationError("--srg", "expected n,k,lambda,mu");
  return {v[0], v[1], v[2], v[3]};
}

void run_wl_test(const WlArgs& a) {
  set_workers(a.c.workers);
  EncodingScheme scheme;
  try {
    scheme = EncodingScheme::parse(a.scheme, a.dim);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("--scheme", e.what());
  }
  auto graphs = load_graphs(a.input);
  if (!a.srg.empty()) {
    auto want = parse_srg(a.srg);
    std::erase_if(graphs, [&](const Graph& g) { return srg_parameters(g) != want; });
  }
  GraphFamily fam{std::move(graphs), a.input.filename().string(), std::nullopt};
  auto t0 = std::chrono::steady_clock::now();
  auto rep = family_report(fam, scheme);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json buckets = json::object();
  for (auto [size, count] : rep.buckets) buckets[std::to_string(size)] = count;
  json j{{"scheme", scheme.name()}, {"dim", scheme.dim},   {"graphs", rep.graphs},
         {"pairs", rep.pairs},      {"undistinguished", rep.undistinguished_pairs},
         {"buckets", buckets},      {"seconds", secs}};
  std::ostringstream h;
  h << "scheme          " << scheme.name() << '\n'
    << "graphs          " << rep.graphs << '\n'
    << "pairs           " << rep.pairs << '\n'
    << "undistinguished " << rep.undistinguished_pairs << '\n'
    << "seconds         " << secs << '\n';
  emit(a.c.json, j, h.str());
}

// labels

struct LabelsArgs {
  Common c;
  fs::path input, out;
  std::size_t max_graphlet = 5;
};

void run_labels(const LabelsArgs& a) {
  set_workers(a.c.workers);
  auto graphs = load_graphs(a.input);
  auto cat = build_graphlet_catalog(a.max_graphlet);
  auto labels = compute_labels_batch(graphs, cat, a.c.seed);
  std::string text;
  for (const auto& l : labels) text += labels_json(l) + '\n';
  write_file_atomic(a.out, text);
  emit(a.c.json, {{"graphs", graphs.size()}, {"catalog_k", cat.size()}, {"out", a.out.string()}},
       "labels for " + std::to_string(graphs.size()) + " graphs written to " + a.out.string() + "\n");
}

// corpus

struct CorpusArgs {
  Common c;
  fs::path config, out;
  std::vector<std::string> families;
  std::size_t per_family = 0, min_nodes = 0, max_nodes = 0;
  bool seed_given = false;
};

CorpusSpec corpus_spec(const CorpusArgs& a) {
  CorpusSpec spec;
  if (!a.config.empty()) {
    auto j = load_json(a.config);
    spec = j.contains("corpus") ? train_config_from_json(j).corpus : corpus_spec_from_json(j);
  }
  if (!a.families.empty()) spec.families = a.families;
  if (a.per_family) spec.graphs_per_family = a.per_family;
  if (a.min_nodes) spec.min_nodes = a.min_nodes;
  if (a.max_nodes) spec.max_nodes = a.max_nodes;
  if (a.seed_given) spec.seed = a.c.seed;
  spec.validate();
  return spec;
}

void run_corpus(const CorpusArgs& a) {
  auto spec = corpus_spec(a);
  auto corpus = generate_corpus(spec);
  write_file_atomic(a.out, corpus_jsonl(corpus));
  json per = json::object();
  for (std::size_t f = 0; f < corpus.families.size(); ++f)
    per[corpus.families[f]] = std::count_if(corpus.graphs.begin(), corpus.graphs.end(),
                                            [&](const CorpusGraph& g) { return g.tag == f; });
  emit(a.c.json, {{"graphs", corpus.graphs.size()}, {"families", per}, {"out", a.out.string()}},
       std::to_string(corpus.graphs.size()) + " graphs written to " + a.out.string() + "\n");
}

// pretrain

struct PretrainArgs {
  Common c;
  fs::path config, corpus, out, log, resume;
  std::size_t epochs = 0;
  bool seed_given = false;
  bool quiet = false;
};

template <class T>
TrainResult<T> train_as(const TrainConfig& cfg, const Corpus& corpus, const TrainOptions& opt) {
  return train<T>(cfg, corpus, opt);
}

void run_pretrain(const PretrainArgs& a) {
  set_workers(a.c.workers > 0 ? a.c.workers : 1);
  TrainConfig cfg;
  if (!a.config.empty()) {
    require_file(a.config);
    try {
      cfg = read_train_config(a.config);
    } catch (const json::exception& e) {
      throw FormatError(a.config.string() + ": " + e.what());
    }
  }
  if (a.epochs) cfg.max_epochs = a.epochs;
  if (a.seed_given) cfg.seed = a.c.seed;
  cfg.validate();

  Corpus corpus;
  if (!a.corpus.empty()) {
    require_file(a.corpus);
    corpus = read_corpus(a.corpus);
  } else {
    corpus = generate_corpus(cfg.corpus);
  }
  set_workers(a.c.workers > 0 ? a.c.workers : static_cast<int>(omp_get_num_procs()));
  attach_labels(corpus, build_graphlet_catalog(5));
  set_workers(a.c.workers > 0 ? a.c.workers : 1);

  TrainOptions opt;
  opt.checkpoint_out = a.out;
  if (!a.log.empty()) opt.log_out = a.log;
  if (!a.resume.empty()) {
    require_file(a.resume);
    opt.resume_from = a.resume;
  }
  if (!a.quiet && !a.c.json)
    opt.on_epoch = [](const EpochMetrics& m) {
      std::fprintf(stderr, "epoch %3zu  loss %.4f  acc_cd %.3f  acc_gcl %.3f  mse_spd %.4f  mae_mc %.2f\n", m.epoch,
                   m.loss_total, m.acc_cd, m.acc_gcl, m.mse_spd, m.mae_mc);
    };

  std::vector<EpochMetrics> log;
  bool stopped = false;
  std::uint64_t steps = 0;
  if (cfg.model.dtype == "f64") {
    auto r = train_as<double>(cfg, corpus, opt);
    log = r.log, stopped = r.early_stopped, steps = r.steps;
  } else {
    auto r = train_as<float>(cfg, corpus, opt);
    log = r.log, stopped = r.early_stopped, steps = r.steps;
  }
  const auto& last = log.back();
  json j = json::parse(last.json());
  j["steps"] = steps;
  j["early_stopped"] = stopped;
  j["checkpoint"] = a.out.string();
  emit(a.c.json, j,
       "trained " + std::to_string(last.epoch) + " epochs (" + std::to_string(steps) + " steps), checkpoint " +
           a.out.string() + "\n");
}

// encode

struct EncodeArgs {
  Common c;
  fs::path input, checkpoint, out;
  std::size_t rw = 0;
  bool exact = false;
  std::size_t index = 0;
};

void run_encode(const EncodeArgs& a) {
  set_workers(a.c.workers);
  if ((a.rw == 0) == a.checkpoint.empty())
    throw CLI::ValidationError("encode", "give exactly one of --rw or --checkpoint");
  auto graphs = load_graphs(a.input);
  if (a.index >= graphs.size())
    throw CLI::ValidationError("--index", std::to_string(a.index) + " out of range for " +
                                              std::to_string(graphs.size()) + " graphs");
  const auto& g = graphs[a.index];
  std::string csv;
  if (a.rw) {
    csv = a.exact ? node_pse_csv(node_rw_encoding_exact(g, a.rw)) : node_pse_csv(node_rw_encoding(g, a.rw));
  } else {
    require_file(a.checkpoint);
    auto bytes = read_text_file(a.checkpoint);
    if (checkpoint_dtype(bytes) == "f64") {
      auto ck = parse_checkpoint<double>(bytes);
      csv = export_pse(GfseModel<double>(ck.config, std::move(ck.params)), g);
    } else {
      auto ck = parse_checkpoint<float>(bytes);
      csv = export_pse(GfseModel<float>(ck.config, std::move(ck.params)), g);
    }
  }
  write_file_atomic(a.out, csv);
  emit(a.c.json, {{"nodes", g.num_nodes()}, {"out", a.out.string()}},
       "encoding of " + std::to_string(g.num_nodes()) + " nodes written to " + a.out.string() + "\n");
}

// augment

struct AugmentArgs {
  Common c;
  fs::path features, pse, out;
};

void run_augment(const AugmentArgs& a) {
  auto x = load_csv(a.features);
  auto p = load_csv(a.pse);
  std::vector<std::vector<double>> rows;
  try {
    rows = augment_features(x, p);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  write_file_atomic(a.out, matrix_csv(rows));
  std::size_t cols = rows.empty() ? 0 : rows[0].size();
  emit(a.c.json, {{"rows", rows.size()}, {"cols", cols}, {"out", a.out.string()}},
       std::to_string(rows.size()) + "x" + std::to_string(cols) + " written to " + a.out.string() + "\n");
}

// gradcheck

struct GradcheckArgs {
  Common c;
  fs::path input, config;
  std::size_t entries = 2000;
  double tolerance = 1e-4;
};

void run_gradcheck(const GradcheckArgs& a) {
  auto input = load_graphs(a.input);
  if (input.size() < 2) throw CLI::ValidationError("--input", "needs at least two graphs");
  GfseConfig cfg;
  cfg.d = 4, cfg.layers = 2, cfg.heads = 2, cfg.hidden = 8, cfg.out_dim = 6, cfg.embed_dim = 4;
  if (!a.config.empty()) cfg = model_config_from_json(load_json(a.config));
  cfg.dtype = "f64";
  cfg.validate();

  // Every input graph plus a shuffled copy, tagged by input index.
  std::mt19937_64 rng(a.c.seed);
  std::vector<Graph> graphs;
  std::vector<std::uint32_t> tags;
  for (std::size_t k = 0; k < input.size(); ++k) {
    std::vector<NodeId> perm(input[k].num_nodes());
    std::iota(perm.begin(), perm.end(), NodeId{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    graphs.push_back(input[k]);
    graphs.push_back(input[k].permuted(perm));
    tags.insert(tags.end(), 2, static_cast<std::uint32_t>(k));
  }
  auto cat = build_graphlet_catalog(5);
  std::vector<StructuralLabels> labels;
  std::vector<GraphTensors> tensors;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    labels.push_back(compute_labels(graphs[k], cat, mix_seed(a.c.seed, k)));
    tensors.push_back(prepare_graph(graphs[k], cfg.d));
  }
  GfseModel<double> model(cfg, a.c.seed);
  auto& s = model.params().at("unc.s").value;
  for (std::size_t t = 0; t < s.size(); ++t) s[t] = 0.1 * static_cast<double>(t) - 0.15;

  auto loss = [&](ad::Tape<double>&, const std::vector<ad::Tensor<double>>& p) {
    auto b = model.adopt(p);
    std::mt19937_64 pr(mix_seed(a.c.seed, 1u << 20));
    std::vector<ad::Tensor<double>> spd, mc, cd, z;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      auto out = model.forward(b, tensors[k]);
      auto pairs = connected_pairs(labels[k].spd);
      spd.push_back(loss_spd(model.spd_head(b, out, pairs.i, pairs.j), spd_targets(labels[k].spd, pairs)));
      mc.push_back(loss_motif(model.motif_head(b, out), labels[k].motif));
      cd.push_back(loss_cd(model.cd_embed(b, out), sample_cd_pairs(labels[k].community, pr), 1.0));
      z.push_back(model.gcl_embed(b, out));
    }
    auto mean = [](const std::vector<ad::Tensor<double>>& xs) {
      return ad::scale(ad::sum(ad::concat_rows(xs)), 1.0 / static_cast<double>(xs.size()));
    };
    std::array<ad::Tensor<double>, kNumTasks> l{mean(spd), mean(mc), mean(cd),
                                               loss_gcl(ad::concat_rows(z), tags, GclOptions{}, pr)};
    return combined_loss(l, b("unc.s"));
  };
  ad::GradcheckOptions opt;
  opt.max_entries = a.entries;
  opt.seed = a.c.seed;
  auto rep = ad::gradcheck(model.params(), loss, opt);
  bool pass = rep.max_rel_error < a.tolerance;
  json j{{"checked", rep.checked},      {"max_rel_error", rep.max_rel_error}, {"worst", rep.worst},
         {"tolerance", a.tolerance},    {"pass", pass}};
  std::ostringstream h;
  h << "checked " << rep.checked << " entries, max relative error " << rep.max_rel_error << " at " << rep.worst
    << (pass ? "  PASS\n" : "  FAIL\n");
  emit(a.c.json, j, h.str());
  if (!pass) throw CheckFailed("gradient check exceeded tolerance");
}

int fail(int code, const std::string& msg) {
  json err{{"error", msg}, {"exit_code", code}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph foundation structural encodings: walk encodings, SEG-WL tests, structural labels, "
               "pre-training and export."};
  app.footer(kExitCodes);
  app.require_subcommand(1);
  app.set_version_flag("--version", "gfse 1.0");

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "Convert graphs between graph6 (.g6) and JSON (.json)");
  c->add_option("--input", conv.input, "Input graph file")->required();
  c->add_option("--out", conv.out, "Output file; format from extension")->required();
  add_json(c, conv.c);
  c->callback([&] { run_convert(conv); });

  EnumerateArgs en;
  auto* e = app.add_subcommand("enumerate", "Enumerate all non-isomorphic graphs on N nodes");
  e->add_option("--nodes", en.nodes, "Node count (1..8)")->required()->check(CLI::Range(1, 8));
  e->add_flag("--connected", en.connected, "Connected graphs only");
  e->add_option("--out", en.out, "Output graph6 file")->required();
  add_workers(e, en.c, "all cores");
  add_json(e, en.c);
  e->callback([&] { run_enumerate(en); });

  WlArgs wl;
  auto* w = app.add_subcommand("wl-test", "Count pairs a refinement scheme fails to distinguish");
  w->add_option("--scheme", wl.scheme, "wl, neighbor, spd or rw")
      ->check(CLI::IsMember({"wl", "neighbor", "spd", "rw"}))
      ->capture_default_str();
  w->add_option("--dim", wl.dim, "Walk steps for the rw scheme");
  w->add_option("--input", wl.input, "Graph family file")->required();
  w->add_option("--srg", wl.srg, "Keep only strongly regular graphs with parameters n,k,lambda,mu");
  add_workers(w, wl.c, "all cores");
  add_json(w, wl.c);
  w->callback([&] { run_wl_test(wl); });

  LabelsArgs lb;
  auto* l = app.add_subcommand("labels", "Structural labels (distances, graphlet counts, communities) as JSON lines");
  l->add_option("--input", lb.input, "Input graph file")->required();
  l->add_option("--out", lb.out, "Output JSON-lines file")->required();
  l->add_option("--max-graphlet", lb.max_graphlet, "Largest graphlet size (3..5)")
      ->check(CLI::Range(3, 5))
      ->capture_default_str();
  add_seed(l, lb.c);
  add_workers(l, lb.c, "all cores");
  add_json(l, lb.c);
  l->callback([&] { run_labels(lb); });

  CorpusArgs co;
  auto* k = app.add_subcommand("corpus", "Generate a synthetic pre-training corpus (JSON lines)");
  k->add_option("--config", co.config, "Corpus or training config JSON");
  k->add_option("--families", co.families, "Generator families (er, ba, ws, sbm)")->delimiter(',');
  k->add_option("--per-family", co.per_family, "Graphs per family");
  k->add_option("--min-nodes", co.min_nodes, "Smallest graph size");
  k->add_option("--max-nodes", co.max_nodes, "Largest graph size");
  k->add_option("--out", co.out, "Output JSON-lines file")->required();
  auto* cs = k->add_option("--seed", co.c.seed, "Random seed");
  add_json(k, co.c);
  k->callback([&] {
    co.seed_given = cs->count() > 0;
    run_corpus(co);
  });

  PretrainArgs pt;
  auto* p = app.add_subcommand("pretrain", "Multi-task pre-training; writes a checkpoint and a metrics log");
  p->add_option("--config", pt.config, "Training config JSON");
  p->add_option("--corpus", pt.corpus, "Corpus JSON-lines file (default: generate from config)");
  p->add_option("--out", pt.out, "Checkpoint path")->required();
  p->add_option("--log", pt.log, "Metrics JSON-lines path");
  p->add_option("--resume", pt.resume, "Resume from a checkpoint");
  p->add_option("--epochs", pt.epochs, "Override max_epochs");
  p->add_flag("--quiet", pt.quiet, "No per-epoch progress on stderr");
  auto* ps = p->add_option("--seed", pt.c.seed, "Random seed (overrides config)");
  add_workers(p, pt.c, "1");
  add_json(p, pt.c);
  p->callback([&] {
    pt.seed_given = ps->count() > 0;
    run_pretrain(pt);
  });

  EncodeArgs ec;
  auto* x = app.add_subcommand("encode", "Node encodings as CSV: random-walk (--rw) or pre-trained (--checkpoint)");
  x->add_option("--input", ec.input, "Input graph file")->required();
  x->add_option("--index", ec.index, "Graph index within the file")->capture_default_str();
  x->add_option("--rw", ec.rw, "Random-walk steps d");
  x->add_flag("--exact", ec.exact, "Exact rational output (with --rw)");
  x->add_option("--checkpoint", ec.checkpoint, "Pre-trained checkpoint");
  x->add_option("--out", ec.out, "Output CSV")->required();
  add_workers(x, ec.c, "all cores");
  add_json(x, ec.c);
  x->callback([&] { run_encode(ec); });

  AugmentArgs ag;
  auto* a = app.add_subcommand("augment", "Concatenate node features with encodings column-wise");
  a->add_option("--features", ag.features, "Node feature CSV (n x d_x)")->required();
  a->add_option("--pse", ag.pse, "Encoding CSV (n x d_e)")->required();
  a->add_option("--out", ag.out, "Output CSV")->required();
  add_json(a, ag.c);
  a->callback([&] { run_augment(ag); });

  GradcheckArgs gc;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of the combined four-task loss");
  g->add_option("--input", gc.input, "Graph file with at least two graphs")->required();
  g->add_option("--config", gc.config, "Model config JSON (default: a small f64 model)");
  g->add_option("--entries", gc.entries, "Maximum parameter entries to check")->capture_default_str();
  g->add_option("--tolerance", gc.tolerance, "Relative error tolerance")->capture_default_str();
  add_seed(g, gc.c);
  add_json(g, gc.c);
  g->callback([&] { run_gradcheck(gc); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, e.what());
  } catch (const MissingFileError& e) {
    return fail(kMissingInput, e.what());
  } catch (const FormatError& e) {
    return fail(kFormat, e.what());
  } catch (const Graph6Error& e) {
    return fail(kFormat, e.what());
  } catch (const CorpusError& e) {
    return fail(kFormat, e.what());
  } catch (const CheckpointError& e) {
    return fail(kFormat, e.what());
  } catch (const ConfigError& e) {
    return fail(kUsage, e.what());
  } catch (const json::exception& e) {
    return fail(kFormat, e.what());
  } catch (const std::exception& e) {
    return fail(kFailure, e.what());
  }
  return kOk;
}
