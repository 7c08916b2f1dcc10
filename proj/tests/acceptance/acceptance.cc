#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "../common/graphs.h"
#include "../common/model_fixture.h"
#include "../common/op_suite.h"
#include "gfse/canon.h"
#include "gfse/checkpoint.h"
#include "gfse/graph_io.h"
#include "gfse/pretrain.h"
#include "gfse/seg_wl.h"
#include "gfse/walk_encoding.h"

using namespace gfse;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const char* const kTasks[] = {"spd", "mc", "cd", "gcl"};

enum class Outcome { kPass, kFail, kSkip };

struct Result {
  Outcome outcome;
  std::string detail;
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int prec = 3) {
  std::ostringstream s;
  s.precision(prec);
  s << x;
  return s.str();
}

std::uint64_t choose2(std::uint64_t n) { return n * (n - 1) / 2; }

const std::map<std::size_t, GraphFamily>& connected_families() {
  static const auto fams = [] {
    std::map<std::size_t, GraphFamily> m;
    for (std::size_t n = 1; n <= 8; ++n) m[n] = enumerate_graphs(n, true);
    return m;
  }();
  return fams;
}

Result low_order_rows() {
  struct Row {
    std::size_t n;
    std::uint64_t wl, spd, rw;
  };
  const Row rows[] = {{5, 0, 0, 0}, {6, 3, 2, 0}, {7, 17, 12, 0}, {8, 312, 186, 0}};
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const auto& fam = connected_families().at(r.n);
    auto wl = family_report(fam, EncodingScheme::classic_wl()).undistinguished_pairs;
    auto spd = family_report(fam, EncodingScheme::spd()).undistinguished_pairs;
    auto rw = family_report(fam, EncodingScheme::rw(8)).undistinguished_pairs;
    ok &= wl == r.wl && spd == r.spd && rw == r.rw;
    detail += "n=" + std::to_string(r.n) + " wl/spd/rw8 " + std::to_string(wl) + "/" + std::to_string(spd) + "/" +
              std::to_string(rw) + "; ";
  }
  return {ok ? Outcome::kPass : Outcome::kFail, detail};
}

Result enumerator_counts() {
  const std::uint64_t graphs[] = {21, 112, 853, 11117};
  const std::uint64_t pairs[] = {210, 6216, 363378, 61788286};
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < 4; ++k) {
    std::uint64_t count = connected_families().at(5 + k).graphs.size();
    ok &= count == graphs[k] && choose2(count) == pairs[k];
    detail += std::to_string(count) + " (" + std::to_string(choose2(count)) + " pairs) ";
  }
  return {ok ? Outcome::kPass : Outcome::kFail, detail};
}

Result srg_pair_separation() {
  auto t0 = Clock::now();
  auto a = shrikhande(), b = rook_4x4();
  bool ok = true;
  std::string detail = "rw(d) distinguishes for d=5..8: ";
  for (std::size_t d = 5; d <= 8; ++d) {
    bool dist = distinguishable(a, b, EncodingScheme::rw(d));
    ok &= dist;
    detail += dist ? "y" : "n";
  }
  detail += "; wl/neighbor/spd distinguish: ";
  for (auto s : {EncodingScheme::classic_wl(), EncodingScheme::neighbor(), EncodingScheme::spd()}) {
    bool dist = distinguishable(a, b, s);
    ok &= !dist;
    detail += dist ? "y" : "n";
  }
  double secs = since(t0);
  ok &= secs < 1.0;
  return {ok ? Outcome::kPass : Outcome::kFail, detail + "; " + fmt(secs) + " s"};
}

Result srg_families(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".g6") files.push_back(e.path());
  if (files.empty()) return {Outcome::kSkip, "no strongly regular graph6 files in " + dir.string()};
  std::sort(files.begin(), files.end());
  const std::set<std::uint64_t> expected_pairs{105, 45, 820, 16110, 378, 3003};
  bool ok = true;
  std::uint64_t rw4 = 0;
  std::string detail;
  for (const auto& f : files) {
    GraphFamily fam{read_graph6_file(f), f.filename().string(), std::nullopt};
    std::uint64_t pairs = choose2(fam.graphs.size());
    auto wl = family_report(fam, EncodingScheme::classic_wl()).undistinguished_pairs;
    auto spd = family_report(fam, EncodingScheme::spd()).undistinguished_pairs;
    auto rw8 = family_report(fam, EncodingScheme::rw(8)).undistinguished_pairs;
    rw4 += family_report(fam, EncodingScheme::rw(4)).undistinguished_pairs;
    ok &= wl == pairs && spd == pairs && rw8 == 0 && expected_pairs.count(pairs);
    detail += f.filename().string() + " " + std::to_string(pairs) + ":" + std::to_string(wl) + "/" +
              std::to_string(spd) + "/" + std::to_string(rw8) + "; ";
  }
  ok &= files.size() == expected_pairs.size() && rw4 == 16;
  return {ok ? Outcome::kPass : Outcome::kFail, detail + "rw4 total " + std::to_string(rw4)};
}

Result wl_neighbor_equivalence() {
  bool ok = true;
  std::size_t families = 0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (bool connected : {true, false}) {
      auto fam = connected ? connected_families().at(n) : enumerate_graphs(n, false);
      auto a = family_report(fam, EncodingScheme::classic_wl());
      auto b = family_report(fam, EncodingScheme::neighbor());
      ok &= a.undistinguished_pairs == b.undistinguished_pairs && a.buckets == b.buckets;
      ++families;
    }
  return {ok ? Outcome::kPass : Outcome::kFail, std::to_string(families) + " families compared"};
}

Result soundness_fuzz() {
  std::mt19937_64 rng(2024);
  std::string detail;
  bool ok = true;
  for (auto s : {EncodingScheme::classic_wl(), EncodingScheme::neighbor(), EncodingScheme::spd(),
                 EncodingScheme::rw(8)}) {
    std::size_t wrong = 0;
    for (int t = 0; t < 1000; ++t) {
      std::size_t n = 1 + rng() % 16;
      double p = 0.1 + 0.6 * std::uniform_real_distribution<double>()(rng);
      auto g = s.kind == SchemeKind::kRw ? testing::random_connected(std::max<std::size_t>(n, 2), p, rng)
                                         : testing::random_graph(n, p, rng);
      auto h = g.permuted(testing::random_perm(g.num_nodes(), rng));
      wrong += distinguishable(g, h, s);
    }
    ok &= wrong == 0;
    detail += s.name() + " " + std::to_string(wrong) + "/1000 ";
  }
  return {ok ? Outcome::kPass : Outcome::kFail, detail};
}

Result gradient_suite() {
  auto t0 = Clock::now();
  double worst = 0;
  std::string where;
  std::size_t ops = 0;
  for (auto& c : testing::op_cases(7)) {
    auto rep = ad::gradcheck(c.params, c.loss);
    if (rep.max_rel_error >= worst) worst = rep.max_rel_error, where = c.op + " " + rep.worst;
    ++ops;
  }
  testing::FourLossFixture fx;
  auto rep = fx.check(std::nullopt);
  double secs = since(t0);
  bool ok = worst < 1e-4 && rep.max_rel_error < 1e-4 && secs < 60.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          std::to_string(ops) + " ops worst " + fmt(worst) + " (" + where + "); combined loss " +
              std::to_string(rep.checked) + " entries worst " + fmt(rep.max_rel_error) + " (" + rep.worst + "); " +
              fmt(secs) + " s"};
}

Result desk_pretraining() {
  auto t0 = Clock::now();
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.seed = 0;
  auto corpus = make_corpus(cfg.corpus, build_graphlet_catalog(5));
  auto res = train<float>(cfg, corpus);
  double secs = since(t0);
  const auto& first = res.log.front();
  const auto& last = res.log.back();

  std::vector<std::string> failed;
  for (std::size_t t = 0; t < kNumTasks; ++t)
    if (!(last.loss[t] < first.loss[t])) failed.push_back(std::string(kTasks[t]) + " loss not reduced");
  if (last.acc_cd < 0.80) failed.push_back("acc_cd " + fmt(last.acc_cd) + " < 0.8");
  if (last.acc_gcl < 0.75) failed.push_back("acc_gcl " + fmt(last.acc_gcl) + " < 0.75");
  if (last.mse_spd > 0.5 * first.mse_spd) failed.push_back("mse_spd reduced by less than half");
  for (const auto& m : res.log)
    for (double s2 : m.sigma2)
      if (!std::isfinite(s2) || s2 <= 0) {
        failed.push_back("sigma2 not finite and positive at epoch " + std::to_string(m.epoch));
        break;
      }
  if (last.epoch != 30) failed.push_back("stopped early at epoch " + std::to_string(last.epoch));
  if (secs > 900) failed.push_back("runtime over 15 min");

  std::string detail = "epoch " + std::to_string(last.epoch) + ": loss " + fmt(first.loss_total) + " -> " +
                       fmt(last.loss_total) + ", acc_cd " + fmt(first.acc_cd) + " -> " + fmt(last.acc_cd) +
                       ", acc_gcl " + fmt(first.acc_gcl) + " -> " + fmt(last.acc_gcl) + ", mse_spd " +
                       fmt(first.mse_spd) + " -> " + fmt(last.mse_spd) + ", " + fmt(secs) + " s";
  for (const auto& f : failed) detail += "; " + f;
  return {failed.empty() ? Outcome::kPass : Outcome::kFail, detail};
}

Result serialization() {
  GfseConfig cfg;
  GfseModel<float> model(cfg, 99);
  Checkpoint<float> ck{cfg, model.params(), 0, 0, std::nullopt};
  auto path = fs::temp_directory_path() / ("gfse_acceptance_" + std::to_string(::getpid()) + ".gfse");
  save_checkpoint(path, ck);
  auto back = load_checkpoint<float>(path);
  fs::remove(path);
  GfseModel<float> loaded(back.config, back.params);

  std::mt19937_64 rng(5);
  std::size_t identical = 0;
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    std::size_t n = 2 + rng() % 31;
    auto g = testing::random_connected(n, 0.15 + 0.3 * static_cast<double>(rng() % 100) / 100.0, rng);
    auto gt = prepare_graph(g, cfg.d);
    identical += model.encode(gt) == loaded.encode(gt);
    auto perm = testing::random_perm(n, rng);
    auto a = parse_matrix_csv(export_pse(loaded, g));
    auto b = parse_matrix_csv(export_pse(loaded, g.permuted(perm)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < a[i].size(); ++c) worst = std::max(worst, std::abs(b[perm[i]][c] - a[i][c]));
  }
  bool ok = identical == 20 && worst <= 1e-6;
  return {ok ? Outcome::kPass : Outcome::kFail,
          std::to_string(identical) + "/20 bit-identical forwards; export permutation error " + fmt(worst)};
}

Result walk_exactness() {
  std::size_t graphs = 0;
  double worst = 0;
  auto check = [&](const Graph& g) {
    auto exact = relative_rw_encoding_exact(g, 8);
    auto approx = relative_rw_encoding(g, 8);
    for (std::size_t k = 0; k < exact.values.size(); ++k) {
      double e = exact.values[k].get_d();
      double err = std::abs(approx.values[k] - e);
      double rel = e == 0 ? (err == 0 ? 0 : INFINITY) : err / std::abs(e);
      worst = std::max(worst, rel);
    }
    ++graphs;
  };
  for (std::size_t n = 2; n <= 7; ++n)
    for (const auto& g : connected_families().at(n).graphs) check(g);
  std::mt19937_64 rng(10);
  for (std::size_t n = 8; n <= 20; ++n)
    for (int t = 0; t < 40; ++t) check(testing::random_connected(n, 0.1 + 0.02 * t, rng));
  return {worst <= 1e-12 ? Outcome::kPass : Outcome::kFail,
          std::to_string(graphs) + " graphs, worst relative error " + fmt(worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks, one line per criterion"};
  std::vector<int> only, expect_fail;
  fs::path srg_dir = fs::path(GFSE_SOURCE_DIR) / "data" / "srg";
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail; exit status ignores them")->delimiter(',');
  app.add_option("--srg-dir", srg_dir, "Directory with strongly regular graph6 families");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"low-order family rows (WL/SPD/RW8 undistinguished pairs, n=5..8)", low_order_rows},
      {"enumerator graph and pair counts, n=5..8", enumerator_counts},
      {"Shrikhande vs 4x4 rook separation", srg_pair_separation},
      {"strongly regular families", [&] { return srg_families(srg_dir); }},
      {"classic WL == neighbor scheme on enumerated families", wl_neighbor_equivalence},
      {"soundness fuzzing, 1000 permuted pairs per scheme", soundness_fuzz},
      {"gradient suite at f64, rel tol 1e-4, < 1 min", gradient_suite},
      {"desk-scale pre-training, 30 epochs", desk_pretraining},
      {"checkpoint round trip and export equivariance", serialization},
      {"float vs exact walk encodings, n <= 20, d = 8", walk_exactness},
  };

  int unexpected = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    int id = static_cast<int>(k + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    auto t0 = Clock::now();
    Result r;
    try {
      r = criteria[k].second();
    } catch (const std::exception& e) {
      r = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    bool known = std::find(expect_fail.begin(), expect_fail.end(), id) != expect_fail.end();
    const char* tag = r.outcome == Outcome::kPass ? "PASS" : r.outcome == Outcome::kSkip ? "SKIP" : "FAIL";
    if (r.outcome == Outcome::kFail && !known) ++unexpected;
    if (r.outcome == Outcome::kPass && known) ++unexpected;
    std::printf("[%s] criterion %2d: %s | %s%s (%.1f s)\n", tag, id, criteria[k].first.c_str(), r.detail.c_str(),
                r.outcome == Outcome::kFail && known ? " [known failure]" : "", since(t0));
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
