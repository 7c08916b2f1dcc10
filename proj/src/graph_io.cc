#include "gfse/graph_io.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gfse {
namespace {

constexpr int kBias = 63;


Graph graph_from_json(const nlohmann::json& obj) {
  if (!obj.is_object() || !obj.contains("n") || !obj.contains("edges"))
    throw GraphError("graph JSON needs keys \"n\" and \"edges\"");
  auto n = obj.at("n").get<long long>();
  if (n < 1) throw GraphError("graph JSON: n must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> es;
  for (const auto& e : obj.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw GraphError("graph JSON: edge must be [u,v]");
    auto u = e[0].get<long long>();
    auto v = e[1].get<long long>();
    if (u < 0 || v < 0) throw GraphError("graph JSON: negative node id");
    es.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return from_edge_list(static_cast<std::size_t>(n), es).graph;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

Graph parse_graph6(std::string_view line) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);
  if (line.starts_with(">>graph6<<")) line.remove_prefix(10);
  if (line.empty()) throw Graph6Error("empty graph6 record", 0);
  for (std::size_t i = 0; i < line.size(); ++i) {
    auto c = static_cast<unsigned char>(line[i]);
    if (c < 63 || c > 126) throw Graph6Error("character out of range", i);
  }
  int header = static_cast<unsigned char>(line[0]) - kBias;
  if (header == 63) throw Graph6Error("large-size header (n > 62) unsupported", 0);
  auto n = static_cast<std::size_t>(header);
  if (n == 0) throw Graph6Error("graph with zero nodes", 0);

  std::size_t bits = n * (n - 1) / 2;
  std::size_t expected = (bits + 5) / 6;
  if (line.size() - 1 != expected)
    throw Graph6Error("length mismatch: expected " + std::to_string(expected) +
                          " data bytes for n=" + std::to_string(n),
                      line.size() < 1 + expected ? line.size() : 1 + expected);

  std::vector<std::pair<NodeId, NodeId>> es;
  std::size_t k = 0;
  auto bit = [&](std::size_t idx) {
    int word = static_cast<unsigned char>(line[1 + idx / 6]) - kBias;
    return (word >> (5 - idx % 6)) & 1;
  };
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i, ++k)
      if (bit(k)) es.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
  for (; k < expected * 6; ++k)
    if (bit(k)) throw Graph6Error("nonzero padding bits", 1 + k / 6);
  return from_edge_list(n, es).graph;
}

std::string write_graph6(const Graph& g) {
  std::size_t n = g.num_nodes();
  if (n > kGraph6MaxNodes)
    throw GraphError("graph6 writer supports n <= 62, got " + std::to_string(n));
  std::string out(1, static_cast<char>(n + kBias));
  std::size_t bits = n * (n - 1) / 2;
  std::vector<int> words((bits + 5) / 6, 0);
  std::size_t k = 0;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i, ++k)
      if (g.has_edge(static_cast<NodeId>(i), static_cast<NodeId>(j)))
        words[k / 6] |= 1 << (5 - k % 6);
  for (int w : words) out.push_back(static_cast<char>(w + kBias));
  return out;
}

std::vector<Graph> read_graph6_file(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<Graph> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(parse_graph6(line));
    } catch (const Graph6Error& e) {
      throw Graph6Error(path.string() + ":" + std::to_string(lineno) + ": ", e);
    }
  }
  return out;
}

void write_graph6_file(const std::filesystem::path& path, const std::vector<Graph>& graphs) {
  std::string text;
  for (const auto& g : graphs) {
    text += write_graph6(g);
    text += '\n';
  }
  write_file_atomic(path, text);
}

std::vector<Graph> parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GraphError(std::string("graph JSON: ") + e.what());
  }
  std::vector<Graph> out;
  if (doc.is_array()) {
    for (const auto& obj : doc) out.push_back(graph_from_json(obj));
  } else {
    out.push_back(graph_from_json(doc));
  }
  return out;
}

std::string write_graph_json(const std::vector<Graph>& graphs) {
  auto one = [](const Graph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    return nlohmann::json{{"n", g.num_nodes()}, {"edges", std::move(edges)}};
  };
  if (graphs.size() == 1) return one(graphs[0]).dump() + "\n";
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& g : graphs) arr.push_back(one(g));
  return arr.dump() + "\n";
}

std::vector<Graph> read_graphs(const std::filesystem::path& path) {
  if (path.extension() == ".json") return parse_graph_json(read_text_file(path));
  return read_graph6_file(path);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gfse
