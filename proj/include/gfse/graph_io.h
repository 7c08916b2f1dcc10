#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gfse/graph.h"

namespace gfse {

/// Malformed graph6 input; `offset()` is the byte position of the fault.
class Graph6Error : public GraphError {
 public:
  Graph6Error(const std::string& what, std::size_t offset)
      : GraphError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  /// Same error with `prefix` prepended to the message.
  Graph6Error(const std::string& prefix, const Graph6Error& inner)
      : GraphError(prefix + inner.what()), offset_(inner.offset_) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class MissingFileError : public std::runtime_error {
 public:
  explicit MissingFileError(const std::filesystem::path& p)
      : std::runtime_error("cannot open " + p.string()) {}
};

/// Whole file as bytes; throws MissingFileError.
std::string read_text_file(const std::filesystem::path& path);

/// graph6 records with the single-byte size header (n <= 62).
inline constexpr std::size_t kGraph6MaxNodes = 62;

Graph parse_graph6(std::string_view line);
std::string write_graph6(const Graph& g);

/// One record per line; blank lines and lines starting with '#' are skipped.
std::vector<Graph> read_graph6_file(const std::filesystem::path& path);
void write_graph6_file(const std::filesystem::path& path,
                       const std::vector<Graph>& graphs);

/// {"n": int, "edges": [[u,v],...]} or an array of such objects.
std::vector<Graph> parse_graph_json(std::string_view text);
std::string write_graph_json(const std::vector<Graph>& graphs);

/// Dispatches on extension: ".json" is JSON, anything else graph6.
std::vector<Graph> read_graphs(const std::filesystem::path& path);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace gfse
