#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace hardwall {

// One output table: named columns plus rows of cells.  Doubles print with
// %.17g so a reread recovers the exact bits; strings cover enum-ish columns
// like the sampling method.
struct Table {
  using Cell = std::variant<double, long, std::string>;

  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  // Appends a row, insisting on one cell per column.
  void add_row(std::vector<Cell> row);
};

// Formats a double as %.17g (round-trip exact, locale-free).
std::string format_double(double v);

// Compact dump with object keys in sorted order: the canonical form used
// for config hashing and embedding.  nlohmann::json orders keys already;
// this wrapper exists so every call site produces the same bytes.
std::string canonical_json(const nlohmann::json& j);

// Git-style content hash: SHA-1 over "blob <len>\0<content>", hex digest.
// Matches `git hash-object` so reports can be checked with stock tooling.
std::string git_blob_sha1(const std::string& content);

// Renders the table as CSV.  Layout:
//   # hardwall csv v1
//   # config <canonical json>
//   col,col,...
//   cells...
// The '.' decimal point is guaranteed regardless of locale.
std::string render_csv(const Table& t, const nlohmann::json& config);

// JSON mirror of the CSV content: schema string, embedded config, column
// names, and one object per row.  Non-finite doubles become the strings
// "inf", "-inf", "nan" (bare JSON has no spelling for them).
std::string render_json(const Table& t, const nlohmann::json& config);

// Writes content to path via a temp file in the same directory plus an
// atomic rename: either the complete file appears or nothing changes.
// Throws ValidationError when the path is unwritable.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace hardwall
