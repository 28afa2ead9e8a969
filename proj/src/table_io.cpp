#include "hardwall/table_io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hardwall/errors.hpp"

namespace hardwall {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw ValidationError("table row has " + std::to_string(row.size()) +
                          " cells, expected " +
                          std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string canonical_json(const nlohmann::json& j) { return j.dump(); }

namespace {

// Compact SHA-1, sufficient for content addressing of run artifacts.
struct Sha1 {
  std::array<std::uint32_t, 5> h{0x67452301u, 0xEFCDAB89u, 0x98BADCFEu,
                                 0x10325476u, 0xC3D2E1F0u};
  std::array<unsigned char, 64> block{};
  std::size_t fill = 0;
  std::uint64_t total = 0;

  static std::uint32_t rol(std::uint32_t x, int s) {
    return (x << s) | (x >> (32 - s));
  }

  void compress() {
    std::uint32_t w[80];
    for (int i = 0; i < 16; ++i)
      w[i] = std::uint32_t(block[4 * i]) << 24 |
             std::uint32_t(block[4 * i + 1]) << 16 |
             std::uint32_t(block[4 * i + 2]) << 8 |
             std::uint32_t(block[4 * i + 3]);
    for (int i = 16; i < 80; ++i)
      w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
    for (int i = 0; i < 80; ++i) {
      std::uint32_t f, k;
      if (i < 20) {
        f = (b & c) | (~b & d);
        k = 0x5A827999u;
      } else if (i < 40) {
        f = b ^ c ^ d;
        k = 0x6ED9EBA1u;
      } else if (i < 60) {
        f = (b & c) | (b & d) | (c & d);
        k = 0x8F1BBCDCu;
      } else {
        f = b ^ c ^ d;
        k = 0xCA62C1D6u;
      }
      std::uint32_t t = rol(a, 5) + f + e + k + w[i];
      e = d;
      d = c;
      c = rol(b, 30);
      b = a;
      a = t;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
  }

  void update(const unsigned char* p, std::size_t len) {
    total += len;
    while (len > 0) {
      std::size_t take = std::min(len, block.size() - fill);
      std::copy(p, p + take, block.begin() + fill);
      fill += take;
      p += take;
      len -= take;
      if (fill == block.size()) {
        compress();
        fill = 0;
      }
    }
  }

  std::string hex_digest() {
    std::uint64_t bits = total * 8;
    unsigned char pad = 0x80;
    update(&pad, 1);
    unsigned char zero = 0;
    while (fill != 56) update(&zero, 1);
    unsigned char len[8];
    for (int i = 0; i < 8; ++i)
      len[i] = (unsigned char)(bits >> (56 - 8 * i));
    update(len, 8);
    char out[41];
    for (int i = 0; i < 5; ++i)
      std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 40);
  }
};

std::string cell_to_csv(const Table::Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const long* l = std::get_if<long>(&c)) return std::to_string(*l);
  return std::get<std::string>(c);
}

nlohmann::json cell_to_json(const Table::Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    if (std::isnan(*d)) return "nan";
    return *d > 0 ? "inf" : "-inf";
  }
  if (const long* l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

}  // namespace

std::string git_blob_sha1(const std::string& content) {
  std::string header = "blob " + std::to_string(content.size());
  header.push_back('\0');
  Sha1 s;
  s.update(reinterpret_cast<const unsigned char*>(header.data()),
           header.size());
  s.update(reinterpret_cast<const unsigned char*>(content.data()),
           content.size());
  return s.hex_digest();
}

std::string render_csv(const Table& t, const nlohmann::json& config) {
  std::string out = "# hardwall csv v1\n# config " + canonical_json(config) +
                    "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += t.columns[i];
  }
  out.push_back('\n');
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out.push_back(',');
      out += cell_to_csv(row[i]);
    }
    out.push_back('\n');
  }
  return out;
}

std::string render_json(const Table& t, const nlohmann::json& config) {
  nlohmann::json doc;
  doc["schema"] = "hardwall json v1";
  doc["config"] = config;
  doc["columns"] = t.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj;
    for (std::size_t i = 0; i < row.size(); ++i)
      obj[t.columns[i]] = cell_to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw ValidationError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), std::streamsize(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ValidationError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::error_code ec2;
    fs::remove(tmp, ec2);
    throw ValidationError("cannot move output into place at " + path + ": " +
                          ec.message());
  }
}

}  // namespace hardwall
