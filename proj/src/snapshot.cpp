#include "cht/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

namespace cht {
namespace {

constexpr char kMagic[8] = {'C', 'H', 'T', 'S', 'N', 'A', 'P', '1'};

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::runtime_error("snapshot: cannot parse number '" + std::string(text) + "'");
  return value;
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<unsigned char, sizeof(T)> bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw std::runtime_error("snapshot: truncated binary stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_snapshot_csv(std::ostream& out, const Snapshot& snap) {
  const Grid& g = snap.field.grid();
  out << "# dim=" << g.dim() << " extents=" << format_double(g.extent(0));
  if (g.dim() == 2) out << ',' << format_double(g.extent(1));
  out << " cells=" << g.cells(0);
  if (g.dim() == 2) out << ',' << g.cells(1);
  out << " field=" << snap.name << " t=" << format_double(snap.t) << '\n';
  for (int j = 0; j < g.cells(1); ++j) {
    for (int i = 0; i < g.cells(0); ++i) {
      if (i) out << ',';
      out << format_double(snap.field(i, j));
    }
    out << '\n';
  }
}

Snapshot read_snapshot_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0)
    throw std::runtime_error("snapshot: missing '# ' header line");
  int dim = 0;
  std::array<double, 2> extents{1.0, 1.0};
  std::array<int, 2> cells{1, 1};
  std::string name;
  double t = 0.0;
  std::istringstream tokens(header.substr(2));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw std::runtime_error("snapshot: bad header token " + token);
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    const auto comma = value.find(',');
    if (key == "dim") {
      dim = std::stoi(value);
    } else if (key == "extents") {
      extents[0] = parse_double(value.substr(0, comma));
      if (comma != std::string::npos) extents[1] = parse_double(value.substr(comma + 1));
    } else if (key == "cells") {
      cells[0] = std::stoi(value.substr(0, comma));
      if (comma != std::string::npos) cells[1] = std::stoi(value.substr(comma + 1));
    } else if (key == "field") {
      name = value;
    } else if (key == "t") {
      t = parse_double(value);
    } else {
      throw std::runtime_error("snapshot: unknown header key " + key);
    }
  }
  Grid grid(dim, extents, cells);
  Field field(grid);
  std::string line;
  for (int j = 0; j < grid.cells(1); ++j) {
    if (!std::getline(in, line)) throw std::runtime_error("snapshot: missing data rows");
    std::size_t start = 0;
    for (int i = 0; i < grid.cells(0); ++i) {
      const auto stop = line.find(',', start);
      if (i + 1 < grid.cells(0) && stop == std::string::npos)
        throw std::runtime_error("snapshot: short data row");
      field(i, j) = parse_double(std::string_view(line).substr(
          start, stop == std::string::npos ? std::string::npos : stop - start));
      start = stop + 1;
    }
  }
  return Snapshot{name, t, std::move(field)};
}

void write_snapshot_binary(std::ostream& out, const Snapshot& snap) {
  const Grid& g = snap.field.grid();
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.cells(0)));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.cells(1)));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(snap.name.size()));
  put_le<double>(out, g.extent(0));
  put_le<double>(out, g.extent(1));
  put_le<double>(out, snap.t);
  out.write(snap.name.data(), static_cast<std::streamsize>(snap.name.size()));
  for (double x : snap.field.values()) put_le<double>(out, x);
}

Snapshot read_snapshot_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw std::runtime_error("snapshot: bad binary magic");
  const auto dim = get_le<std::uint32_t>(in);
  const auto nx = get_le<std::uint32_t>(in);
  const auto ny = get_le<std::uint32_t>(in);
  const auto name_len = get_le<std::uint32_t>(in);
  const double lx = get_le<double>(in);
  const double ly = get_le<double>(in);
  const double t = get_le<double>(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  if (!in) throw std::runtime_error("snapshot: truncated name");
  Grid grid(static_cast<int>(dim), {lx, ly}, {static_cast<int>(nx), static_cast<int>(ny)});
  Field field(grid);
  for (auto& x : field.values()) x = get_le<double>(in);
  return Snapshot{std::move(name), t, std::move(field)};
}

std::filesystem::path save_snapshot_csv(const std::filesystem::path& dir, const Snapshot& snap,
                                        std::size_t index) {
  std::array<char, 16> suffix{};
  std::snprintf(suffix.data(), suffix.size(), "%06zu", index);
  const auto path = dir / (snap.name + "_" + suffix.data() + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  write_snapshot_csv(out, snap);
  if (!out) throw std::runtime_error("write failed: " + path.string());
  return path;
}

}  // namespace cht
