#include "qfem/dataset.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "qfem/numeric_io.hpp"

namespace qfem::fem {

namespace {

constexpr char kMagic[8] = {'Q', 'F', 'E', 'M', 'D', 'S', '1', '\0'};

void check_rows(const Dataset& ds) {
  if (ds.sensors.empty() || ds.sensors.size() != ds.displacements.size())
    throw DataError("dataset: sensor/displacement row mismatch");
  for (std::size_t i = 0; i < ds.sensors.size(); ++i) {
    if (ds.sensors[i].size() != ds.sensors[0].size() ||
        ds.displacements[i].size() != ds.displacements[0].size())
      throw DataError("dataset: ragged rows");
  }
}

std::ofstream open_out(const std::string& path, bool binary) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  return os;
}

std::ifstream open_in(const std::string& path, bool binary) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw DataError("cannot open '" + path + "' for reading");
  return is;
}

}  // namespace

void write_dataset_csv(const Dataset& ds, const std::string& path) {
  check_rows(ds);
  std::ofstream os = open_out(path, false);
  os << "# qfem dataset v1\n";
  os << "# model_hash=" << ds.model_hash << '\n';
  os << "# seed=" << ds.seed << '\n';
  os << "# nodes=" << ds.node_count << '\n';
  os << "# noise_std=" << format_double(ds.noise_std) << '\n';
  os << "# sensors=" << ds.sensor_desc << '\n';
  os << "# units=sensors:rad displacements:m\n";
  std::size_t ns = ds.sensors[0].size(), nd = ds.displacements[0].size();
  for (std::size_t j = 0; j < ns; ++j) os << 'y' << j << ',';
  for (std::size_t j = 0; j < nd; ++j) os << 'x' << j << (j + 1 < nd ? ',' : '\n');
  for (std::size_t i = 0; i < ds.sensors.size(); ++i) {
    for (std::size_t j = 0; j < ns; ++j) os << format_double(ds.sensors[i][j]) << ',';
    for (std::size_t j = 0; j < nd; ++j)
      os << format_double(ds.displacements[i][j]) << (j + 1 < nd ? "," : "\n");
  }
  if (!os) throw DataError("write failed for '" + path + "'");
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream is = open_in(path, false);
  Dataset ds;
  std::string line;
  bool header_seen = false;
  std::size_t ns = 0, nd = 0;

  auto parse_meta = [&ds](const std::string& body) {
    auto eq = body.find('=');
    if (eq == std::string::npos) return;
    std::string key = body.substr(0, eq), val = body.substr(eq + 1);
    if (key == "model_hash") ds.model_hash = static_cast<std::uint64_t>(std::stoull(val));
    else if (key == "seed") ds.seed = static_cast<std::uint64_t>(std::stoull(val));
    else if (key == "nodes") ds.node_count = static_cast<int>(parse_long(val));
    else if (key == "noise_std") ds.noise_std = parse_double(val);
    else if (key == "sensors") ds.sensor_desc = val;
  };

  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.erase(body.begin());
      parse_meta(body);
      continue;
    }
    if (!header_seen) {
      // column header: y0..y(ns-1), x0..x(nd-1)
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        if (cell.empty()) throw DataError("dataset header: empty column name");
        if (cell[0] == 'y') ++ns;
        else if (cell[0] == 'x') ++nd;
        else throw DataError("dataset header: unexpected column '" + cell + "'");
      }
      if (ns == 0 || nd == 0) throw DataError("dataset header: need both y and x columns");
      header_seen = true;
      continue;
    }
    Vec row;
    row.reserve(ns + nd);
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t comma = line.find(',', start);
      std::size_t end = comma == std::string::npos ? line.size() : comma;
      try {
        row.push_back(parse_double(std::string_view(line).substr(start, end - start)));
      } catch (const DataError& e) {
        std::ostringstream msg;
        msg << "dataset line " << lineno << ": " << e.what();
        throw DataError(msg.str());
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != ns + nd) {
      std::ostringstream msg;
      msg << "dataset row at line " << lineno << " has " << row.size() << " fields, expected "
          << ns + nd;
      throw DataError(msg.str());
    }
    ds.sensors.emplace_back(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(ns));
    ds.displacements.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(ns), row.end());
  }
  if (!header_seen || ds.sensors.empty()) throw DataError("dataset '" + path + "' has no rows");
  return ds;
}

void write_dataset_binary(const Dataset& ds, const std::string& path) {
  check_rows(ds);
  std::ofstream os = open_out(path, true);
  auto put_u64 = [&os](std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  os.write(kMagic, sizeof(kMagic));
  put_u64(ds.model_hash);
  put_u64(ds.seed);
  put_u64(static_cast<std::uint64_t>(ds.node_count));
  std::uint64_t bits;
  std::memcpy(&bits, &ds.noise_std, sizeof(bits));
  put_u64(bits);
  put_u64(ds.sensors.size());
  put_u64(ds.sensors[0].size());
  put_u64(ds.displacements[0].size());
  put_u64(ds.sensor_desc.size());
  os.write(ds.sensor_desc.data(), static_cast<std::streamsize>(ds.sensor_desc.size()));
  for (std::size_t i = 0; i < ds.sensors.size(); ++i) {
    os.write(reinterpret_cast<const char*>(ds.sensors[i].data()),
             static_cast<std::streamsize>(ds.sensors[i].size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(ds.displacements[i].data()),
             static_cast<std::streamsize>(ds.displacements[i].size() * sizeof(double)));
  }
  if (!os) throw DataError("write failed for '" + path + "'");
}

Dataset read_dataset_binary(const std::string& path) {
  std::ifstream is = open_in(path, true);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw DataError("'" + path + "' is not a binary dataset file");
  auto get_u64 = [&is, &path]() {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw DataError("truncated binary dataset '" + path + "'");
    return v;
  };
  Dataset ds;
  ds.model_hash = get_u64();
  ds.seed = get_u64();
  ds.node_count = static_cast<int>(get_u64());
  std::uint64_t bits = get_u64();
  std::memcpy(&ds.noise_std, &bits, sizeof(bits));
  std::uint64_t rows = get_u64();
  std::uint64_t ns = get_u64();
  std::uint64_t nd = get_u64();
  std::uint64_t desc_len = get_u64();
  if (rows == 0 || ns == 0 || nd == 0 || rows > (1ull << 32) || desc_len > (1ull << 20))
    throw DataError("binary dataset '" + path + "' has an implausible header");
  ds.sensor_desc.resize(desc_len);
  is.read(ds.sensor_desc.data(), static_cast<std::streamsize>(desc_len));
  ds.sensors.assign(rows, Vec(ns));
  ds.displacements.assign(rows, Vec(nd));
  for (std::uint64_t i = 0; i < rows; ++i) {
    is.read(reinterpret_cast<char*>(ds.sensors[i].data()),
            static_cast<std::streamsize>(ns * sizeof(double)));
    is.read(reinterpret_cast<char*>(ds.displacements[i].data()),
            static_cast<std::streamsize>(nd * sizeof(double)));
    if (!is) throw DataError("truncated binary dataset '" + path + "'");
  }
  return ds;
}

}  // namespace qfem::fem
