// CSV interchange format for datasets and frame files, plus the JSON metadata
// sidecar that records how a dataset was produced.
//
// Single-contact rows: cx1..cx10,cy1..cy10,force_n,node_x,node_y,lambda   (24)
// Two-contact rows:    cx1..cx10,cy1..cy10,f1_n,x1,y1,f2_n,x2,y2          (26)
// Node coordinates are written as integers, reals as fixed "%.9f".
#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eskin/core.hpp"

namespace eskin {

namespace io_detail {

inline void put_real(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  out << buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

inline double parse_real(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size() || errno == ERANGE)
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse number '" + cell + "'");
  return v;
}

inline int parse_int(const std::string& cell, std::size_t line_no) {
  double v = parse_real(cell, line_no);
  if (v != std::floor(v) || std::abs(v) > 1e6)
    throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + cell + "'");
  return static_cast<int>(v);
}

}  // namespace io_detail

inline std::vector<std::string> frame_header() {
  std::vector<std::string> h;
  for (int i = 1; i <= kTerminalsPerAxis; ++i) h.push_back("cx" + std::to_string(i));
  for (int i = 1; i <= kTerminalsPerAxis; ++i) h.push_back("cy" + std::to_string(i));
  return h;
}

inline std::vector<std::string> dataset_header(Schema schema) {
  auto h = frame_header();
  if (schema == Schema::SingleContact) {
    h.insert(h.end(), {"force_n", "node_x", "node_y", "lambda"});
  } else {
    h.insert(h.end(), {"f1_n", "x1", "y1", "f2_n", "x2", "y2"});
  }
  return h;
}

inline std::string join_header(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  return s;
}

// FNV-1a, used to fingerprint generator configurations.
inline std::string digest_hex(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline nlohmann::json meta_to_json(const DatasetMeta& m) {
  return {{"schema", std::string(schema_name(m.schema))},
          {"schema_version", m.schema_version},
          {"seed", m.seed},
          {"generator_config_digest", m.generator_config_digest}};
}

inline DatasetMeta meta_from_json(const nlohmann::json& j) {
  try {
    DatasetMeta m;
    m.schema = schema_from_name(j.at("schema").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.generator_config_digest = j.at("generator_config_digest").get<std::string>();
    m.schema_version = j.value("schema_version", kSchemaVersion);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metadata sidecar: ") + e.what());
  }
}

inline void write_frame_cells(std::ostream& out, const CapacitanceFrame& f) {
  const auto feats = f.features();
  for (int i = 0; i < kFeatureCount; ++i) {
    if (i) out << ',';
    io_detail::put_real(out, feats[i]);
  }
}

// Writes the CSV to `csv` and, when given, the metadata record to `meta`.
inline void write_dataset(const Dataset& ds, std::ostream& csv, std::ostream* meta = nullptr) {
  ds.check_homogeneous();
  csv << join_header(dataset_header(ds.meta.schema)) << '\n';
  for (const auto& s : ds.samples) {
    if (const auto* a = std::get_if<SingleContactSample>(&s)) {
      write_frame_cells(csv, a->frame);
      csv << ',';
      io_detail::put_real(csv, a->force.newtons);
      csv << ',' << a->node.x << ',' << a->node.y << ',';
      io_detail::put_real(csv, a->stretch.lambda);
    } else {
      const auto& b = std::get<TwoContactSample>(s);
      write_frame_cells(csv, b.frame);
      csv << ',';
      io_detail::put_real(csv, b.force1.newtons);
      csv << ',' << b.node1.x << ',' << b.node1.y << ',';
      io_detail::put_real(csv, b.force2.newtons);
      csv << ',' << b.node2.x << ',' << b.node2.y;
    }
    csv << '\n';
  }
  if (!csv) throw IoError("failed writing dataset CSV");
  if (meta) {
    *meta << meta_to_json(ds.meta).dump(2) << '\n';
    if (!*meta) throw IoError("failed writing dataset metadata");
  }
}

// Schema is inferred from the header's column count (24 or 26). If `meta` is
// given, its schema must agree.
inline Dataset read_dataset(std::istream& csv, std::istream* meta = nullptr) {
  using io_detail::parse_int;
  using io_detail::parse_real;
  std::string line;
  if (!std::getline(csv, line)) throw ParseError("line 1: missing header row");
  const auto header = io_detail::split_csv(line);
  Dataset ds;
  if (header.size() == SingleContactSample::kWidth) {
    ds.meta.schema = Schema::SingleContact;
  } else if (header.size() == TwoContactSample::kWidth) {
    ds.meta.schema = Schema::TwoContact;
  } else {
    throw ParseError("line 1: header has " + std::to_string(header.size()) +
                     " columns, expected 24 or 26");
  }
  if (header != dataset_header(ds.meta.schema)) throw ParseError("line 1: unexpected column names");
  if (meta) {
    nlohmann::json j;
    try {
      *meta >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("metadata sidecar: ") + e.what());
    }
    auto m = meta_from_json(j);
    if (m.schema != ds.meta.schema)
      throw SchemaError("metadata schema '" + std::string(schema_name(m.schema)) +
                        "' disagrees with CSV columns");
    ds.meta = m;
  }
  const std::size_t width = header.size();
  std::size_t line_no = 1;
  while (std::getline(csv, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = io_detail::split_csv(line);
    if (cells.size() != width)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " columns, got " + std::to_string(cells.size()));
    std::array<double, kFeatureCount> f{};
    for (int i = 0; i < kFeatureCount; ++i) f[i] = parse_real(cells[i], line_no);
    const auto frame = CapacitanceFrame::from_features(f);
    try {
      if (ds.meta.schema == Schema::SingleContact) {
        SingleContactSample s{frame, {parse_real(cells[20], line_no)},
                              {parse_int(cells[21], line_no), parse_int(cells[22], line_no)},
                              {parse_real(cells[23], line_no)}};
        s.validate();
        ds.samples.emplace_back(s);
      } else {
        TwoContactSample s{frame,
                           {parse_real(cells[20], line_no)},
                           {parse_int(cells[21], line_no), parse_int(cells[22], line_no)},
                           {parse_real(cells[23], line_no)},
                           {parse_int(cells[24], line_no), parse_int(cells[25], line_no)}};
        s.validate();
        ds.samples.emplace_back(s);
      }
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ds;
}

// Frame files: header + 20 capacitance columns per row.
inline void write_frames(const std::vector<CapacitanceFrame>& frames, std::ostream& out) {
  out << join_header(frame_header()) << '\n';
  for (const auto& f : frames) {
    write_frame_cells(out, f);
    out << '\n';
  }
}

inline std::vector<CapacitanceFrame> read_frames(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("line 1: missing header row");
  const auto header = io_detail::split_csv(line);
  if (header.size() < static_cast<std::size_t>(kFeatureCount) ||
      !std::equal(header.begin(), header.begin() + kFeatureCount, frame_header().begin()))
    throw ParseError("line 1: frame file must start with cx1..cx10,cy1..cy10");
  std::vector<CapacitanceFrame> frames;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = io_detail::split_csv(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " columns, got " + std::to_string(cells.size()));
    std::array<double, kFeatureCount> f{};
    for (int i = 0; i < kFeatureCount; ++i) f[i] = io_detail::parse_real(cells[i], line_no);
    auto frame = CapacitanceFrame::from_features(f);
    try {
      frame.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    frames.push_back(frame);
  }
  return frames;
}

// Writes via a temporary sibling and renames, so a failed write never leaves a
// partial file at `path`.
template <class WriteFn>
void write_file_atomic(const std::filesystem::path& path, WriteFn&& fn) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    try {
      fn(out);
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, path);
}

inline std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".meta.json";
  return p;
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path) {
  ds.check_homogeneous();
  write_file_atomic(csv_path, [&](std::ostream& out) { write_dataset(ds, out); });
  write_file_atomic(meta_path_for(csv_path),
                    [&](std::ostream& out) { out << meta_to_json(ds.meta).dump(2) << '\n'; });
}

inline Dataset load_dataset(const std::filesystem::path& csv_path) {
  std::ifstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open dataset '" + csv_path.string() + "'");
  const auto mp = meta_path_for(csv_path);
  if (std::filesystem::exists(mp)) {
    std::ifstream meta(mp, std::ios::binary);
    return read_dataset(csv, &meta);
  }
  return read_dataset(csv);
}

}  // namespace eskin
