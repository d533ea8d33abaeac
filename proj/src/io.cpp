#include "dismet/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dismet/errors.hpp"

namespace dismet {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw Error(ErrorCode::MalformedFile, "read failure on " + path);
  return buf.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = line.find(',', start);
    std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
    std::size_t a = cell.find_first_not_of(" \t");
    std::size_t b = cell.find_last_not_of(" \t");
    fields.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return fields;
}

double parse_double(const std::string& cell, const std::string& where) {
  if (cell.empty()) throw Error(ErrorCode::MalformedFile, "empty cell in " + where);
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (*first == '+') ++first;  // from_chars rejects an explicit plus
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::MalformedFile, "cannot parse number '" + cell + "' in " + where);
  }
  return v;
}

long long parse_int(const std::string& cell, const std::string& where) {
  if (cell.empty()) throw Error(ErrorCode::MalformedFile, "empty cell in " + where);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::MalformedFile, "cannot parse integer '" + cell + "' in " + where);
  }
  return v;
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidValue, "unformattable value");
  return std::string(buf, ptr);
}

constexpr char kMagic[4] = {'D', 'M', 'E', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = get_u64(p);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

PosteriorSet load_posteriors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path);
  char head[4] = {0, 0, 0, 0};
  in.read(head, 4);
  in.close();
  if (std::memcmp(head, kMagic, 4) == 0) return load_posteriors_binary(path);
  return load_posteriors_csv(path);
}

PosteriorSet load_posteriors_csv(const std::string& path) {
  std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty()) throw Error(ErrorCode::MalformedFile, path + " is empty");
  std::vector<std::string> header = split_fields(lines[0]);
  if (header.size() < 2 || header.size() % 2 != 0) {
    throw Error(ErrorCode::MalformedFile, path + ": header must list mu_i,sigma_i pairs");
  }
  std::size_t n_latents = header.size() / 2;
  for (std::size_t i = 0; i < n_latents; ++i) {
    if (header[2 * i] != "mu_" + std::to_string(i) ||
        header[2 * i + 1] != "sigma_" + std::to_string(i)) {
      throw Error(ErrorCode::MalformedFile,
                  path + ": expected header mu_" + std::to_string(i) + ",sigma_" +
                      std::to_string(i) + " but saw " + header[2 * i] + "," + header[2 * i + 1]);
    }
  }
  std::size_t n_samples = lines.size() - 1;
  if (n_samples == 0) throw Error(ErrorCode::MalformedFile, path + " has no data rows");
  std::vector<double> means(n_samples * n_latents);
  std::vector<double> stds(n_samples * n_latents);
  for (std::size_t n = 0; n < n_samples; ++n) {
    std::vector<std::string> cells = split_fields(lines[n + 1]);
    std::string where = path + " row " + std::to_string(n + 1);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::MalformedFile, where + " has " + std::to_string(cells.size()) +
                                                " cells, expected " + std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < n_latents; ++i) {
      means[n * n_latents + i] = parse_double(cells[2 * i], where);
      stds[n * n_latents + i] = parse_double(cells[2 * i + 1], where);
    }
  }
  return PosteriorSet::create(n_samples, n_latents, std::move(means), std::move(stds));
}

PosteriorSet load_posteriors_binary(const std::string& path) {
  std::string raw = read_file(path);
  if (raw.size() < 20 || std::memcmp(raw.data(), kMagic, 4) != 0) {
    throw Error(ErrorCode::MalformedFile, path + ": missing DMET header");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  std::uint32_t version = get_u32(p + 4);
  if (version != 1) {
    throw Error(ErrorCode::MalformedFile, path + ": unsupported version " + std::to_string(version));
  }
  std::uint64_t n = get_u64(p + 8);
  std::uint32_t l = get_u32(p + 16);
  unsigned __int128 expected = static_cast<unsigned __int128>(n) * l * 16 + 20;
  if (expected != raw.size()) {
    throw Error(ErrorCode::MalformedFile, path + ": payload size does not match header");
  }
  std::size_t count = static_cast<std::size_t>(n) * l;
  std::vector<double> means(count);
  std::vector<double> stds(count);
  const unsigned char* cursor = p + 20;
  for (std::size_t i = 0; i < count; ++i, cursor += 8) means[i] = get_f64(cursor);
  for (std::size_t i = 0; i < count; ++i, cursor += 8) stds[i] = get_f64(cursor);
  return PosteriorSet::create(static_cast<std::size_t>(n), l, std::move(means), std::move(stds));
}

void save_posteriors_csv(const PosteriorSet& ps, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path);
  for (std::size_t i = 0; i < ps.n_latents; ++i) {
    out << (i ? "," : "") << "mu_" << i << ",sigma_" << i;
  }
  out << "\n";
  for (std::size_t n = 0; n < ps.n_samples; ++n) {
    for (std::size_t i = 0; i < ps.n_latents; ++i) {
      out << (i ? "," : "") << format_double(ps.mean(n, i)) << "," << format_double(ps.stddev(n, i));
    }
    out << "\n";
  }
  if (!out.good()) throw Error(ErrorCode::MalformedFile, "write failure on " + path);
}

void save_posteriors_binary(const PosteriorSet& ps, const std::string& path) {
  std::string out;
  out.reserve(20 + ps.means.size() * 16);
  out.append(kMagic, 4);
  put_u32(out, 1);
  put_u64(out, ps.n_samples);
  put_u32(out, static_cast<std::uint32_t>(ps.n_latents));
  for (double v : ps.means) put_f64(out, v);
  for (double v : ps.stds) put_f64(out, v);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::MalformedFile, "cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f.good()) throw Error(ErrorCode::MalformedFile, "write failure on " + path);
}

FactorTable load_factors(const std::string& path, std::size_t factor_bins) {
  if (factor_bins < 1) throw Error(ErrorCode::InvalidValue, "factor_bins must be >= 1");
  std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.empty()) throw Error(ErrorCode::MalformedFile, path + " is empty");

  std::size_t cursor = 0;
  std::vector<std::int32_t> declared;
  bool have_declared = false;
  if (!lines[0].empty() && lines[0][0] == '#') {
    const std::string prefix = "#card=";
    if (lines[0].rfind(prefix, 0) != 0) {
      throw Error(ErrorCode::MalformedFile, path + ": unknown directive " + lines[0]);
    }
    for (const std::string& cell : split_fields(lines[0].substr(prefix.size()))) {
      long long c = parse_int(cell, path + " #card line");
      if (c < 1 || c > 1000000) {
        throw Error(ErrorCode::InvalidValue, path + ": declared cardinality out of range");
      }
      declared.push_back(static_cast<std::int32_t>(c));
    }
    have_declared = true;
    cursor = 1;
  }
  if (cursor >= lines.size()) throw Error(ErrorCode::MalformedFile, path + " has no header");

  std::vector<std::string> header = split_fields(lines[cursor]);
  std::size_t n_factors = header.size();
  for (std::size_t k = 0; k < n_factors; ++k) {
    // both y_k and yk spellings are around in the wild
    if (header[k] != "y_" + std::to_string(k) && header[k] != "y" + std::to_string(k)) {
      throw Error(ErrorCode::MalformedFile,
                  path + ": expected header column y_" + std::to_string(k) + ", saw " + header[k]);
    }
  }
  if (have_declared && declared.size() != n_factors) {
    throw Error(ErrorCode::MalformedFile, path + ": #card line length does not match header");
  }
  ++cursor;
  std::size_t n_samples = lines.size() - cursor;
  if (n_samples == 0) throw Error(ErrorCode::MalformedFile, path + " has no data rows");

  std::vector<double> raw(n_samples * n_factors);
  std::vector<bool> integral(n_factors, true);
  std::vector<double> col_min(n_factors, std::numeric_limits<double>::infinity());
  std::vector<double> col_max(n_factors, -std::numeric_limits<double>::infinity());
  for (std::size_t n = 0; n < n_samples; ++n) {
    std::vector<std::string> cells = split_fields(lines[cursor + n]);
    std::string where = path + " row " + std::to_string(cursor + n + 1);
    if (cells.size() != n_factors) {
      throw Error(ErrorCode::MalformedFile, where + " has " + std::to_string(cells.size()) +
                                                " cells, expected " + std::to_string(n_factors));
    }
    for (std::size_t k = 0; k < n_factors; ++k) {
      double v = parse_double(cells[k], where);
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidValue, where + ": non-finite factor value");
      raw[n * n_factors + k] = v;
      if (!(v == std::floor(v)) || std::fabs(v) > 2147483000.0) integral[k] = false;
      if (v < col_min[k]) col_min[k] = v;
      if (v > col_max[k]) col_max[k] = v;
    }
  }

  std::vector<std::int32_t> labels(n_samples * n_factors);
  std::vector<std::int32_t> cards(n_factors);
  std::vector<bool> quantized(n_factors, false);
  for (std::size_t k = 0; k < n_factors; ++k) {
    if (integral[k]) {
      std::int32_t max_label = 0;
      for (std::size_t n = 0; n < n_samples; ++n) {
        double v = raw[n * n_factors + k];
        if (v < 0.0) {
          throw Error(ErrorCode::LabelOutOfRange,
                      path + ": negative label in factor " + std::to_string(k));
        }
        auto lab = static_cast<std::int32_t>(v);
        labels[n * n_factors + k] = lab;
        if (lab > max_label) max_label = lab;
      }
      if (max_label >= 1000000) {
        throw Error(ErrorCode::TooLarge, path + ": factor " + std::to_string(k) +
                                             " has cardinality above 1e6");
      }
      cards[k] = have_declared ? declared[k] : max_label + 1;
    } else {
      if (have_declared) {
        throw Error(ErrorCode::InvalidValue,
                    path + ": factor " + std::to_string(k) +
                        " has a declared cardinality but contains non-integer values");
      }
      // Continuous column: equal-width bins over the observed range.
      quantized[k] = true;
      if (col_min[k] == col_max[k]) {
        cards[k] = 1;
        for (std::size_t n = 0; n < n_samples; ++n) labels[n * n_factors + k] = 0;
      } else {
        cards[k] = static_cast<std::int32_t>(factor_bins);
        double w = (col_max[k] - col_min[k]) / static_cast<double>(factor_bins);
        for (std::size_t n = 0; n < n_samples; ++n) {
          double v = raw[n * n_factors + k];
          auto bin = static_cast<std::size_t>((v - col_min[k]) / w);
          if (bin >= factor_bins) bin = factor_bins - 1;
          labels[n * n_factors + k] = static_cast<std::int32_t>(bin);
        }
      }
    }
  }

  FactorTable ft = FactorTable::create(n_samples, n_factors, std::move(labels), std::move(cards));
  ft.quantized_from_continuous = std::move(quantized);
  return ft;
}

void save_factors_csv(const FactorTable& ft, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path);
  out << "#card=";
  for (std::size_t k = 0; k < ft.n_factors; ++k) out << (k ? "," : "") << ft.cardinalities[k];
  out << "\n";
  for (std::size_t k = 0; k < ft.n_factors; ++k) out << (k ? "," : "") << "y_" << k;
  out << "\n";
  for (std::size_t n = 0; n < ft.n_samples; ++n) {
    for (std::size_t k = 0; k < ft.n_factors; ++k) out << (k ? "," : "") << ft.label(n, k);
    out << "\n";
  }
  if (!out.good()) throw Error(ErrorCode::MalformedFile, "write failure on " + path);
}

void load_soft_labels(FactorTable& ft, std::size_t k, const std::string& path) {
  if (k >= ft.n_factors) {
    throw Error(ErrorCode::KOutOfRange, "soft labels target factor " + std::to_string(k) +
                                            " but table has " + std::to_string(ft.n_factors));
  }
  std::vector<std::string> lines = split_lines(read_file(path));
  if (lines.size() < 2) throw Error(ErrorCode::MalformedFile, path + " has no data rows");
  std::vector<std::string> header = split_fields(lines[0]);
  std::size_t card = static_cast<std::size_t>(ft.cardinalities[k]);
  if (header.size() != card) {
    throw Error(ErrorCode::MalformedFile, path + ": expected " + std::to_string(card) +
                                              " probability columns for factor " + std::to_string(k));
  }
  for (std::size_t c = 0; c < card; ++c) {
    if (header[c] != "p_" + std::to_string(c)) {
      throw Error(ErrorCode::MalformedFile, path + ": expected header column p_" + std::to_string(c));
    }
  }
  if (lines.size() - 1 != ft.n_samples) {
    throw Error(ErrorCode::MalformedFile, path + ": row count does not match the factor table");
  }
  std::vector<double> rows(ft.n_samples * card);
  for (std::size_t n = 0; n < ft.n_samples; ++n) {
    std::vector<std::string> cells = split_fields(lines[n + 1]);
    std::string where = path + " row " + std::to_string(n + 2);
    if (cells.size() != card) throw Error(ErrorCode::MalformedFile, where + ": wrong cell count");
    for (std::size_t c = 0; c < card; ++c) rows[n * card + c] = parse_double(cells[c], where);
  }
  ft.attach_soft(k, std::move(rows));
}

}  // namespace dismet
