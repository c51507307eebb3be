#include "causal/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "causal/error.hpp"

namespace causal::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

// Splits "# a=1 b=2" into {a: 1, b: 2}.
std::map<std::string, std::string> read_header(std::istream& in, const std::string& kind) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (line.empty() || line[0] != '#') parse_error(kind + ": missing '# key=value' header line");
  std::map<std::string, std::string> fields;
  std::stringstream ss(line.substr(1));
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) parse_error(kind + ": malformed header token '" + tok + "'");
    fields[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return fields;
}

std::size_t header_size(const std::map<std::string, std::string>& h, const std::string& key,
                        const std::string& kind) {
  const auto it = h.find(key);
  if (it == h.end()) parse_error(kind + ": header lacks '" + key + "='");
  try {
    std::size_t used = 0;
    const long v = std::stol(it->second, &used);
    if (used != it->second.size() || v < 0) throw std::invalid_argument(it->second);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    parse_error(kind + ": bad value for '" + key + "'");
  }
}

std::vector<std::vector<double>> read_rows(std::istream& in, const std::string& kind) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        parse_error(kind + ": cannot parse number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> flatten_rows(const std::vector<std::vector<double>>& rows, std::size_t n_rows,
                                 std::size_t n_cols, const std::string& kind) {
  if (rows.size() != n_rows) {
    parse_error(kind + ": expected " + std::to_string(n_rows) + " rows, found " +
                std::to_string(rows.size()));
  }
  std::vector<double> flat;
  flat.reserve(n_rows * n_cols);
  for (const auto& r : rows) {
    if (r.size() != n_cols) parse_error(kind + ": expected " + std::to_string(n_cols) + " values per row");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return flat;
}

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  out << '\n';
}

}  // namespace

FeatureStack read_stack_csv(std::istream& in) {
  const auto h = read_header(in, "stack");
  const std::size_t k = header_size(h, "k", "stack");
  const std::size_t n = header_size(h, "n", "stack");
  auto flat = flatten_rows(read_rows(in, "stack"), k * n, n, "stack");
  return FeatureStack(k, n, std::move(flat));
}

void write_stack_csv(std::ostream& out, const FeatureStack& stack) {
  out << "# k=" << stack.k() << " n=" << stack.n() << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < stack.k(); ++i) {
    for (std::size_t r = 0; r < stack.n(); ++r) write_row(out, stack.map(i).subspan(r * stack.n(), stack.n()));
  }
}

CausalityMap read_map_csv(std::istream& in) {
  const auto h = read_header(in, "map");
  const std::size_t k = header_size(h, "k", "map");
  Estimator method = Estimator::Max;
  if (auto it = h.find("method"); it != h.end()) method = parse_estimator(it->second);
  auto flat = flatten_rows(read_rows(in, "map"), k, k, "map");
  return CausalityMap(k, std::move(flat), method);
}

void write_map_csv(std::ostream& out, const CausalityMap& map) {
  out << "# k=" << map.k() << " method=" << to_string(map.method()) << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < map.k(); ++i) write_row(out, map.entries().subspan(i * map.k(), map.k()));
}

FactorVector read_factors_csv(std::istream& in) {
  const auto h = read_header(in, "factors");
  const std::size_t k = header_size(h, "k", "factors");
  FactorConfig cfg;
  if (auto it = h.find("direction"); it != h.end()) cfg.direction = parse_direction(it->second);
  if (auto it = h.find("mode"); it != h.end()) cfg.mode = parse_mode(it->second);
  return {flatten_rows(read_rows(in, "factors"), 1, k, "factors"), cfg};
}

void write_factors_csv(std::ostream& out, const FactorVector& factors) {
  out << "# k=" << factors.size() << " direction=" << to_string(factors.config.direction)
      << " mode=" << to_string(factors.config.mode) << '\n'
      << std::setprecision(17);
  write_row(out, factors.weights);
}

Image read_image_csv(std::istream& in) {
  const auto h = read_header(in, "image");
  const std::size_t rows = header_size(h, "h", "image");
  const std::size_t cols = header_size(h, "w", "image");
  const std::size_t ch = header_size(h, "c", "image");
  auto flat = flatten_rows(read_rows(in, "image"), rows, cols * ch, "image");
  return Image(rows, cols, ch, std::move(flat));
}

void write_image_csv(std::ostream& out, const Image& img) {
  out << "# h=" << img.height() << " w=" << img.width() << " c=" << img.channels() << '\n'
      << std::setprecision(17);
  const std::size_t row = img.width() * img.channels();
  for (std::size_t r = 0; r < img.height(); ++r) write_row(out, img.pixels().subspan(r * row, row));
}

void write_image_pnm(std::ostream& out, const Image& img, double lo, double hi) {
  out << (img.channels() == 1 ? "P5" : "P6") << '\n'
      << img.width() << ' ' << img.height() << "\n255\n";
  for (double v : img.pixels()) {
    const double t = (std::clamp(v, lo, hi) - lo) / (hi - lo);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
  }
}

Image read_pgm(std::istream& in) {
  auto token = [&in]() {
    std::string t;
    while (in >> t) {
      if (t[0] != '#') return t;
      std::string rest;
      std::getline(in, rest);
    }
    parse_error("pgm: truncated header");
  };
  if (token() != "P5") parse_error("pgm: only binary P5 graymaps are supported");
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::invalid_argument&) {
    parse_error("pgm: malformed header");
  }
  if (maxval == 0 || maxval > 255) parse_error("pgm: only 8-bit graymaps are supported");
  in.get();  // single whitespace before the raster
  std::vector<double> px(w * h);
  for (double& v : px) {
    const int c = in.get();
    if (c == EOF) parse_error("pgm: truncated raster");
    v = static_cast<double>(c) / static_cast<double>(maxval);
  }
  return Image(h, w, 1, std::move(px));
}

void write_map_heatmap(std::ostream& out, const CausalityMap& map) {
  const auto e = map.entries();
  const double top = *std::max_element(e.begin(), e.end());
  std::vector<double> px(e.begin(), e.end());
  if (top > 0.0) {
    for (double& v : px) v /= top;
  }
  write_image_pnm(out, Image(map.k(), map.k(), 1, std::move(px)));
}

Config read_config(std::istream& in) {
  Config cfg;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_error("config line " + std::to_string(lineno) + ": empty key");
    if (!cfg.emplace(key, value).second) parse_error("config: key '" + key + "' appears twice");
  }
  return cfg;
}

std::string params_to_json(const DeskNetParams& params) {
  nlohmann::ordered_json j;
  j["variant"] = to_string(params.variant);
  const auto groups = params.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) j[DeskNetParams::group_names()[g]] = *groups[g];
  return j.dump() + "\n";
}

DeskNetParams params_from_json(const std::string& text) {
  DeskNetParams p;
  try {
    const auto j = nlohmann::json::parse(text);
    p.variant = parse_variant(j.at("variant").get<std::string>());
    auto groups = p.groups();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      *groups[g] = j.at(DeskNetParams::group_names()[g]).get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("params file: ") + e.what());
  }
  return p;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorKind::InvalidInput, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace causal::io
