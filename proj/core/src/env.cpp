#include "kcover/env.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "kcover/rng.hpp"

namespace kcover {

Environment::Environment(GridSpec spec, std::vector<double> h_obs) : spec_(spec), h_(std::move(h_obs)) {
  spec_.validate();
  if (h_.size() != spec_.cell_count())
    throw LengthMismatch("Environment: heightmap has " + std::to_string(h_.size()) + " cells, expected " +
                         std::to_string(spec_.cell_count()));
  for (std::size_t c = 0; c < h_.size(); ++c) {
    if (!(h_[c] >= 0.0) || !(h_[c] <= spec_.z_max))
      throw HeightOutOfRange(c, h_[c], "Environment: h_obs[" + std::to_string(c) + "] = " + std::to_string(h_[c]) +
                                           " outside [0, " + std::to_string(spec_.z_max) + "]");
  }
  double area = spec_.cell_size * spec_.cell_size;
  double vol = 0.0;
  for (double h : h_) vol += (spec_.z_max - h) * area;
  free_volume_ = vol;
}

Environment make_environment(const GridSpec& spec, std::vector<double> h_obs) {
  return Environment(spec, std::move(h_obs));
}

void CityGenParams::validate(const GridSpec& spec) const {
  auto check_range = [](std::pair<int, int> r, const char* name) {
    if (r.first > r.second || r.first < 0)
      throw InvalidArgument(std::string("CityGenParams: empty or negative range ") + name);
  };
  check_range(n_rect_range, "n_rect_range");
  check_range(rect_w_range, "rect_w_range");
  check_range(rect_h_range, "rect_h_range");
  if (n_rect_range.second > 0) {  // size ranges are irrelevant when no rectangle is drawn
    if (rect_w_range.first < 1 || rect_h_range.first < 1)
      throw InvalidArgument("CityGenParams: rectangle sizes must be >= 1 cell");
    if (rect_w_range.second > spec.nx || rect_h_range.second > spec.ny)
      throw InvalidArgument("CityGenParams: rectangles must fit in the grid");
  }
  if (!(height_range.first > 0.0) || !(height_range.first <= height_range.second) ||
      !(height_range.second <= spec.z_max))
    throw InvalidArgument("CityGenParams: height_range must lie inside (0, z_max]");
}

namespace {

int draw_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
}

}  // namespace

Environment generate_random_city(const GridSpec& spec, const CityGenParams& params, std::uint64_t seed,
                                 CellMask* occupancy_out) {
  spec.validate();
  params.validate(spec);
  Rng rng(seed);

  CellMask occ(spec.nx, spec.ny, false);
  int n_rect = draw_int(rng, params.n_rect_range.first, params.n_rect_range.second);
  for (int r = 0; r < n_rect; ++r) {
    int w = draw_int(rng, params.rect_w_range.first, params.rect_w_range.second);
    int h = draw_int(rng, params.rect_h_range.first, params.rect_h_range.second);
    int x0 = draw_int(rng, 0, spec.nx - w);
    int y0 = draw_int(rng, 0, spec.ny - h);
    for (int j = y0; j < y0 + h; ++j)
      for (int i = x0; i < x0 + w; ++i) occ.set(i, j, true);
  }

  std::vector<double> heights(spec.cell_count(), 0.0);
  std::vector<std::uint8_t> visited(spec.cell_count(), 0);
  bool any_free = false;
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      if (!occ.at(i, j)) {
        any_free = true;
        continue;
      }
      std::size_t c0 = spec.index(i, j);
      if (visited[c0]) continue;
      double lo = params.height_range.first;
      double hi = params.height_range.second;
      double comp_height = lo + uniform_real01(rng) * (hi - lo);
      // BFS over the 4-connected component, neighbor order +x, -x, +y, -y.
      std::deque<Cell> queue{{i, j}};
      visited[c0] = 1;
      while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        heights[spec.index(c.i, c.j)] = comp_height;
        constexpr int di[4] = {1, -1, 0, 0};
        constexpr int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int ni = c.i + di[d], nj = c.j + dj[d];
          if (!spec.in_bounds(ni, nj) || !occ.at(ni, nj)) continue;
          std::size_t nc = spec.index(ni, nj);
          if (visited[nc]) continue;
          visited[nc] = 1;
          queue.push_back({ni, nj});
        }
      }
    }
  }
  if (!any_free) throw NoFreeCells("generate_random_city: every cell is occupied");
  if (occupancy_out) *occupancy_out = std::move(occ);
  return Environment(spec, std::move(heights));
}

CellMask street_mask(const Environment& env) {
  CellMask mask(env.nx(), env.ny(), false);
  for (std::size_t c = 0; c < env.heights().size(); ++c) mask.v[c] = env.heights()[c] == 0.0 ? 1 : 0;
  return mask;
}

void save_environment(const Environment& env, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_environment: cannot open " + path.string());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g %.17g", env.cell_size(), env.z_max());
  out << "KCOVER-ENV v1 " << env.nx() << ' ' << env.ny() << ' ' << buf << '\n';
  for (int j = 0; j < env.ny(); ++j) {
    for (int i = 0; i < env.nx(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", env.height(i, j));
      out << buf << (i + 1 == env.nx() ? '\n' : ' ');
    }
  }
  if (!out) throw IoError("save_environment: write failed for " + path.string());
}

Environment load_environment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_environment: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw ParseError(1, 0, "load_environment: empty file");
  std::istringstream hs(header);
  std::string magic, version;
  GridSpec spec;
  if (!(hs >> magic >> version >> spec.nx >> spec.ny >> spec.cell_size >> spec.z_max) || magic != "KCOVER-ENV" ||
      version != "v1")
    throw ParseError(1, 0, "load_environment: malformed header '" + header + "'");
  std::string extra;
  if (hs >> extra) throw ParseError(1, 0, "load_environment: trailing tokens in header");
  spec.validate();

  std::vector<double> h;
  h.reserve(spec.cell_count());
  double value;
  while (in >> value) h.push_back(value);
  if (!in.eof()) {
    // The stream stopped on a non-numeric token.
    in.clear();
    std::string tok;
    in >> tok;
    throw ParseError(-1, static_cast<long>(h.size()), "load_environment: invalid height token '" + tok + "'");
  }
  if (h.size() != spec.cell_count())
    throw LengthMismatch("load_environment: got " + std::to_string(h.size()) + " heights, expected " +
                         std::to_string(spec.cell_count()));
  return Environment(spec, std::move(h));
}

Environment import_pgm(const std::filesystem::path& path, double cell_size, double z_max) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("import_pgm: cannot open " + path.string());

  auto next_token = [&in]() {
    std::string tok;
    for (;;) {
      int ch = in.peek();
      if (ch == '#') {
        std::string line;
        std::getline(in, line);
        continue;
      }
      if (std::isspace(ch)) {
        in.get();
        continue;
      }
      break;
    }
    in >> tok;
    return tok;
  };

  std::string magic = next_token();
  if (magic != "P2" && magic != "P5") throw ParseError(1, 0, "import_pgm: not a PGM (P2/P5) file");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw ParseError(1, 0, "import_pgm: malformed PGM header");
  }
  if (width < 2 || height < 2 || maxval < 1 || maxval > 65535)
    throw ParseError(1, 0, "import_pgm: unsupported PGM dimensions or maxval");

  GridSpec spec{width, height, cell_size, z_max};
  std::vector<double> h(spec.cell_count());
  if (magic == "P2") {
    for (std::size_t c = 0; c < h.size(); ++c) {
      long v;
      if (!(in >> v)) throw ParseError(-1, static_cast<long>(c), "import_pgm: truncated pixel data");
      h[c] = static_cast<double>(v) / maxval * z_max;
    }
  } else {
    in.get();  // single whitespace after maxval
    int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(h.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
      throw ParseError(-1, static_cast<long>(in.gcount()), "import_pgm: truncated pixel data");
    for (std::size_t c = 0; c < h.size(); ++c) {
      long v = bytes == 1 ? raw[c] : (raw[2 * c] << 8) | raw[2 * c + 1];  // big-endian per PGM
      h[c] = static_cast<double>(v) / maxval * z_max;
    }
  }
  return Environment(spec, std::move(h));
}

}  // namespace kcover
