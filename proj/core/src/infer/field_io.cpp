#include "v1motion/infer/field_io.hpp"

#include <cstdio>
#include <fstream>

#include "../common/binary.hpp"
#include "v1motion/common/error.hpp"

namespace v1motion::infer {

namespace {

struct Lattice {
  int x0 = 0;
  int y0 = 0;
  int step = 1;
};

Lattice describe(const model::DisplacementField& f) {
  const auto& g = f.grid;
  if (g.positions.size() != static_cast<std::size_t>(g.nx) * g.ny || f.vectors.size() != g.positions.size())
    throw ShapeError("field lattice is inconsistent");
  Lattice l;
  if (g.positions.empty()) return l;
  l.x0 = g.positions.front().x;
  l.y0 = g.positions.front().y;
  if (g.nx > 1) l.step = g.positions[1].x - l.x0;
  else if (g.ny > 1) l.step = g.positions[static_cast<std::size_t>(g.nx)].y - l.y0;
  if (l.step < 1) throw ShapeError("field lattice is not regular");
  for (int r = 0; r < g.ny; ++r)
    for (int c = 0; c < g.nx; ++c)
      if (g.positions[static_cast<std::size_t>(r) * g.nx + c] != model::Pos{l.x0 + c * l.step, l.y0 + r * l.step})
        throw ShapeError("field lattice is not regular");
  return l;
}

}  // namespace

void write_field(const std::filesystem::path& path, const FieldFile& file) {
  const Lattice l = describe(file.field);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  detail::put_magic(out, "V1FD");
  detail::put<std::uint32_t>(out, kFieldVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(file.field.grid.nx));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(file.field.grid.ny));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(file.width));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(file.height));
  detail::put<std::int32_t>(out, l.x0);
  detail::put<std::int32_t>(out, l.y0);
  detail::put<std::int32_t>(out, l.step);
  std::vector<double> dx, dy;
  for (const auto& v : file.field.vectors) {
    dx.push_back(v.dx);
    dy.push_back(v.dy);
  }
  detail::put_f32_plane(out, dx);
  detail::put_f32_plane(out, dy);
  if (!out) throw IoError("write failed for " + path.string());
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  detail::expect_magic(in, "V1FD", path.filename().string());
  const auto version = detail::get<std::uint32_t>(in, "field header");
  if (version != kFieldVersion) throw VersionError("unsupported field version " + std::to_string(version));
  const auto nx = detail::get<std::uint32_t>(in, "field header");
  const auto ny = detail::get<std::uint32_t>(in, "field header");
  FieldFile file;
  file.width = static_cast<int>(detail::get<std::uint32_t>(in, "field header"));
  file.height = static_cast<int>(detail::get<std::uint32_t>(in, "field header"));
  const auto x0 = detail::get<std::int32_t>(in, "field header");
  const auto y0 = detail::get<std::int32_t>(in, "field header");
  const auto step = detail::get<std::int32_t>(in, "field header");
  if (nx > 100000 || ny > 100000 || step < 1) throw FormatError("implausible field header");
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  const auto dx = detail::get_f32_plane(in, n, "field block");
  const auto dy = detail::get_f32_plane(in, n, "field block");
  auto& g = file.field.grid;
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  for (std::uint32_t r = 0; r < ny; ++r)
    for (std::uint32_t c = 0; c < nx; ++c)
      g.positions.push_back({x0 + static_cast<int>(c) * step, y0 + static_cast<int>(r) * step});
  for (std::size_t i = 0; i < n; ++i) file.field.vectors.push_back({dx[i], dy[i]});
  return file;
}

void write_field_text(const std::filesystem::path& path, const model::DisplacementField& field) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  char line[96];
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto p = field.positions()[i];
    std::snprintf(line, sizeof line, "%d %d %.9g %.9g\n", p.x, p.y, field.vectors[i].dx, field.vectors[i].dy);
    out << line;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace v1motion::infer
