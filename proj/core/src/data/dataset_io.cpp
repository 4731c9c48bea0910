#include "v1motion/data/dataset_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "../common/binary.hpp"
#include "v1motion/common/error.hpp"
#include "v1motion/eval/pnm.hpp"

namespace v1motion::data {

namespace {

std::string sample_name(std::size_t i, const char* suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu%s", i, suffix);
  return buf;
}

void write_sample(const SamplePair& pair, const std::filesystem::path& path, bool with_images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  detail::put_magic(out, "V1DS");
  detail::put<std::uint32_t>(out, kDatasetVersion);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(pair.current.width()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(pair.current.height()));
  if (with_images) {
    detail::put_f32_plane(out, pair.current.samples());
    detail::put_f32_plane(out, pair.next.samples());
  }
  detail::put_f32_plane(out, pair.flow.dx_plane());
  detail::put_f32_plane(out, pair.flow.dy_plane());
  if (!out) throw IoError("write failed for " + path.string());
}

SamplePair read_sample(const std::filesystem::path& path, bool with_images, int width, int height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string what = path.filename().string();
  detail::expect_magic(in, "V1DS", what);
  const auto version = detail::get<std::uint32_t>(in, "sample header");
  if (version != kDatasetVersion) throw VersionError("unsupported sample version " + std::to_string(version) + " in " + what);
  const auto w = detail::get<std::uint32_t>(in, "sample header");
  const auto h = detail::get<std::uint32_t>(in, "sample header");
  if (static_cast<int>(w) != width || static_cast<int>(h) != height)
    throw FormatError("sample " + what + " dimensions disagree with the manifest");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  SamplePair pair;
  if (with_images) {
    pair.current = model::Image(width, height, detail::get_f32_plane(in, n, "image block"));
    pair.next = model::Image(width, height, detail::get_f32_plane(in, n, "image block"));
  }
  pair.flow = model::FlowField(width, height);
  pair.flow.dx_plane() = detail::get_f32_plane(in, n, "field block");
  pair.flow.dy_plane() = detail::get_f32_plane(in, n, "field block");
  return pair;
}

}  // namespace

void write_dataset(const Dataset& data, const std::filesystem::path& dir, ImageMode mode) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create dataset directory " + dir.string() + ": " + ec.message());
  const int width = data.empty() ? 0 : data.pairs.front().current.width();
  const int height = data.empty() ? 0 : data.pairs.front().current.height();
  const bool pgm = mode == ImageMode::Pgm;

  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& pair = data.pairs[i];
    if (pair.current.width() != width || pair.current.height() != height || !pair.next.same_dims(pair.current) ||
        pair.flow.width() != width || pair.flow.height() != height)
      throw ShapeError("all pairs of a dataset must share one size");
    nlohmann::json entry = {{"file", sample_name(i, ".v1ds")}, {"seed", pair.seed}};
    write_sample(pair, dir / entry["file"].get<std::string>(), !pgm);
    if (pgm) {
      entry["current"] = sample_name(i, "_t0.pgm");
      entry["next"] = sample_name(i, "_t1.pgm");
      eval::write_pgm(dir / entry["current"].get<std::string>(), pair.current);
      eval::write_pgm(dir / entry["next"].get<std::string>(), pair.next);
    }
    samples.push_back(std::move(entry));
  }
  const nlohmann::json manifest = {{"format", "v1motion-dataset"},
                                   {"version", kDatasetVersion},
                                   {"count", data.size()},
                                   {"width", width},
                                   {"height", height},
                                   {"endianness", "little"},
                                   {"image_mode", pgm ? "pgm" : "float32"},
                                   {"spec", data.spec},
                                   {"samples", samples}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot create manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("write failed for manifest in " + dir.string());
}

Dataset read_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed dataset manifest: ") + e.what());
  }
  Dataset data;
  try {
    if (manifest.at("format").get<std::string>() != "v1motion-dataset") throw FormatError("not a dataset manifest");
    const auto version = manifest.at("version").get<std::uint32_t>();
    if (version != kDatasetVersion) throw VersionError("unsupported dataset version " + std::to_string(version));
    if (manifest.at("endianness").get<std::string>() != "little") throw FormatError("unsupported endianness");
    const int width = manifest.at("width").get<int>();
    const int height = manifest.at("height").get<int>();
    const std::string mode = manifest.at("image_mode").get<std::string>();
    if (mode != "float32" && mode != "pgm") throw FormatError("unknown image_mode '" + mode + "'");
    const bool pgm = mode == "pgm";
    const auto& samples = manifest.at("samples");
    if (samples.size() != manifest.at("count").get<std::size_t>()) throw FormatError("manifest count mismatch");
    data.spec = manifest.at("spec");
    for (const auto& entry : samples) {
      SamplePair pair = read_sample(dir / entry.at("file").get<std::string>(), !pgm, width, height);
      if (pgm) {
        pair.current = eval::read_pgm(dir / entry.at("current").get<std::string>());
        pair.next = eval::read_pgm(dir / entry.at("next").get<std::string>());
        if (pair.current.width() != width || pair.current.height() != height || !pair.next.same_dims(pair.current))
          throw FormatError("PGM image size disagrees with the manifest");
      }
      pair.seed = entry.at("seed").get<std::uint64_t>();
      data.pairs.push_back(std::move(pair));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed dataset manifest: ") + e.what());
  }
  return data;
}

}  // namespace v1motion::data
