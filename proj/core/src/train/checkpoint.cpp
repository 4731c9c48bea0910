#include "v1motion/train/checkpoint.hpp"

#include <sstream>

#include "../common/binary.hpp"
#include "v1motion/common/error.hpp"
#include "v1motion/eval/pnm.hpp"

namespace v1motion::train {

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  ck.encoder.validate();
  ck.motion.validate();
  nlohmann::json support = nlohmann::json::array();
  for (const auto& o : ck.motion.support()) support.push_back({o.x, o.y});
  const auto& g = ck.motion.grid();
  const nlohmann::json header = {
      {"format", "v1motion-checkpoint"},
      {"config", to_json(ck.config)},
      {"encoder",
       {{"num_blocks", ck.encoder.num_blocks()}, {"block_dim", ck.encoder.block_dim()}, {"patch", ck.encoder.patch()}}},
      {"motion",
       {{"kind", model::to_string(ck.motion.kind())},
        {"num_blocks", ck.motion.num_blocks()},
        {"block_dim", ck.motion.block_dim()},
        {"disp_lo", g.lo()},
        {"disp_hi", g.hi()},
        {"disp_step", g.step()},
        {"support", support},
        {"param_count", ck.motion.params().size()}}}};
  const std::string text = header.dump();

  std::ostringstream out(std::ios::binary);
  detail::put_magic(out, "V1CK");
  detail::put<std::uint32_t>(out, kCheckpointVersion);
  detail::put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto& w = ck.encoder.weights();
  for (Eigen::Index r = 0; r < w.rows(); ++r)
    for (Eigen::Index c = 0; c < w.cols(); ++c) detail::put<double>(out, w(r, c));
  for (double v : ck.motion.params()) detail::put<double>(out, v);
  const std::string bytes = out.str();
  return {bytes.begin(), bytes.end()};
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  std::istringstream in(std::string(bytes.begin(), bytes.end()), std::ios::binary);
  detail::expect_magic(in, "V1CK", "checkpoint");
  const auto version = detail::get<std::uint32_t>(in, "checkpoint header");
  if (version != kCheckpointVersion) throw VersionError("unsupported checkpoint version " + std::to_string(version));
  const auto length = detail::get<std::uint64_t>(in, "checkpoint header");
  if (length > bytes.size()) throw FormatError("truncated checkpoint header");
  std::string text(static_cast<std::size_t>(length), '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (in.gcount() != static_cast<std::streamsize>(length)) throw FormatError("truncated checkpoint header");

  Checkpoint ck;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("format").get<std::string>() != "v1motion-checkpoint") throw FormatError("not a checkpoint");
    update_from_json(ck.config, header.at("config"));
    const auto& e = header.at("encoder");
    const int K = e.at("num_blocks").get<int>();
    const int d = e.at("block_dim").get<int>();
    const int p = e.at("patch").get<int>();
    if (K < 1 || d < 1 || p < 1 || static_cast<double>(K) * d * p * p * 8.0 > static_cast<double>(bytes.size()))
      throw FormatError("encoder shape exceeds the file size");
    Eigen::MatrixXd w(K * d, p * p);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = detail::get<double>(in, "encoder block");
    ck.encoder = model::Encoder(K, d, p, std::move(w));

    const auto& m = header.at("motion");
    std::vector<model::Pos> support;
    for (const auto& o : m.at("support")) support.push_back({o.at(0).get<int>(), o.at(1).get<int>()});
    const auto count = m.at("param_count").get<std::size_t>();
    if (count > bytes.size() / 8) throw FormatError("motion parameter count exceeds the file size");
    std::vector<double> params(count);
    for (double& v : params) v = detail::get<double>(in, "motion block");
    ck.motion = model::MotionModel::restore(model::motion_kind_from_string(m.at("kind").get<std::string>()),
                                            m.at("num_blocks").get<int>(), m.at("block_dim").get<int>(),
                                            model::DisplacementGrid(m.at("disp_lo").get<double>(),
                                                                    m.at("disp_hi").get<double>(),
                                                                    m.at("disp_step").get<double>()),
                                            std::move(support), std::move(params));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid checkpoint contents: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("invalid checkpoint contents: ") + e.what());
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after checkpoint blocks");
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  eval::write_file(path, encode_checkpoint(ck));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(eval::read_file(path)); }

}  // namespace v1motion::train
