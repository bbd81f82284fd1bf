#include "upright/nets/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace upright {

namespace {

constexpr char kMagic[8] = {'U', 'P', 'R', 'N', 'E', 'T', '0', '1'};
constexpr uint32_t kVersion = 1;

void writeBytes(std::ofstream& out, const void* data, size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void readBytes(std::ifstream& in, void* data, size_t n, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n))
    throw std::runtime_error(std::string("checkpoint truncated reading ") + what);
}

}  // namespace

void saveNet(const std::string& path, const Mlp& net, const VecX& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);

  writeBytes(out, kMagic, sizeof(kMagic));
  const uint32_t version = kVersion;
  const uint32_t act = static_cast<uint32_t>(net.activation());
  const uint32_t nSizes = static_cast<uint32_t>(net.sizes().size());
  writeBytes(out, &version, 4);
  writeBytes(out, &act, 4);
  writeBytes(out, &nSizes, 4);
  for (int s : net.sizes()) {
    const uint32_t v = static_cast<uint32_t>(s);
    writeBytes(out, &v, 4);
  }
  const uint64_t paramCount = static_cast<uint64_t>(net.paramCount());
  const uint64_t extraCount = static_cast<uint64_t>(extra.size());
  writeBytes(out, &paramCount, 8);
  writeBytes(out, &extraCount, 8);
  const VecX params = net.params();
  writeBytes(out, params.data(), paramCount * 8);
  if (extraCount > 0) writeBytes(out, extra.data(), extraCount * 8);
  if (!out) throw std::runtime_error("write failed for " + path);
}

LoadedNet loadNet(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);

  char magic[8];
  readBytes(in, magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("bad checkpoint magic in " + path);

  uint32_t version = 0, act = 0, nSizes = 0;
  readBytes(in, &version, 4, "version");
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version in " + path);
  readBytes(in, &act, 4, "activation");
  if (act > 1) throw std::runtime_error("bad activation id in " + path);
  readBytes(in, &nSizes, 4, "size count");
  if (nSizes < 2 || nSizes > 64)
    throw std::runtime_error("bad layer count in " + path);

  std::vector<int> sizes(nSizes);
  for (uint32_t i = 0; i < nSizes; ++i) {
    uint32_t v = 0;
    readBytes(in, &v, 4, "layer size");
    if (v == 0 || v > 1u << 20)
      throw std::runtime_error("bad layer size in " + path);
    sizes[i] = static_cast<int>(v);
  }

  LoadedNet loaded;
  loaded.net = Mlp(sizes, static_cast<Activation>(act));

  uint64_t paramCount = 0, extraCount = 0;
  readBytes(in, &paramCount, 8, "parameter count");
  readBytes(in, &extraCount, 8, "extra count");
  if (paramCount != static_cast<uint64_t>(loaded.net.paramCount()))
    throw std::runtime_error("parameter count mismatch in " + path);
  if (extraCount > 1u << 20)
    throw std::runtime_error("bad extra count in " + path);

  VecX params(static_cast<int>(paramCount));
  readBytes(in, params.data(), paramCount * 8, "parameters");
  loaded.net.setParams(params);
  loaded.extra = VecX(static_cast<int>(extraCount));
  if (extraCount > 0)
    readBytes(in, loaded.extra.data(), extraCount * 8, "extra");
  return loaded;
}

}  // namespace upright
