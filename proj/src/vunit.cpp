#include "lanesim/vunit.hpp"

#include <cstring>
#include <fstream>

namespace lanesim::vunit {

uint64_t MemoryModel::read8(uint64_t addr) const {
  ensure(addr + 8);
  uint64_t v;
  std::memcpy(&v, bytes_.data() + addr, 8);
  return v;
}

void MemoryModel::write8(uint64_t addr, uint64_t value) {
  ensure(addr + 8);
  std::memcpy(bytes_.data() + addr, &value, 8);
}

void MemoryModel::read_block(uint64_t addr, void* dst, size_t n) const {
  ensure(addr + n);
  std::memcpy(dst, bytes_.data() + addr, n);
}

void MemoryModel::write_block(uint64_t addr, const void* src, size_t n) {
  ensure(addr + n);
  std::memcpy(bytes_.data() + addr, src, n);
}

void MemoryModel::load_file(const std::string& path, uint64_t base) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open memory image '" + path + "'");
  std::vector<char> data((std::istreambuf_iterator<char>(f)),
                         std::istreambuf_iterator<char>());
  write_block(base, data.data(), data.size());
}

void MemoryModel::save_file(const std::string& path, uint64_t base,
                            size_t n) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write memory image '" + path + "'");
  ensure(base + n);
  f.write(reinterpret_cast<const char*>(bytes_.data() + base),
          static_cast<std::streamsize>(n));
}

std::vector<uint64_t> generate_addresses(const AddressStream& s) {
  std::vector<uint64_t> out;
  out.reserve(s.count);
  for (uint64_t k = 0; k < s.count; ++k) {
    uint64_t a = 0;
    switch (s.mode) {
      case AddrMode::UnitStride:
        a = s.base + k * s.elem_size;
        break;
      case AddrMode::ConstStride:
        a = s.base + static_cast<uint64_t>(static_cast<int64_t>(k) * s.stride);
        break;
      case AddrMode::Indexed:
        SIM_CHECK(k < s.indices.size());
        a = s.base + s.indices[k];
        break;
    }
    if (a % s.elem_size != 0)
      throw ConfigError("misaligned element address " + std::to_string(a));
    out.push_back(a);
  }
  return out;
}

std::vector<Burst> coalesce(const std::vector<uint64_t>& addrs,
                            unsigned elem_size) {
  std::vector<Burst> bursts;
  for (uint64_t a : addrs) {
    if (!bursts.empty() &&
        bursts.back().start + bursts.back().bytes == a) {
      bursts.back().bytes += elem_size;
    } else {
      bursts.push_back({a, elem_size});
    }
  }
  return bursts;
}

const char* to_string(StallReason r) {
  switch (r) {
    case StallReason::None: return "none";
    case StallReason::SequencerFull: return "sequencer-full";
    case StallReason::UnitBusy: return "unit-busy";
    case StallReason::SharedPath: return "shared-path";
  }
  return "?";
}

} // namespace lanesim::vunit
