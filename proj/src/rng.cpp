#include "ces/rng.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ces {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

Philox4x32::Block Philox4x32::block(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void Philox4x32::refill() {
  const Block ctr = {static_cast<std::uint32_t>(block_index_), static_cast<std::uint32_t>(block_index_ >> 32),
                     static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  const Key key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = block(ctr, key);
  ++block_index_;
  pos_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (pos_ == 4) refill();
  return buffer_[pos_++];
}

void Philox4x32::discard(std::uint64_t z) {
  const std::uint64_t in_buffer = static_cast<std::uint64_t>(4 - pos_);
  if (z <= in_buffer) {
    pos_ += static_cast<int>(z);
    return;
  }
  z -= in_buffer;
  block_index_ += z / 4;
  const int rest = static_cast<int>(z % 4);
  refill();
  pos_ = rest;
}

double uniform01(Philox4x32& eng) {
  const std::uint64_t hi = eng();
  const std::uint64_t lo = eng();
  const std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CES_SEED")) {
    try {
      return std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("CES_SEED is not an unsigned integer: ") + env);
    }
  }
  return 20240607ull;
}

}  // namespace ces
