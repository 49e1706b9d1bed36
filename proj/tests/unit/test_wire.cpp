#include <catch_amalgamated.hpp>

#include <random>

#include "gridmon/wire/batch.hpp"
#include "gridmon/wire/frame.hpp"
#include "gridmon/wire/keyring.hpp"

using namespace gridmon;
using namespace gridmon::wire;

namespace {

Key random_key(std::mt19937_64& rng) {
  Key k;
  for (auto& b : k) b = static_cast<std::uint8_t>(rng());
  return k;
}

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

BaseRecord random_record(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  BaseRecord r;
  r.point_id = static_cast<std::uint32_t>(rng());
  r.ts_ms = rng() >> 10;
  r.resolution = kAllResolutions[rng() % 4];
  r.flags = static_cast<std::uint8_t>(rng());
  for (std::size_t i = 0; i < kParameterCount; ++i) set_parameter(r, static_cast<Parameter>(i), u(rng));
  return r;
}

KeyLookup only(std::uint32_t id, const Key& k) {
  return [id, &k](std::uint32_t d) -> const Key* { return d == id ? &k : nullptr; };
}

}  // namespace

TEST_CASE("nonce layout is device id then seq, big-endian") {
  auto n = make_nonce(7, 2);
  Nonce want{0, 0, 0, 7, 0, 0, 0, 0, 0, 0, 0, 2};
  CHECK(n == want);
}

TEST_CASE("sealed frame sizes") {
  Key k{};
  FrameHeader h{FrameType::kData, 1, 1, 0};
  CHECK(seal_frame(h, {}, k).size() == kHeaderSize + kTagSize);
  CHECK(seal_frame(h, Bytes(10), k).size() == kHeaderSize + 10 + kTagSize);
}

TEST_CASE("open(seal(x)) returns x") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    Key k = random_key(rng);
    FrameHeader h{static_cast<FrameType>(1 + rng() % 5), static_cast<std::uint32_t>(rng()), rng(), 0};
    Bytes p = random_bytes(rng, rng() % 300);
    auto sealed = seal_frame(h, p, k);
    auto opened = open_frame(sealed, only(h.device_id, k));
    REQUIRE(opened);
    h.payload_len = static_cast<std::uint32_t>(p.size() + kTagSize);
    REQUIRE(opened->header == h);
    REQUIRE(opened->payload == p);
  }
}

TEST_CASE("open_frame failures") {
  std::mt19937_64 rng(2);
  Key k = random_key(rng);
  FrameHeader h{FrameType::kData, 3, 9, 0};
  auto sealed = seal_frame(h, random_bytes(rng, 40), k);

  SECTION("every single-bit flip is rejected") {
    for (std::size_t bit = 0; bit < sealed.size() * 8; ++bit) {
      Bytes m = sealed;
      m[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      REQUIRE_FALSE(open_frame(m, only(3, k)));
    }
  }
  SECTION("ciphertext flips report AUTH_FAILED") {
    Bytes m = sealed;
    m[kHeaderSize + 5] ^= 0x10;
    auto r = open_frame(m, only(3, k));
    REQUIRE_FALSE(r);
    CHECK(r.error() == WireErrc::kAuthFailed);
  }
  SECTION("wrong key") {
    Key other = k;
    other[0] ^= 1;
    auto r = open_frame(sealed, only(3, other));
    REQUIRE_FALSE(r);
    CHECK(r.error() == WireErrc::kAuthFailed);
  }
  SECTION("unknown device") {
    auto r = open_frame(sealed, only(4, k));
    REQUIRE_FALSE(r);
    CHECK(r.error() == WireErrc::kUnknownDevice);
  }
  SECTION("short input") {
    for (std::size_t n : {0, 1, 21}) {
      auto r = open_frame(ByteView(sealed.data(), n), only(3, k));
      REQUIRE_FALSE(r);
      CHECK(r.error() == WireErrc::kTruncated);
    }
    auto r = open_frame(ByteView(sealed.data(), sealed.size() - 1), only(3, k));
    REQUIRE_FALSE(r);
    CHECK(r.error() == WireErrc::kTruncated);
  }
  SECTION("header checks") {
    Bytes m = sealed;
    m[0] = 'X';
    CHECK(open_frame(m, only(3, k)).error() == WireErrc::kBadMagic);
    m = sealed;
    m[4] = 2;
    CHECK(open_frame(m, only(3, k)).error() == WireErrc::kBadVersion);
    m = sealed;
    m[5] = 9;
    CHECK(open_frame(m, only(3, k)).error() == WireErrc::kBadFrameType);
  }
}

TEST_CASE("nonce log flags reuse of a (key, nonce) pair") {
  Key k{};
  NonceLog log;
  FrameHeader h{FrameType::kData, 1, 5, 0};
  seal_frame(h, {}, k, &log);
  h.seq = 6;
  seal_frame(h, {}, k, &log);
  CHECK(log.size() == 2);
  CHECK(log.duplicates() == 0);
  seal_frame(h, {}, k, &log);
  CHECK(log.duplicates() == 1);
  Key k2{};
  k2[0] = 1;
  seal_frame(h, {}, k2, &log);
  CHECK(log.duplicates() == 1);
}

TEST_CASE("frame assembler splits a byte stream at frame boundaries") {
  std::mt19937_64 rng(4);
  Key k = random_key(rng);
  std::vector<Bytes> frames;
  Bytes stream;
  for (int i = 0; i < 50; ++i) {
    frames.push_back(seal_frame({FrameType::kData, 1, static_cast<std::uint64_t>(i + 1), 0},
                                random_bytes(rng, rng() % 100), k));
    stream.insert(stream.end(), frames.back().begin(), frames.back().end());
  }
  FrameAssembler fa;
  std::vector<Bytes> got;
  std::size_t pos = 0;
  while (pos < stream.size()) {
    std::size_t n = std::min<std::size_t>(1 + rng() % 37, stream.size() - pos);
    fa.feed(ByteView(stream.data() + pos, n));
    pos += n;
    while (auto f = fa.next()) {
      REQUIRE(*f);
      got.push_back(**f);
    }
  }
  CHECK(got == frames);

  FrameAssembler bad;
  Bytes junk(kHeaderSize, 0);
  bad.feed(junk);
  auto r = bad.next();
  REQUIRE(r);
  CHECK_FALSE(*r);
}

TEST_CASE("batch encodings") {
  CHECK(encode_batch({}) == Bytes{0, 0});
  BaseRecord r;
  CHECK(encode_batch(std::span(&r, 1)).size() == 2 + kRecordSize);
  CHECK(kRecordSize == 134);
  CHECK(encode_event_batch({}) == Bytes{0, 0});
  PQEvent e;
  CHECK(encode_event_batch(std::span(&e, 1)).size() == 32);
  std::vector<BaseRecord> too_many(kMaxBatchRecords + 1);
  CHECK_THROWS_AS(encode_batch(too_many), std::length_error);
}

TEST_CASE("batch round trips") {
  std::mt19937_64 rng(6);
  std::vector<BaseRecord> rs;
  for (int i = 0; i < 1000; ++i) rs.push_back(random_record(rng));
  for (std::size_t off = 0; off < rs.size(); off += kMaxBatchRecords) {
    std::span<const BaseRecord> chunk(rs.data() + off, std::min(kMaxBatchRecords, rs.size() - off));
    auto back = decode_batch(encode_batch(chunk));
    REQUIRE(back);
    REQUIRE(back->size() == chunk.size());
    for (std::size_t i = 0; i < chunk.size(); ++i) REQUIRE(bitwise_equal((*back)[i], chunk[i]));
  }

  std::vector<PQEvent> es;
  for (int i = 0; i < 200; ++i) {
    PQEvent e;
    e.point_id = static_cast<std::uint32_t>(rng());
    e.type = static_cast<EventType>(1 + rng() % 3);
    e.phase_mask = static_cast<std::uint8_t>(1 + rng() % 7);
    e.start_ms = rng() >> 8;
    e.end_ms = e.start_ms + rng() % 100000;
    e.extreme_pu = static_cast<double>(rng() % 2000) / 1000.0;
    es.push_back(e);
  }
  auto back = decode_event_batch(encode_event_batch(es));
  REQUIRE(back);
  CHECK(*back == es);

  CHECK(decode_u64_payload(encode_u64_payload(0xDEADBEEFCAFEull)).value() == 0xDEADBEEFCAFEull);
}

TEST_CASE("batch decoding rejects malformed payloads") {
  BaseRecord r;
  auto b = encode_batch(std::span(&r, 1));
  b.pop_back();
  CHECK_FALSE(decode_batch(b));
  b = encode_batch(std::span(&r, 1));
  b[1] = 2;  // count says 2, one present
  CHECK_FALSE(decode_batch(b));
  b = encode_batch(std::span(&r, 1));
  b[2 + 12] = 7;  // resolution code
  auto bad = decode_batch(b);
  REQUIRE_FALSE(bad);
  CHECK(bad.error() == WireErrc::kBadResolutionCode);

  PQEvent e;
  auto eb = encode_event_batch(std::span(&e, 1));
  eb[2 + 4] = 0;  // event type
  auto bad_e = decode_event_batch(eb);
  REQUIRE_FALSE(bad_e);
  CHECK(bad_e.error() == WireErrc::kBadEventType);
  CHECK_FALSE(decode_u64_payload(Bytes(7)));
}

TEST_CASE("keyring TSV") {
  auto ring = Keyring::parse_tsv("# id\tkey\n1\t000102030405060708090a0b0c0d0e0f\n");
  REQUIRE(ring.find(1));
  CHECK((*ring.find(1))[15] == 0x0f);
  CHECK_FALSE(ring.find(2));
  auto again = Keyring::parse_tsv(ring.to_tsv());
  CHECK(*again.find(1) == *ring.find(1));
  CHECK_THROWS(Keyring::parse_tsv("1\t0001\n"));
  CHECK_THROWS(Keyring::parse_tsv("1\tzz0102030405060708090a0b0c0d0e0f\n"));
  CHECK(Keyring::derive_demo_key(1, 1) == Keyring::derive_demo_key(1, 1));
  CHECK(Keyring::derive_demo_key(1, 1) != Keyring::derive_demo_key(1, 2));
}
