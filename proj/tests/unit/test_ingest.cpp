#include <catch_amalgamated.hpp>

#include <fstream>

#include "gridmon/ingest/ingest_core.hpp"
#include "gridmon/ingest/server.hpp"
#include "gridmon/wire/batch.hpp"
#include "support/temp_dir.hpp"

using namespace gridmon;
using namespace gridmon::ingest;
using gridmon::testing::TempDir;

namespace {

constexpr EpochMs kT0 = 1'700'000'400'000;

PointRegistry registry_of(int n) {
  std::string csv = "point_id,name,nominal_voltage_v,nominal_frequency_hz\n";
  for (int i = 1; i <= n; ++i) csv += std::to_string(i) + ",p" + std::to_string(i) + ",230,50\n";
  return PointRegistry::parse_csv(csv);
}

BaseRecord r3s(std::uint32_t point, EpochMs ts, double v = 1.0) {
  BaseRecord r;
  r.point_id = point;
  r.ts_ms = ts;
  r.resolution = Resolution::R3S;
  r.frequency_hz = 50.0;
  r.vrms_pu = {v, v, v};
  r.irms_a = {10, 10, 10};
  r.p_w = 6000;
  r.s_va = 6900;
  return r;
}

// Center-side ingest stack over one directory.
struct Stack {
  explicit Stack(const std::filesystem::path& dir, int points = 3)
      : registry(registry_of(points)),
        store({dir / "data", false, &registry, {}}),
        rollup(store),
        core(registry, store, events, rollup, dir / "wal", false) {}

  PointRegistry registry;
  store::TieredStore store;
  store::EventStore events;
  Rollup rollup;
  IngestCore core;
};

wire::FrameHeader data_header(std::uint32_t device, std::uint64_t seq) {
  return {wire::FrameType::kData, device, seq, 0};
}

Bytes one(const BaseRecord& r) { return wire::encode_batch(std::span(&r, 1)); }

}  // namespace

TEST_CASE("session cumulative acks") {
  SessionState s(1);
  std::vector<std::uint64_t> acks;
  for (std::uint64_t seq : {1, 3, 2}) {
    REQUIRE(s.classify(seq) == SessionState::Admission::kNew);
    s.accept(seq);
    acks.push_back(s.cum_seq());
  }
  CHECK(acks == std::vector<std::uint64_t>{1, 1, 3});
  CHECK(s.pending().empty());
  CHECK(s.classify(2) == SessionState::Admission::kDuplicate);
  CHECK(s.classify(0) == SessionState::Admission::kDuplicate);
  CHECK(s.classify(4) == SessionState::Admission::kNew);
  CHECK(s.classify(3 + SessionState::kMaxPending + 1) == SessionState::Admission::kTooFar);

  SessionState in_order(2);
  std::vector<std::uint64_t> seq_acks;
  for (std::uint64_t seq : {1, 2, 3}) {
    in_order.accept(seq);
    seq_acks.push_back(in_order.cum_seq());
  }
  CHECK(seq_acks == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("core acks cumulatively and ignores resends") {
  TempDir dir;
  Stack st(dir.path());
  CHECK(st.core.hello(1) == 0);
  CHECK(st.core.process_frame(data_header(1, 1), one(r3s(1, kT0))) == 1);
  CHECK(st.core.process_frame(data_header(1, 3), one(r3s(1, kT0 + 6000))) == 1);
  CHECK(st.core.process_frame(data_header(1, 2), one(r3s(1, kT0 + 3000))) == 3);
  CHECK(st.store.hot_record_count() == 3);

  // A resend with different content must not change the store.
  CHECK(st.core.process_frame(data_header(1, 2), one(r3s(1, kT0 + 3000, 0.5))) == 3);
  CHECK(st.store.get(1, Resolution::R3S, kT0 + 3000)->vrms_pu[0] == 1.0);
  CHECK(st.core.counters().duplicates == 1);
  CHECK(st.core.counters().frames == 4);
  CHECK(st.core.hello(1) == 3);
}

TEST_CASE("invalid records are counted and skipped; undecodable frames are not acked") {
  TempDir dir;
  Stack st(dir.path());
  BaseRecord bad = r3s(9, kT0);  // unknown point
  std::vector<BaseRecord> batch{r3s(1, kT0), bad, r3s(1, kT0 + 1)};  // last one misaligned
  CHECK(st.core.process_frame(data_header(1, 1), wire::encode_batch(batch)) == 1);
  CHECK(st.core.counters().invalid_records == 2);
  CHECK(st.store.hot_record_count() == 1);

  CHECK_THROWS_AS(st.core.process_frame(data_header(1, 2), Bytes{0, 5, 1}), IngestError);
  CHECK(st.core.cum_seq(1) == 1);
}

TEST_CASE("WAL replay rebuilds sessions, records and events") {
  TempDir dir;
  {
    Stack st(dir.path());
    for (std::uint64_t i = 1; i <= 41; ++i)
      st.core.process_frame(data_header(2, i), one(r3s(2, kT0 + 3000 * i)));
    PQEvent e{2, EventType::kSag, 1, kT0, kT0 + 4000, 0.6};
    st.core.process_frame({wire::FrameType::kEvent, 2, 42, 0}, wire::encode_event_batch(std::span(&e, 1)));
    std::vector<BaseRecord> imp{r3s(3, kT0)};
    st.core.import_records(imp);
  }
  Stack st(dir.path());
  st.core.replay();
  CHECK(st.core.hello(2) == 42);
  CHECK(st.store.query_range(2, Resolution::R3S, 0, ~0ull).size() == 41);
  CHECK(st.events.query(2, 0, ~0ull).size() == 1);
  CHECK(st.store.get(3, Resolution::R3S, kT0));
  CHECK(st.core.data_clock().now_ms() == kT0 + 3000 * 41 + 3000);

  // Device that claims less than the center holds is told to skip ahead.
  CHECK(st.core.hello(2) == 42);
}

TEST_CASE("empty WAL replays to empty state") {
  TempDir dir;
  Stack st(dir.path());
  st.core.replay();
  CHECK(st.core.hello(1) == 0);
  CHECK(st.store.hot_record_count() == 0);
}

TEST_CASE("torn final WAL entry is dropped on replay") {
  TempDir dir;
  {
    Stack st(dir.path());
    for (std::uint64_t i = 1; i <= 3; ++i)
      st.core.process_frame(data_header(1, i), one(r3s(1, kT0 + 3000 * i)));
  }
  auto wal = dir / "wal" / "1.wal";
  std::filesystem::resize_file(wal, std::filesystem::file_size(wal) - 5);
  Stack st(dir.path());
  st.core.replay();
  CHECK(st.core.hello(1) == 2);
  CHECK(st.store.hot_record_count() == 2);
  CHECK_FALSE(st.store.get(1, Resolution::R3S, kT0 + 9000));
  // The device resends 3 and it is accepted again.
  CHECK(st.core.process_frame(data_header(1, 3), one(r3s(1, kT0 + 9000))) == 3);
}

TEST_CASE("mid-file WAL corruption refuses to start") {
  TempDir dir;
  {
    Stack st(dir.path());
    for (std::uint64_t i = 1; i <= 3; ++i)
      st.core.process_frame(data_header(1, i), one(r3s(1, kT0 + 3000 * i)));
  }
  {
    std::fstream f(dir / "wal" / "1.wal", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(20);
    f.put('\x77');
  }
  Stack st(dir.path());
  try {
    st.core.replay();
    FAIL("expected CORRUPT_WAL");
  } catch (const IngestError& e) {
    CHECK(e.code() == IngestErrc::kCorruptWal);
  }
}

TEST_CASE("rollup examples") {
  TempDir dir;
  Stack st(dir.path());
  const EpochMs w = kT0;  // 10-minute aligned
  for (int i = 0; i < 200; ++i) st.core.import_records(std::vector<BaseRecord>{r3s(1, w + 3000ull * i)});
  for (int i = 0; i < 150; ++i) st.core.import_records(std::vector<BaseRecord>{r3s(2, w + 3000ull * i)});

  const EpochMs closes = w + 600000;
  CHECK(st.rollup.tick(closes).empty());  // grace not yet elapsed
  auto out = st.rollup.tick(closes + st.rollup.grace_ms());
  REQUIRE(out.size() == 2);
  auto full = st.store.get(1, Resolution::R10MIN, w);
  REQUIRE(full);
  CHECK((full->flags & record_flags::kIncomplete) == 0);
  auto part = st.store.get(2, Resolution::R10MIN, w);
  REQUIRE(part);
  CHECK((part->flags & record_flags::kIncomplete) != 0);
  CHECK_FALSE(st.store.get(3, Resolution::R10MIN, w));
  CHECK(st.rollup.pending_windows() == 0);
}

TEST_CASE("late data recomputes a closed rollup window") {
  TempDir dir;
  Stack st(dir.path());
  for (int i = 0; i < 199; ++i) st.core.import_records(std::vector<BaseRecord>{r3s(1, kT0 + 3000ull * i, 1.0)});
  st.rollup.tick(kT0 + 10'000'000);
  REQUIRE(st.store.get(1, Resolution::R10MIN, kT0)->flags & record_flags::kIncomplete);
  st.core.import_records(std::vector<BaseRecord>{r3s(1, kT0 + 3000ull * 199, 1.0)});
  CHECK(st.rollup.pending_windows() == 1);
  st.rollup.tick(kT0 + 10'000'000);
  CHECK((st.store.get(1, Resolution::R10MIN, kT0)->flags & record_flags::kIncomplete) == 0);
}

TEST_CASE("TCP server: hello, group ack and auth failure") {
  TempDir dir;
  Stack st(dir.path());
  wire::Keyring keys;
  const wire::Key key = wire::Keyring::derive_demo_key(1, 1);
  keys.add(1, key);
  wire::NonceLog nonces;
  IngestServer server(st.core, keys, {{"127.0.0.1", 0}, dir / "state", &nonces});
  server.start();
  const net::Endpoint ep{"127.0.0.1", server.port()};

  auto read_ack = [&](int fd, wire::FrameAssembler& fa) -> std::optional<std::uint64_t> {
    for (int tries = 0; tries < 50; ++tries) {
      if (auto raw = fa.next()) {
        REQUIRE(*raw);
        auto opened = wire::open_frame(**raw, keys.lookup());
        REQUIRE(opened);
        CHECK((opened->header.seq & wire::kServerSeqBit) != 0);
        REQUIRE(opened->header.frame_type == wire::FrameType::kAck);
        return *wire::decode_u64_payload(opened->payload);
      }
      Bytes chunk;
      auto s = net::recv_some(fd, chunk, std::chrono::milliseconds(100));
      if (s == net::RecvStatus::kClosed) return std::nullopt;
      fa.feed(chunk);
    }
    return std::nullopt;
  };

  {
    auto fd = net::tcp_connect(ep, std::chrono::milliseconds(1000));
    wire::FrameAssembler fa;
    auto hello = wire::seal_frame({wire::FrameType::kHello, 1, wire::kHelloSeqBit | 1, 0},
                                  wire::encode_u64_payload(0), key, &nonces);
    REQUIRE(net::send_all(fd.get(), hello));
    CHECK(read_ack(fd.get(), fa) == 0u);

    Bytes burst;
    for (std::uint64_t s = 1; s <= 5; ++s) {
      auto f = wire::seal_frame(data_header(1, s), one(r3s(1, kT0 + 3000 * s)), key, &nonces);
      burst.insert(burst.end(), f.begin(), f.end());
    }
    REQUIRE(net::send_all(fd.get(), burst));
    std::uint64_t last = 0;
    while (last < 5) {
      auto a = read_ack(fd.get(), fa);
      REQUIRE(a);
      CHECK(*a >= last);
      last = *a;
    }
    CHECK(st.store.hot_record_count() == 5);
  }
  {
    auto fd = net::tcp_connect(ep, std::chrono::milliseconds(1000));
    wire::FrameAssembler fa;
    auto forged = wire::seal_frame(data_header(1, 6), one(r3s(1, kT0 + 18000)),
                                   wire::Keyring::derive_demo_key(2, 1));
    REQUIRE(net::send_all(fd.get(), forged));
    CHECK_FALSE(read_ack(fd.get(), fa));
    CHECK(st.core.counters().auth_failures == 1);
    CHECK(st.store.hot_record_count() == 5);
  }
  server.stop();
  CHECK(nonces.duplicates() == 0);

  // A restarted server must not reuse reply nonces.
  IngestServer again(st.core, keys, {{"127.0.0.1", 0}, dir / "state", &nonces});
  again.start();
  auto fd = net::tcp_connect({"127.0.0.1", again.port()}, std::chrono::milliseconds(1000));
  wire::FrameAssembler fa;
  auto hello = wire::seal_frame({wire::FrameType::kHello, 1, wire::kHelloSeqBit | 2, 0},
                                wire::encode_u64_payload(5), key, &nonces);
  REQUIRE(net::send_all(fd.get(), hello));
  CHECK(read_ack(fd.get(), fa) == 5u);
  again.stop();
  CHECK(nonces.duplicates() == 0);
}
