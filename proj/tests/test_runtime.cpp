#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "gmcf/errors.hpp"
#include "gmcf/runtime.hpp"

using namespace gmcf;

namespace {

RuntimeConfig two_models(double dt1 = 60.0, double dt2 = 0.5) {
  return RuntimeConfig{{{1, "driver", dt1}, {2, "les", dt2}}};
}

Packet pkt(PacketType t, ModelId s, ModelId d, Microsteps ts = 0, std::int32_t id = 0) {
  Packet p{t, s, d, ts, id, std::nullopt};
  if (t == PacketType::RespData) p.payload = WindProfile::zeros(2, ts);
  return p;
}

const std::array<ModelId, 1> kFrom1 = {1};

}  // namespace

TEST(PacketType, FiveVariantsAndRoles) {
  EXPECT_EQ(kAllPacketTypes.size(), 5u);
  EXPECT_TRUE(is_request(PacketType::ReqTime));
  EXPECT_TRUE(is_request(PacketType::ReqData));
  EXPECT_TRUE(is_response(PacketType::RespTime));
  EXPECT_TRUE(is_response(PacketType::RespData));
  EXPECT_TRUE(is_control(PacketType::Fin));
  for (auto t : kAllPacketTypes) {
    EXPECT_EQ(int(is_request(t)) + int(is_response(t)) + int(is_control(t)), 1);
  }
}

TEST(Packet, Invariants) {
  EXPECT_NO_THROW(validate(pkt(PacketType::ReqTime, 1, 2)));
  EXPECT_THROW(validate(pkt(PacketType::ReqTime, 2, 2)), ProtocolError);
  EXPECT_THROW(validate(pkt(PacketType::ReqTime, 1, 2, -1)), ProtocolError);
  auto no_payload = pkt(PacketType::RespData, 1, 2);
  no_payload.payload.reset();
  EXPECT_THROW(validate(no_payload), ProtocolError);
  auto stray = pkt(PacketType::ReqData, 1, 2);
  stray.payload = WindProfile::zeros(1);
  EXPECT_THROW(validate(stray), ProtocolError);
}

TEST(TimeBase, DriverLesRatio120) {
  auto rt = create_runtime(two_models());
  EXPECT_EQ(rt->model_count(), 2u);
  EXPECT_DOUBLE_EQ(rt->time_base().microstep_seconds, 0.5);
  EXPECT_EQ(rt->reference_microsteps(), 120);
  EXPECT_EQ(rt->dt_microsteps(1), 120);
  EXPECT_EQ(rt->dt_microsteps(2), 1);
}

TEST(TimeBase, SingleModel) {
  auto rt = create_runtime(RuntimeConfig{{{1, "solo", 1.0}}});
  EXPECT_EQ(rt->model_count(), 1u);
  EXPECT_EQ(rt->reference_microsteps(), 1);
}

TEST(TimeBase, Rejections) {
  EXPECT_THROW(derive_time_base(RuntimeConfig{{{1, "a", 3.0}, {2, "b", 2.0}}}),
               ConfigError);
  EXPECT_THROW(derive_time_base(RuntimeConfig{{{1, "a", 1.0}, {1, "b", 1.0}}}),
               ConfigError);
  EXPECT_THROW(derive_time_base(RuntimeConfig{{{1, "a", 1.0}, {3, "b", 1.0}}}),
               ConfigError);
  EXPECT_THROW(derive_time_base(RuntimeConfig{{{1, "a", 0.0}}}), ConfigError);
  EXPECT_THROW(derive_time_base(RuntimeConfig{}), ConfigError);
}

TEST(Send, PerPairFifoOrder) {
  auto rt = create_runtime(two_models());
  rt->send(pkt(PacketType::ReqTime, 1, 2));
  rt->send(pkt(PacketType::ReqData, 1, 2, 0, 1));
  auto rx = rt->tile(2).rx_snapshot();
  ASSERT_EQ(rx.size(), 2u);
  EXPECT_EQ(rx[0].type, PacketType::ReqTime);
  EXPECT_EQ(rx[1].type, PacketType::ReqData);
  EXPECT_EQ(rt->sent_count(1, PacketType::ReqTime), 1u);
}

TEST(Send, RejectsEmptyRespDataAndUnknownDestination) {
  auto rt = create_runtime(two_models());
  auto p = pkt(PacketType::RespData, 1, 2);
  p.payload.reset();
  EXPECT_THROW(rt->send(p), ProtocolError);
  EXPECT_THROW(rt->send(pkt(PacketType::ReqTime, 1, 7)), AddressingError);
  EXPECT_EQ(rt->tile(2).rx_size(), 0u);
}

TEST(Tile, SendSourceMustBeOwner) {
  auto rt = create_runtime(two_models());
  EXPECT_THROW(rt->tile(1).send(pkt(PacketType::ReqTime, 2, 1)), ProtocolError);
}

TEST(WaitFor, PendingFirst) {
  auto rt = create_runtime(two_models());
  Tile& t = rt->tile(2);
  t.deliver(pkt(PacketType::RespTime, 1, 2));
  t.drain_rx_to_pending();
  t.deliver(pkt(PacketType::RespTime, 1, 2, 5));  // must stay in rx
  auto got = t.wait_for(PacketType::RespTime, kFrom1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].timestamp, 0);
  EXPECT_EQ(t.rx_size(), 1u);
}

TEST(WaitFor, ParksOtherTypes) {
  auto rt = create_runtime(two_models());
  Tile& t = rt->tile(2);
  t.deliver(pkt(PacketType::ReqData, 1, 2, 0, 1));
  t.deliver(pkt(PacketType::RespTime, 1, 2));
  auto got = t.wait_for(PacketType::RespTime, kFrom1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].type, PacketType::RespTime);
  EXPECT_EQ(t.pending_size(PacketType::ReqData), 1u);
  EXPECT_EQ(t.rx_size(), 0u);
}

TEST(WaitFor, FinFillsTheSlot) {
  auto rt = create_runtime(two_models());
  Tile& t = rt->tile(2);
  t.deliver(pkt(PacketType::Fin, 1, 2));
  auto got = t.wait_for(PacketType::RespTime, kFrom1);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].type, PacketType::Fin);
}

TEST(WaitFor, OnePacketPerSourceAndBlocksUntilAll) {
  auto rt = create_runtime(RuntimeConfig{{{1, "a", 1.0}, {2, "b", 1.0}, {3, "c", 1.0}}});
  Tile& t = rt->tile(3);
  t.deliver(pkt(PacketType::RespTime, 1, 3, 0));
  t.deliver(pkt(PacketType::RespTime, 1, 3, 1));
  std::thread late([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    rt->send(pkt(PacketType::RespTime, 2, 3, 0));
  });
  const std::array<ModelId, 2> from = {1, 2};
  auto got = t.wait_for(PacketType::RespTime, from);
  late.join();
  ASSERT_EQ(got.size(), 2u);
  EXPECT_NE(got[0].source, got[1].source);
  for (const auto& p : got) EXPECT_EQ(p.timestamp, 0);
  // The second RESPTIME from 1 was parked, not returned.
  EXPECT_EQ(t.pending_size(PacketType::RespTime), 1u);
}

TEST(ShiftPending, EmptyFifoAndRxUntouched) {
  auto rt = create_runtime(two_models());
  Tile& t = rt->tile(2);
  EXPECT_FALSE(t.shift_pending(PacketType::ReqData).has_value());
  t.deliver(pkt(PacketType::ReqData, 1, 2, 0, 1));
  t.deliver(pkt(PacketType::ReqData, 1, 2, 0, 2));
  t.drain_rx_to_pending();
  t.deliver(pkt(PacketType::ReqData, 1, 2, 0, 3));
  EXPECT_EQ(t.shift_pending(PacketType::ReqData)->data_id, 1);
  EXPECT_EQ(t.shift_pending(PacketType::ReqData)->data_id, 2);
  EXPECT_FALSE(t.shift_pending(PacketType::ReqData).has_value());
  EXPECT_EQ(t.rx_size(), 1u);
}

TEST(Run, NoOpModelsExitCleanly) {
  for (auto mode : {ExecutionMode::Threaded, ExecutionMode::Sequential}) {
    auto rt = create_runtime(two_models(1.0, 1.0), RuntimeOptions{mode, {}});
    std::atomic<int> calls{0};
    rt->register_entry("driver", [&](Tile&, ModelId id) { EXPECT_EQ(id, 1); ++calls; });
    rt->register_entry("les", [&](Tile&, ModelId id) { EXPECT_EQ(id, 2); ++calls; });
    auto exits = rt->run();
    ASSERT_EQ(exits.size(), 2u);
    for (const auto& e : exits) EXPECT_TRUE(e.ok) << e.error;
    EXPECT_EQ(calls.load(), 2);
    EXPECT_THROW(rt->run(), ConfigError);
  }
}

TEST(Run, MissingEntryIsConfigError) {
  auto rt = create_runtime(two_models());
  rt->register_entry("driver", [](Tile&, ModelId) {});
  EXPECT_THROW(rt->run(), ConfigError);
}

TEST(Run, AbortReleasesPeerWithSynthesizedFin) {
  for (auto mode : {ExecutionMode::Threaded, ExecutionMode::Sequential}) {
    auto rt = create_runtime(two_models(1.0, 1.0), RuntimeOptions{mode, {}});
    PacketType seen = PacketType::ReqTime;
    rt->register_entry("driver", [&](Tile& t, ModelId) {
      seen = t.wait_for(PacketType::RespTime, std::array<ModelId, 1>{2})[0].type;
    });
    rt->register_entry("les", [](Tile&, ModelId) {
      throw std::runtime_error("abort mid-loop");
    });
    auto exits = rt->run();
    EXPECT_TRUE(exits[0].ok);
    EXPECT_FALSE(exits[1].ok);
    EXPECT_NE(exits[1].error.find("abort mid-loop"), std::string::npos);
    EXPECT_TRUE(exits[1].exception != nullptr);
    EXPECT_EQ(seen, PacketType::Fin);
  }
}

TEST(Run, SequentialDeadlockIsReported) {
  auto rt = create_runtime(two_models(1.0, 1.0),
                           RuntimeOptions{ExecutionMode::Sequential, {}});
  auto wait_peer = [](Tile& t, ModelId id) {
    t.wait_for(PacketType::RespTime, std::array<ModelId, 1>{id == 1 ? 2 : 1});
  };
  rt->register_entry("driver", wait_peer);
  rt->register_entry("les", wait_peer);
  auto exits = rt->run();
  int failed = 0;
  for (const auto& e : exits) failed += e.ok ? 0 : 1;
  EXPECT_GE(failed, 1);
}

TEST(Run, ReceiveTimeout) {
  auto rt = create_runtime(two_models(1.0, 1.0),
                           RuntimeOptions{ExecutionMode::Threaded,
                                          std::chrono::milliseconds(50)});
  rt->register_entry("driver", [](Tile& t, ModelId) {
    t.wait_for(PacketType::RespTime, std::array<ModelId, 1>{2});
  });
  rt->register_entry("les", [](Tile& t, ModelId) {
    // Keeps model 1 waiting past the timeout, then leaves.
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    (void)t;
  });
  auto exits = rt->run();
  ASSERT_FALSE(exits[0].ok);
  EXPECT_THROW(std::rethrow_exception(exits[0].exception), TimeoutError);
}

// count(sent to m) = count(consumed by m) + count(left in m's pending).
TEST(Run, NoPacketLoss) {
  for (auto mode : {ExecutionMode::Threaded, ExecutionMode::Sequential}) {
    auto rt = create_runtime(two_models(1.0, 1.0), RuntimeOptions{mode, {}});
    rt->register_entry("driver", [](Tile& t, ModelId) {
      for (int n = 0; n < 50; ++n) {
        t.send(pkt(kAllPacketTypes[static_cast<std::size_t>(n % 4)], 1, 2, n, n % 3));
      }
      t.send(pkt(PacketType::Fin, 1, 2));
    });
    rt->register_entry("les", [](Tile& t, ModelId) {
      // Consume only REQDATA until the FIN arrives; the rest stays parked.
      for (;;) {
        auto got = t.wait_for(PacketType::ReqData, kFrom1);
        if (got[0].type == PacketType::Fin) break;
      }
    });
    auto exits = rt->run();
    ASSERT_TRUE(exits[1].ok) << exits[1].error;
    std::uint64_t sent = 0;
    for (auto ty : kAllPacketTypes) sent += rt->sent_count(1, ty);
    const Tile& t = rt->tile(2);
    EXPECT_EQ(sent, t.consumed().size() + t.pending_total());
    EXPECT_EQ(t.consumed().size(), 13u);  // 12 REQDATA + FIN
  }
}
