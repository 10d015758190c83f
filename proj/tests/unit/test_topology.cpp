/*
 * Copyright (C) 2026 Fleet Middleware Contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/
#include <fleet/errors.hpp>
#include <fleet/messaging/framing.hpp>
#include <fleet/topology/multi_master.hpp>
#include <fleet/topology/single_master.hpp>

#include <gtest/gtest.h>

using namespace fleet;
using namespace fleet::messaging;
using namespace fleet::topology;

namespace {

template<typename Fn>
ErrorCode code_of(Fn&& fn)
{
  try
  {
    fn();
  }
  catch (const Error& e)
  {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

} // anonymous namespace

//==============================================================================
class SingleMasterTest : public ::testing::Test
{
protected:
  EventLoop loop;
  Network net{loop, 5};
  SingleMasterSystem sms{net, "server"};
  NodeId robot1{"robot1", "amcl", "Robot1"};
  NodeId robot2{"robot2", "amcl", "Robot2"};
  NodeId planner{"server", "planner", ""};
};

TEST_F(SingleMasterTest, ThreeRegisteredNodes)
{
  sms.register_node(robot1, "robot1");
  sms.register_node(robot2, "robot2");
  sms.register_node(planner, "server");
  EXPECT_EQ(sms.bus().registry().nodes().size(), 3u);
}

TEST_F(SingleMasterTest, NameConflictUnlessNamespaced)
{
  sms.register_node(NodeId{"robot1", "amcl", ""}, "robot1");
  EXPECT_EQ(code_of([&] { sms.register_node(NodeId{"robot2", "amcl", ""}, "robot2"); }),
    ErrorCode::NameConflict);
  EXPECT_NO_THROW(sms.register_node(robot2, "robot2"));
}

TEST_F(SingleMasterTest, WrongMasterUriIsMasterDown)
{
  EXPECT_EQ(code_of([&] { sms.register_node(robot1, "robot1", "http://elsewhere:11311"); }),
    ErrorCode::MasterDown);
  EXPECT_NO_THROW(sms.register_node(robot1, "robot1", "http://server:11311"));
}

TEST_F(SingleMasterTest, GlobalVisibility)
{
  sms.register_node(robot1, "robot1");
  sms.register_node(robot2, "robot2");
  sms.advertise(robot1, "/Robot1/amcl_pose", "PoseMsg");
  sms.advertise(robot1, "/Robot1/scan", "Blob");
  EXPECT_EQ(sms.lookup(robot2, "/Robot1/amcl_pose"), std::vector<NodeId>{robot1});
  EXPECT_EQ(sms.lookup(robot2, "/Robot1/scan"), std::vector<NodeId>{robot1});
  EXPECT_TRUE(sms.lookup(robot2, "/nope").empty());
}

TEST_F(SingleMasterTest, OnePublisherTwoSubscribersTwoLinks)
{
  sms.register_node(robot1, "robot1");
  sms.register_node(robot2, "robot2");
  sms.register_node(planner, "server");
  sms.advertise(robot1, "/Robot1/amcl_pose", "PoseMsg");
  sms.subscribe(robot2, "/Robot1/amcl_pose", "PoseMsg", nullptr);
  sms.subscribe(planner, "/Robot1/amcl_pose", "PoseMsg", nullptr);
  EXPECT_EQ(sms.resolve_and_connect("/Robot1/amcl_pose").size(), 2u);
}

TEST_F(SingleMasterTest, KillMasterKeepsLinks)
{
  sms.register_node(robot1, "robot1");
  sms.register_node(planner, "server");
  std::vector<std::uint64_t> got;
  sms.subscribe(planner, "/Robot1/amcl_pose", "PoseMsg",
    [&](const Envelope& e) { got.push_back(e.msg_id); });
  const auto handle = sms.advertise(robot1, "/Robot1/amcl_pose", "PoseMsg");
  sms.publish(handle, Bytes(10));
  loop.run();
  const auto links_before = sms.bus().links();

  sms.kill_master();
  EXPECT_NO_THROW(sms.kill_master());
  EXPECT_FALSE(sms.master_alive());
  for (int i = 0; i < 150; ++i)
  {
    sms.publish(handle, Bytes(10));
    loop.run_until(loop.now() + seconds_to_ns(0.01));
  }
  loop.run();
  EXPECT_EQ(got.size(), 151u);
  EXPECT_EQ(sms.bus().links(), links_before);

  EXPECT_EQ(code_of([&] { sms.subscribe(planner, "/Robot1/scan", "Blob", nullptr); }),
    ErrorCode::MasterDown);
  EXPECT_EQ(code_of([&] { sms.advertise(robot1, "/Robot1/new", "Blob"); }),
    ErrorCode::MasterDown);
  EXPECT_EQ(code_of([&] { sms.register_node(robot2, "robot2"); }),
    ErrorCode::MasterDown);
  EXPECT_EQ(code_of([&] { sms.resolve_and_connect("/Robot1/amcl_pose"); }),
    ErrorCode::MasterDown);
}

TEST_F(SingleMasterTest, HubIngressLinearInRobotsTimesSubscribers)
{
  // Oracle: every scan crosses once per hub subscriber.
  const auto hub_bytes = [](int robots, int subscribers)
    {
      EventLoop loop;
      Network net(loop, 1);
      SingleMasterSystem sms(net, "hub");
      std::vector<TopicHandle> handles;
      for (int r = 0; r < robots; ++r)
      {
        const NodeId node{"robot" + std::to_string(r), "scan", "R" + std::to_string(r)};
        sms.register_node(node, "robot" + std::to_string(r));
        handles.push_back(sms.advertise(node, "/R" + std::to_string(r) + "/scan", "Blob"));
      }
      for (int s = 0; s < subscribers; ++s)
      {
        const NodeId node{"hub", "consumer" + std::to_string(s), ""};
        sms.register_node(node, "hub");
        for (int r = 0; r < robots; ++r)
          sms.subscribe(node, "/R" + std::to_string(r) + "/scan", "Blob", nullptr);
      }
      loop.run();
      for (const auto& handle : handles)
        sms.publish(handle, Bytes(1000));
      loop.run();
      return net.ingress_bytes("hub", true);
    };
  const std::uint64_t unit = hub_bytes(1, 1);
  EXPECT_EQ(unit, 1064u);
  for (int m = 1; m <= 4; ++m)
    for (int k = 1; k <= 3; ++k)
      EXPECT_EQ(hub_bytes(m, k), unit * m * k) << m << "x" << k;
}

//==============================================================================
class MultiMasterTest : public ::testing::Test
{
protected:
  EventLoop loop;
  Network net{loop, 9};
  MultiMasterSystem mms{net};

  void run_for(double seconds)
  {
    loop.run_until(loop.now() + seconds_to_ns(seconds));
  }
};

TEST_F(MultiMasterTest, DiscoveryWithinTwoPeriods)
{
  mms.add_domain("robot1", "robot1");
  mms.add_domain("server", "server");
  mms.start();
  run_for(2.0);
  EXPECT_TRUE(mms.domain("robot1").known_peers().contains("server"));
  EXPECT_TRUE(mms.domain("server").known_peers().contains("robot1"));
}

TEST_F(MultiMasterTest, AloneKnowsNobody)
{
  mms.add_domain("solo", "solo");
  mms.start();
  run_for(10.0);
  EXPECT_TRUE(mms.domain("solo").known_peers().empty());
}

TEST_F(MultiMasterTest, SilentPeerExpiresAfterThreePeriods)
{
  mms.add_domain("a", "ha");
  mms.add_domain("b", "hb");
  mms.start();
  run_for(1.5);
  ASSERT_TRUE(mms.domain("a").known_peers().contains("b"));
  mms.stop_announcing("b");
  run_for(3.0);
  EXPECT_TRUE(mms.domain("a").known_peers().contains("b"));
  run_for(1.5);
  EXPECT_FALSE(mms.domain("a").known_peers().contains("b"));
}

TEST_F(MultiMasterTest, AllowlistSelectsExactlyTheNamedTopics)
{
  mms.add_domain("robot1", "robot1");
  mms.add_domain("server", "server");
  const NodeId amcl{"robot1", "amcl", ""};
  mms.register_node(amcl);
  mms.advertise(amcl, "/amcl_pose", "PoseMsg");
  mms.advertise(amcl, "/scan", "Blob");
  mms.sync_topics("server", {"/amcl_pose"});
  mms.start();
  run_for(2.5);
  EXPECT_EQ(mms.lookup("server", "/amcl_pose").size(), 1u);
  EXPECT_TRUE(mms.lookup("server", "/scan").empty());
  EXPECT_EQ(mms.synced_topics("server"), std::set<std::string>{"/amcl_pose"});
}

TEST_F(MultiMasterTest, EmptyAllowlistNoCrossDomainData)
{
  mms.add_domain("robot1", "robot1");
  mms.add_domain("server", "server");
  const NodeId amcl{"robot1", "amcl", ""};
  const NodeId planner{"server", "planner", ""};
  mms.register_node(amcl);
  mms.register_node(planner);
  const auto handle = mms.advertise(amcl, "/amcl_pose", "PoseMsg");
  int got = 0;
  mms.subscribe(planner, "/amcl_pose", "PoseMsg", [&](const Envelope&) { ++got; });
  mms.start();
  run_for(2.0);
  for (int i = 0; i < 20; ++i)
    mms.publish(handle, Bytes(100));
  run_for(2.0);
  EXPECT_EQ(got, 0);
  EXPECT_EQ(net.ingress_bytes("server", true), 0u);
  EXPECT_EQ(net.ingress_bytes("robot1", true), 0u);
}

TEST_F(MultiMasterTest, LateBindingAllowlist)
{
  mms.add_domain("robot1", "robot1");
  mms.add_domain("server", "server");
  mms.sync_topics("server", {"/later"});
  mms.start();
  run_for(3.0);
  EXPECT_TRUE(mms.lookup("server", "/later").empty());

  const NodeId node{"robot1", "late", ""};
  const NodeId planner{"server", "planner", ""};
  mms.register_node(node);
  mms.register_node(planner);
  int got = 0;
  mms.subscribe(planner, "/later", "Blob", [&](const Envelope&) { ++got; });
  const auto handle = mms.advertise(node, "/later", "Blob");
  run_for(1.0);
  EXPECT_EQ(mms.lookup("server", "/later").size(), 1u);
  mms.publish(handle, Bytes(5));
  run_for(1.0);
  EXPECT_EQ(got, 1);
}

TEST_F(MultiMasterTest, WildcardAllowlist)
{
  EXPECT_TRUE(allowlist_matches({"/Robot1/*"}, "/Robot1/scan"));
  EXPECT_FALSE(allowlist_matches({"/Robot1/*"}, "/Robot2/scan"));
  EXPECT_FALSE(allowlist_matches({"/Robot1/*"}, "/Robot1/"));
  EXPECT_TRUE(allowlist_matches({"/scan"}, "/scan"));
  EXPECT_FALSE(allowlist_matches({"/scan"}, "/scan2"));
}

TEST_F(MultiMasterTest, SameTopicNameInTwoDomainsNoCrossTalk)
{
  mms.add_domain("robot1", "robot1");
  mms.add_domain("robot2", "robot2");
  const NodeId a{"robot1", "amcl", ""};
  const NodeId b{"robot2", "amcl", ""};
  const NodeId la{"robot1", "listener", ""};
  const NodeId lb{"robot2", "listener", ""};
  for (const auto& node : {a, b, la, lb})
    mms.register_node(node);
  const auto ha = mms.advertise(a, "/amcl_pose", "PoseMsg");
  const auto hb = mms.advertise(b, "/amcl_pose", "PoseMsg");
  std::vector<std::string> seen_a, seen_b;
  mms.subscribe(la, "/amcl_pose", "PoseMsg",
    [&](const Envelope& e) { seen_a.push_back(e.payload_string()); });
  mms.subscribe(lb, "/amcl_pose", "PoseMsg",
    [&](const Envelope& e) { seen_b.push_back(e.payload_string()); });
  mms.start();
  run_for(2.0);
  mms.publish(ha, Bytes{'a'});
  mms.publish(hb, Bytes{'b'});
  run_for(1.0);
  EXPECT_EQ(seen_a, std::vector<std::string>{"a"});
  EXPECT_EQ(seen_b, std::vector<std::string>{"b"});
}

TEST_F(MultiMasterTest, RelayCopiesPayloadAndRenumbers)
{
  mms.add_domain("robot1", "robot1");
  const NodeId amcl{"robot1", "amcl", ""};
  const NodeId planner{"robot1", "planner", ""};
  mms.register_node(amcl);
  mms.register_node(planner);
  const auto handle = mms.advertise(amcl, "/amcl_pose", "PoseMsg");
  EXPECT_EQ(code_of([&] { mms.relay("robot1", "/amcl_pose", "/amcl_pose"); }),
    ErrorCode::InvalidRelay);
  EXPECT_EQ(code_of([&] { mms.relay("robot1", "/never", "/x"); }),
    ErrorCode::InvalidRelay);

  const auto relay = mms.relay("robot1", "/amcl_pose", "/Robot1/amcl_pose");
  const auto second = mms.relay("robot1", "/Robot1/amcl_pose", "/fleet/Robot1/amcl_pose");
  std::vector<std::string> hashes_in, hashes_out, hashes_chain;
  std::vector<std::uint64_t> ids_out;
  mms.subscribe(planner, "/Robot1/amcl_pose", "PoseMsg", [&](const Envelope& e)
    {
      hashes_out.push_back(sha256_hex(e.payload_view()));
      ids_out.push_back(e.msg_id);
    });
  mms.subscribe(planner, "/fleet/Robot1/amcl_pose", "PoseMsg", [&](const Envelope& e)
    {
      hashes_chain.push_back(sha256_hex(e.payload_view()));
    });
  for (int i = 0; i < 30; ++i)
  {
    Bytes payload(20 + i, static_cast<std::uint8_t>(i));
    hashes_in.push_back(sha256_hex(payload));
    mms.publish(handle, payload);
  }
  loop.run_until(seconds_to_ns(1.0));
  EXPECT_EQ(hashes_out, hashes_in);
  EXPECT_EQ(hashes_chain, hashes_in);
  ASSERT_EQ(ids_out.size(), 30u);
  for (std::size_t i = 0; i < ids_out.size(); ++i)
    EXPECT_EQ(ids_out[i], i + 1);
  EXPECT_EQ(relay->forwarded(), 30u);
  EXPECT_EQ(second->forwarded(), 30u);
}

TEST_F(MultiMasterTest, HeartbeatJsonShape)
{
  Heartbeat hb{"server", "http://server:11311", {{"/scan", "Blob"}}, 4};
  const auto json = hb.to_json();
  for (const char* key : {"domain", "address", "topics", "seq"})
    EXPECT_TRUE(json.contains(key));
  const Heartbeat back = Heartbeat::from_json(json);
  EXPECT_EQ(back.topics, hb.topics);
  EXPECT_EQ(back.seq, 4u);
}
