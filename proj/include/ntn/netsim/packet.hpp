#pragma once

#include <cstdint>
#include <string_view>

#include "ntn/netsim/graph.hpp"

namespace ntn::netsim {

enum class PacketKind : std::uint8_t { IcmpEcho, IcmpReply, TcpData, TcpAck, UdpData };

std::string_view to_string(PacketKind kind) noexcept;

inline constexpr std::uint32_t kMinPacketBytes = 20;
inline constexpr std::uint32_t kIpUdpHeaderBytes = 28;  // also ICMP echo overhead
inline constexpr std::uint32_t kTcpIpHeaderBytes = 52;  // IPv4 + TCP with timestamps

using FlowId = std::uint32_t;

struct Packet {
    std::uint64_t id = 0;
    NodeIndex src = 0;
    NodeIndex dst = 0;
    std::uint32_t size_bytes = kMinPacketBytes;
    PacketKind kind = PacketKind::UdpData;
    double created_at_s = 0.0;
    // Stands in for the payload bytes: relays must hand it on untouched.
    std::uint64_t payload_tag = 0;

    // Transport fields, opaque to the network.
    FlowId flow = 0;
    std::uint64_t seq = 0;
    std::uint64_t ack = 0;
    double echo_s = 0.0;
    bool retransmit = false;
};

}  // namespace ntn::netsim
