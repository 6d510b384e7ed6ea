#include "ntn/netsim/trace.hpp"

#include <fmt/format.h>

namespace ntn::netsim {

CsvTraceWriter::CsvTraceWriter(std::ostream& out, const NetGraph& graph) : out_(out), graph_(graph)
{
    out_ << "time_s,event,node,link,pkt_id,kind,size_bytes,detail\n";
}

void CsvTraceWriter::on_event(const TraceEvent& ev)
{
    const std::string node = ev.node ? graph_.node(*ev.node).id : std::string();
    const std::string link = ev.link ? graph_.link(*ev.link).id : std::string();
    if (ev.packet != nullptr) {
        out_ << fmt::format("{:.9f},{},{},{},{},{},{},{}\n", ev.time_s, to_string(ev.event), node, link,
                            ev.packet->id, to_string(ev.packet->kind), ev.packet->size_bytes, ev.detail);
    } else {
        out_ << fmt::format("{:.9f},{},{},{},,,,{}\n", ev.time_s, to_string(ev.event), node, link, ev.detail);
    }
}

}  // namespace ntn::netsim
