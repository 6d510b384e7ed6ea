#pragma once

#include <ostream>

#include "ntn/netsim/simulator.hpp"

namespace ntn::netsim {

/// Event trace as CSV:
/// time_s,event,node,link,pkt_id,kind,size_bytes,detail
class CsvTraceWriter : public Observer {
public:
    CsvTraceWriter(std::ostream& out, const NetGraph& graph);
    void on_event(const TraceEvent& ev) override;

private:
    std::ostream& out_;
    const NetGraph& graph_;
};

}  // namespace ntn::netsim
