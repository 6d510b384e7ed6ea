#pragma once

#include <cstdint>
#include <queue>
#include <vector>

namespace ntn::netsim {

/// Min-heap of timestamped events. Equal timestamps dequeue in insertion
/// order, which makes every run a total order.
template <class Payload>
class EventQueue {
public:
    struct Entry {
        double time_s;
        std::uint64_t seq;
        Payload payload;
    };

    void push(double time_s, Payload payload) { heap_.push(Entry{time_s, next_seq_++, payload}); }

    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    const Entry& top() const { return heap_.top(); }

    Entry pop()
    {
        Entry e = heap_.top();
        heap_.pop();
        return e;
    }

private:
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const noexcept
        {
            if (a.time_s != b.time_s) {
                return a.time_s > b.time_s;
            }
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace ntn::netsim
