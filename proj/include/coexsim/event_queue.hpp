#pragma once

#include "coexsim/types.hpp"

#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace coexsim {

class CausalityError : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

/// Min-queue of callbacks ordered by (time, seq). `seq` is assigned at
/// scheduling time, so same-time events run in the order they were posted.
class EventQueue
{
public:
    using Handler = std::function<void()>;

    Micros now() const { return now_; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    std::uint64_t processed() const { return processed_; }

    /// Time of the next event; queue must be non-empty.
    Micros next_time() const { return heap_.top().time; }

    std::uint64_t schedule(Micros at, Handler handler)
    {
        if (at < now_)
            throw CausalityError("event scheduled in the past: " + std::to_string(at) + " < "
                                 + std::to_string(now_));
        const std::uint64_t seq = next_seq_++;
        heap_.push(Entry{at, seq, std::move(handler)});
        return seq;
    }

    /// Pops and runs the next event. Returns false when the queue is empty.
    bool step()
    {
        if (heap_.empty())
            return false;
        Entry entry = heap_.top();
        heap_.pop();
        now_ = entry.time;
        ++processed_;
        entry.handler();
        return true;
    }

private:
    struct Entry
    {
        Micros time;
        std::uint64_t seq;
        Handler handler;
    };

    struct Later
    {
        bool operator()(const Entry& a, const Entry& b) const
        {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
    Micros now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
};

}  // namespace coexsim
