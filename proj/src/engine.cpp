#include "coexsim/engine.hpp"

#include "coexsim/afr.hpp"
#include "coexsim/clc.hpp"
#include "coexsim/event_queue.hpp"
#include "coexsim/medium.hpp"
#include "coexsim/rng.hpp"
#include "coexsim/wifi_mac.hpp"
#include "coexsim/wimax_mac.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace coexsim {

const LinkResult* RunResult::link(std::string_view id) const
{
    for (const auto& l : links)
    {
        if (l.id == id)
            return &l;
    }
    return nullptr;
}

double jain_index(std::span<const double> shares)
{
    if (shares.empty())
        throw std::domain_error("jain_index needs at least one share");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double x : shares)
    {
        if (!(x >= 0.0))
            throw std::domain_error("jain_index shares must be non-negative");
        sum += x;
        sum_sq += x * x;
    }
    if (sum_sq == 0.0)
        throw std::domain_error("jain_index is undefined when every share is zero");
    return (sum * sum) / (static_cast<double>(shares.size()) * sum_sq);
}

namespace {

struct QueuedFrame
{
    std::size_t bytes = 0;
    Micros enqueued = 0;
};

struct Interval
{
    Micros begin = 0;
    Micros end = 0;
};

struct LinkRt
{
    std::string id;
    std::string system;
    NodeIndex source = kNoNode;
    NodeIndex dest = kNoNode;
    bool wimax = false;
    LinkStats stats;
    std::uint64_t measured_bytes = 0;
    Micros measured_airtime = 0;
    std::vector<std::uint64_t> timeline;

    // WiMAX byte queue.
    std::uint64_t queued = 0;
    std::uint64_t committed = 0;
    std::uint64_t in_flight = 0;
    double cbr_carry = 0.0;
};

struct PendingFrs
{
    Micros nav_end = 0;
    double power_dbm = 0.0;
};

struct Station
{
    NodeIndex node = kNoNode;
    wifi::DcfStation dcf;
    int link = -1;
    TrafficSpec traffic;
    std::deque<QueuedFrame> queue;
    bool transmitting = false;
    bool awaiting_clc = false;
    std::uint64_t token = 0;
    int sensed_all = 0;
    int sensed_external = 0;
    Micros clc_backoff_until = 0;
    std::optional<PendingFrs> pending_frs;
    /// Subscriber this interface reserves the medium for, or -1.
    int reserves_for = -1;
};

struct Subscriber
{
    NodeIndex node = kNoNode;
    NodeIndex bs = kNoNode;
    int dl_link = -1;
    int ul_link = -1;
    TrafficSpec traffic;
    int emitter = -1;
    bool afr = false;
    bool claimed_ever = false;
    Micros last_claim = 0;
    afr::DmaState dma;
    afr::DpeState dpe;
    afr::InterfererEstimate estimate;
    std::deque<afr::OverheardFrame> overheard;
    std::deque<Interval> bursts;
    std::deque<std::pair<Micros, std::uint64_t>> deliveries;
    std::deque<Micros> retx_times;
};

struct OnAir
{
    Transmission tx;
    int link = -1;
    int subscriber = -1;
    bool accepted = true;
    bool rx_hold = false;
    bool tx_hold = false;
    bool ended = false;
    Micros enqueued = 0;
    std::vector<std::size_t> sensed_by;
};

struct PendingRequest
{
    clc::InterfaceRequest request;
    std::function<void(bool)> done;
};

struct Platform
{
    std::vector<NodeIndex> members;
    bool managed = false;
    clc::GrantLedger ledger;
    std::vector<PendingRequest> pending;
    bool decide_scheduled = false;
    std::vector<std::pair<NodeIndex, Interval>> tx_intervals;
    std::vector<std::pair<NodeIndex, Interval>> rx_intervals;
};

std::uint64_t fnv1a(std::uint64_t hash, std::string_view text)
{
    for (unsigned char c : text)
    {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

/// Time during which some member transmits while a different member receives.
Micros conflict_time(const Platform& p, Micros lo, Micros hi)
{
    struct Edge
    {
        Micros at;
        int delta;
        bool tx;
        NodeIndex node;
    };
    std::vector<Edge> edges;
    auto add = [&](const auto& list, bool tx) {
        for (const auto& [node, iv] : list)
        {
            const Micros b = std::max(iv.begin, lo);
            const Micros e = std::min(iv.end, hi);
            if (b >= e)
                continue;
            edges.push_back({b, +1, tx, node});
            edges.push_back({e, -1, tx, node});
        }
    };
    add(p.tx_intervals, true);
    add(p.rx_intervals, false);
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        if (a.at != b.at)
            return a.at < b.at;
        return a.delta < b.delta;
    });

    std::map<NodeIndex, int> tx_count;
    std::map<NodeIndex, int> rx_count;
    auto conflicting = [&]() {
        for (const auto& [t, tc] : tx_count)
        {
            if (tc <= 0)
                continue;
            for (const auto& [r, rc] : rx_count)
            {
                if (rc > 0 && r != t)
                    return true;
            }
        }
        return false;
    };

    Micros total = 0;
    Micros prev = lo;
    bool active = false;
    for (const auto& e : edges)
    {
        if (active)
            total += e.at - prev;
        (e.tx ? tx_count : rx_count)[e.node] += e.delta;
        prev = e.at;
        active = conflicting();
    }
    return total;
}

class Simulation
{
public:
    Simulation(const ScenarioConfig& cfg, std::uint64_t seed, const RunOptions& options)
        : cfg_(cfg), seed_(seed), options_(options), rng_(seed), medium_(cfg.medium)
    {
        build();
    }

    RunResult run()
    {
        bootstrap();
        while (!queue_.empty() && queue_.next_time() < cfg_.duration_us)
            queue_.step();
        return collect();
    }

private:
    // ---------------------------------------------------------------- setup

    void build()
    {
        const auto& nodes = cfg_.nodes;
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            RadioInterface iface;
            iface.index = i;
            iface.id = nodes[i].id;
            iface.kind = nodes[i].kind;
            iface.position = nodes[i].position;
            iface.channel_mhz = nodes[i].channel_mhz;
            iface.tx_power_dbm = nodes[i].tx_power_dbm;
            iface.platform = i;
            interfaces_.push_back(iface);
            index_of_[nodes[i].id] = i;
        }
        // Co-located nodes share the platform of the lower index.
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            if (nodes[i].collocated_with.empty())
                continue;
            const NodeIndex other = index_of_.at(nodes[i].collocated_with);
            const std::size_t a = interfaces_[i].platform;
            const std::size_t b = interfaces_[other].platform;
            const std::size_t keep = std::min(a, b);
            for (auto& iface : interfaces_)
            {
                if (iface.platform == a || iface.platform == b)
                    iface.platform = keep;
            }
        }
        std::map<std::size_t, std::size_t> platform_ids;
        for (auto& iface : interfaces_)
        {
            auto [it, inserted] = platform_ids.try_emplace(iface.platform, platforms_.size());
            if (inserted)
                platforms_.emplace_back();
            iface.platform = it->second;
            platforms_[iface.platform].members.push_back(iface.index);
        }
        for (auto& p : platforms_)
        {
            p.managed = cfg_.clc.enabled && p.members.size() >= 2;
            for (NodeIndex m : p.members)
                p.ledger.register_interface(m);
        }

        station_of_.assign(nodes.size(), -1);
        subscriber_of_.assign(nodes.size(), -1);
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            const auto& n = nodes[i];
            if (is_wifi(n.kind))
            {
                Station st;
                st.node = i;
                st.dcf = wifi::DcfStation(cfg_.dcf, 0);
                st.traffic = n.traffic;
                if (n.traffic.type != TrafficSpec::Type::None)
                {
                    const NodeIndex dest = index_of_.at(n.traffic.dest);
                    st.link = add_link(i, dest, false);
                }
                station_of_[i] = static_cast<int>(stations_.size());
                stations_.push_back(std::move(st));
            }
            else if (n.kind == RadioKind::WimaxSs)
            {
                Subscriber ss;
                ss.node = i;
                ss.bs = index_of_.at(n.base_station);
                ss.traffic = n.traffic;
                if (n.traffic.type != TrafficSpec::Type::None)
                {
                    ss.dl_link = add_link(ss.bs, i, true);
                    ss.ul_link = add_link(i, ss.bs, true);
                }
                ss.dma.claim_interval = cfg_.afr.params.interval_min;
                ss.dma.window = cfg_.afr.params.dma_window;
                ss.dpe.th_dur = cfg_.afr.params.th_dur;
                ss.dpe.qos = cfg_.afr.params.qos;
                subscriber_of_[i] = static_cast<int>(subscribers_.size());
                subscribers_.push_back(std::move(ss));
            }
        }
        // The first WiFi interface sharing a subscriber's platform reserves for it.
        for (std::size_t s = 0; s < subscribers_.size(); ++s)
        {
            auto& ss = subscribers_[s];
            for (NodeIndex m : platforms_[interfaces_[ss.node].platform].members)
            {
                const int st = station_of_[m];
                if (st >= 0 && stations_[st].reserves_for < 0)
                {
                    ss.emitter = st;
                    stations_[st].reserves_for = static_cast<int>(s);
                    break;
                }
            }
            ss.afr = cfg_.afr.enabled && ss.emitter >= 0;
        }
        for (const auto& ss : subscribers_)
            has_wimax_ = has_wimax_ || ss.dl_link >= 0;

        measured_us_ = std::max<Micros>(0, cfg_.duration_us - cfg_.warmup_us);
    }

    int add_link(NodeIndex src, NodeIndex dst, bool wimax)
    {
        LinkRt link;
        link.id = interfaces_[src].id + "->" + interfaces_[dst].id;
        link.source = src;
        link.dest = dst;
        link.wimax = wimax;
        link.system = wimax ? "wimax" : link.id;
        if (cfg_.timeline_bin_us > 0)
        {
            const auto bins = (cfg_.duration_us + cfg_.timeline_bin_us - 1) / cfg_.timeline_bin_us;
            link.timeline.assign(static_cast<std::size_t>(bins), 0);
        }
        links_.push_back(std::move(link));
        return static_cast<int>(links_.size() - 1);
    }

    void bootstrap()
    {
        // Draw order: one initial backoff per station, in interface order.
        for (auto& st : stations_)
            st.dcf.draw_backoff(rng_);

        for (std::size_t s = 0; s < stations_.size(); ++s)
        {
            auto& st = stations_[s];
            if (st.traffic.type == TrafficSpec::Type::Saturated)
                schedule(st.traffic.start_us, [this, s] { enqueue(s); });
            else if (st.traffic.type == TrafficSpec::Type::Cbr)
                schedule(st.traffic.start_us, [this, s] { cbr_arrival(s); });
        }
        for (std::size_t s = 0; s < stations_.size(); ++s)
        {
            const auto& n = cfg_.nodes[stations_[s].node];
            for (const auto& inj : n.cts_schedule)
            {
                schedule(inj.at_us, [this, s, inj] {
                    const Micros nav_end = now() + cfg_.dcf.cts_airtime + inj.reservation_us;
                    request_frs(s, nav_end, interfaces_[stations_[s].node].tx_power_dbm, -1);
                });
            }
        }
        if (!subscribers_.empty())
            schedule(0, [this] { frame_boundary(); });
        for (std::size_t s = 0; s < subscribers_.size(); ++s)
        {
            if (subscribers_[s].afr && cfg_.afr.dpe)
                schedule(cfg_.afr.params.retx_window, [this, s] { dpe_tick(s); });
        }
    }

    // ---------------------------------------------------------------- helpers

    Micros now() const { return queue_.now(); }

    void schedule(Micros at, EventQueue::Handler fn) { queue_.schedule(at, std::move(fn)); }

    void trace(TraceEvent ev)
    {
        ev.time = now();
        std::ostringstream line;
        line << ev.time << ' ' << ev.type << ' ' << ev.actor << ' ' << ev.detail;
        const std::string text = line.str();
        trace_hash_ = fnv1a(trace_hash_, text);
        trace_hash_ = fnv1a(trace_hash_, "\n");
        if (options_.trace)
            *options_.trace << text << '\n';
        if (options_.observer)
            options_.observer(ev);
    }

    const std::string& id_of(NodeIndex n) const { return interfaces_[n].id; }

    Platform& platform_of(NodeIndex n) { return platforms_[interfaces_[n].platform]; }

    bool multi_radio(NodeIndex n) const { return platforms_[interfaces_[n].platform].members.size() >= 2; }

    Micros clip(Micros b, Micros e) const
    {
        return std::max<Micros>(0, std::min(e, cfg_.duration_us) - std::max(b, cfg_.warmup_us));
    }

    void record_delivery(LinkRt& link, std::uint64_t bytes)
    {
        link.stats.delivered_bytes += bytes;
        if (now() >= cfg_.warmup_us)
            link.measured_bytes += bytes;
        if (!link.timeline.empty())
        {
            const auto bin = static_cast<std::size_t>(now() / cfg_.timeline_bin_us);
            if (bin < link.timeline.size())
                link.timeline[bin] += bytes;
        }
    }

    // ---------------------------------------------------------------- co-located controller

    void acquire(NodeIndex node, clc::ClcState state, Interval span, std::function<void(bool)> done)
    {
        Platform& p = platform_of(node);
        if (!p.managed)
        {
            done(true);
            return;
        }
        clc::InterfaceRequest req;
        req.interface = node;
        req.desired = state;
        req.priority = cfg_.nodes[node].priority;
        req.kind = interfaces_[node].kind;
        req.span = clc::TimeSpan{span.begin, span.end};
        p.pending.push_back({req, std::move(done)});
        if (!p.decide_scheduled)
        {
            p.decide_scheduled = true;
            const std::size_t pid = interfaces_[node].platform;
            schedule(now(), [this, pid] { decide(pid); });
        }
    }

    bool schedule_allows(const clc::InterfaceRequest& req)
    {
        if (!cfg_.clc.schedule_aware || !is_wifi(req.kind))
            return true;
        for (NodeIndex m : platform_of(req.interface).members)
        {
            const int s = subscriber_of_[m];
            if (s < 0)
                continue;
            for (const auto& [start, map] : maps_)
            {
                if (clc::schedule_aware_check(req, map, start, m) == clc::Verdict::Deny)
                    return false;
            }
        }
        return true;
    }

    void decide(std::size_t pid)
    {
        Platform& p = platforms_[pid];
        p.decide_scheduled = false;
        std::vector<PendingRequest> pending = std::move(p.pending);
        p.pending.clear();

        while (!pending.empty())
        {
            std::size_t pick = 0;
            if (cfg_.clc.priority)
            {
                std::vector<clc::InterfaceRequest> reqs;
                for (const auto& pr : pending)
                    reqs.push_back(pr.request);
                const auto& winner = clc::priority_resolve(reqs);
                pick = static_cast<std::size_t>(&winner - reqs.data());
            }
            else
            {
                for (std::size_t i = 1; i < pending.size(); ++i)
                {
                    if (pending[i].request.interface < pending[pick].request.interface)
                        pick = i;
                }
            }
            PendingRequest pr = std::move(pending[pick]);
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));

            bool granted = false;
            if (schedule_allows(pr.request))
            {
                auto result = clc::request(p.ledger, pr.request);
                granted = result.decision == clc::Decision::Grant;
                if (granted)
                {
                    p.ledger = std::move(result.ledger);
                    auto& holds = pr.request.desired == clc::ClcState::Tx ? tx_holds_ : rx_holds_;
                    ++holds[pr.request.interface];
                }
            }
            TraceEvent ev;
            ev.type = granted ? "clc_grant" : "clc_deny";
            ev.actor = id_of(pr.request.interface);
            ev.detail = std::string("req=") + std::string(clc::to_string(pr.request.desired))
                        + " state=" + std::string(clc::to_string(p.ledger.state()));
            ev.node = pr.request.interface;
            trace(std::move(ev));
            pr.done(granted);
        }
    }

    void release(NodeIndex node, clc::ClcState state)
    {
        Platform& p = platform_of(node);
        if (!p.managed)
            return;
        auto& holds = state == clc::ClcState::Tx ? tx_holds_ : rx_holds_;
        if (--holds[node] > 0)
            return;
        const int other = state == clc::ClcState::Tx ? rx_holds_[node] : tx_holds_[node];
        if (other > 0)
            return;
        clc::InterfaceRequest req;
        req.interface = node;
        req.desired = clc::ClcState::S;
        p.ledger = clc::request(p.ledger, req).ledger;
    }

    // ---------------------------------------------------------------- WiFi stations

    void enqueue(std::size_t s)
    {
        auto& st = stations_[s];
        auto& link = links_[static_cast<std::size_t>(st.link)];
        const std::size_t bytes = st.traffic.frame_bytes;
        link.stats.offered_bytes += bytes;
        if (st.traffic.type == TrafficSpec::Type::Cbr && st.queue.size() >= st.traffic.queue_limit)
        {
            ++link.stats.dropped_frames;
            link.stats.dropped_bytes += bytes;
            return;
        }
        st.queue.push_back({bytes, now()});
        if (st.queue.size() == 1)
            reschedule(s);
    }

    void cbr_arrival(std::size_t s)
    {
        auto& st = stations_[s];
        enqueue(s);
        const double interval = static_cast<double>(st.traffic.frame_bytes) * 8.0 * 1e6 / st.traffic.rate_bps;
        ++st_arrivals_[s];
        const auto next = st.traffic.start_us
                          + static_cast<Micros>(std::llround(interval * static_cast<double>(st_arrivals_[s])));
        schedule(std::max(next, now()), [this, s] { cbr_arrival(s); });
    }

    void reschedule(std::size_t s)
    {
        auto& st = stations_[s];
        if (st.transmitting || st.awaiting_clc || st.queue.empty())
            return;
        const std::uint64_t token = ++st.token;
        if (now() < st.clc_backoff_until)
        {
            schedule(st.clc_backoff_until, [this, s, token] {
                if (stations_[s].token == token)
                    reschedule(s);
            });
            return;
        }
        const auto decision = st.dcf.try_access(now());
        if (decision.starts())
        {
            schedule(*decision.at, [this, s, token] { access(s, token); });
        }
        else if (decision.at)
        {
            schedule(*decision.at, [this, s, token] {
                if (stations_[s].token == token)
                    reschedule(s);
            });
        }
    }

    void access(std::size_t s, std::uint64_t token)
    {
        auto& st = stations_[s];
        if (st.token != token || st.transmitting || st.awaiting_clc || st.queue.empty())
            return;
        const auto decision = st.dcf.try_access(now());
        if (!decision.starts() || *decision.at > now())
        {
            reschedule(s);
            return;
        }
        const auto& link = links_[static_cast<std::size_t>(st.link)];
        const auto& src = interfaces_[st.node];
        Transmission tx;
        tx.source = st.node;
        tx.dest = link.dest;
        tx.kind = FrameKind::Data;
        tx.start = now();
        tx.airtime = cfg_.dcf.data_airtime(st.queue.front().bytes);
        tx.power_dbm = src.tx_power_dbm;
        tx.channel_mhz = src.channel_mhz;
        tx.bytes = st.queue.front().bytes;

        st.awaiting_clc = true;
        acquire(st.node, clc::ClcState::Tx, {tx.start, tx.end()}, [this, s, tx](bool granted) mutable {
            auto& me = stations_[s];
            me.awaiting_clc = false;
            if (!granted)
            {
                me.clc_backoff_until = now() + cfg_.clc.retry_us;
                reschedule(s);
                return;
            }
            me.dcf.begin_transmit();
            me.transmitting = true;
            OnAir meta;
            meta.tx = tx;
            meta.link = me.link;
            meta.enqueued = me.queue.front().enqueued;
            meta.tx_hold = platform_of(me.node).managed;
            start_transmission(std::move(meta));
        });
    }

    // ---------------------------------------------------------------- transmissions

    void start_transmission(OnAir meta)
    {
        meta.tx.id = next_tx_id_++;
        const std::uint64_t id = meta.tx.id;
        const Transmission& tx = meta.tx;

        if (meta.link >= 0)
        {
            auto& link = links_[static_cast<std::size_t>(meta.link)];
            link.stats.airtime_us += tx.airtime;
            link.measured_airtime += clip(tx.start, tx.end());
        }
        if (tx.kind == FrameKind::Cts)
        {
            ++cts_count_;
            cts_airtime_ += tx.airtime;
        }
        if (multi_radio(tx.source))
            platform_of(tx.source).tx_intervals.push_back({tx.source, {tx.start, tx.end()}});

        TraceEvent ev;
        ev.type = "tx_start";
        ev.actor = id_of(tx.source);
        ev.detail = std::string(to_string(tx.kind)) + " id=" + std::to_string(id) + " dest="
                    + (tx.broadcast() ? std::string("*") : id_of(tx.dest)) + " end=" + std::to_string(tx.end())
                    + " power=" + std::to_string(std::lround(tx.power_dbm * 100.0));
        if (tx.kind == FrameKind::Cts)
            ev.detail += " nav=" + std::to_string(tx.nav_duration);
        ev.node = tx.source;
        ev.link = meta.link;
        ev.begin = tx.start;
        ev.end = tx.end();
        ev.value = static_cast<std::int64_t>(tx.kind);
        trace(std::move(ev));

        air_.emplace(id, std::move(meta));

        schedule(now(), [this, id] { sense_busy(id); });
        schedule(air_.at(id).tx.end(), [this, id] { end_transmission(id); });

        const auto& t = air_.at(id).tx;
        if (!t.broadcast())
        {
            const NodeIndex dest = t.dest;
            const Interval span{t.start, t.end()};
            acquire(dest, clc::ClcState::Rx, span, [this, id, dest, span](bool granted) {
                auto it = air_.find(id);
                if (it == air_.end())
                    return;
                it->second.accepted = granted;
                it->second.rx_hold = granted && platform_of(dest).managed;
                if (granted && multi_radio(dest))
                    platform_of(dest).rx_intervals.push_back({dest, span});
            });
        }
    }

    void sense_busy(std::uint64_t id)
    {
        auto& meta = air_.at(id);
        const auto& tx = meta.tx;
        const auto& src = interfaces_[tx.source];
        for (std::size_t s = 0; s < stations_.size(); ++s)
        {
            auto& st = stations_[s];
            if (st.node == tx.source)
                continue;
            const auto& rx = interfaces_[st.node];
            if (medium::rx_power_at(tx, src, rx, medium_) < medium_.cca_threshold_dbm)
                continue;
            meta.sensed_by.push_back(s);
            if (src.platform != rx.platform)
                ++st.sensed_external;
            if (st.sensed_all++ == 0)
            {
                st.dcf.on_medium_busy(now());
                ++st.token;
            }
        }
    }

    void end_transmission(std::uint64_t id)
    {
        auto& meta = air_.at(id);
        meta.ended = true;
        const Transmission tx = meta.tx;
        const auto& src = interfaces_[tx.source];

        std::vector<std::size_t> touched;
        for (std::size_t s : meta.sensed_by)
        {
            auto& st = stations_[s];
            if (src.platform != interfaces_[st.node].platform)
            {
                if (--st.sensed_external == 0 && st.pending_frs)
                    schedule(now() + cfg_.dcf.sifs, [this, s] { retry_frs(s); });
            }
            if (--st.sensed_all == 0)
            {
                st.dcf.on_medium_idle(now());
                touched.push_back(s);
            }
        }

        std::vector<Transmission> active;
        for (const auto& [oid, other] : air_)
        {
            if (other.tx.start < tx.end() && tx.start < other.tx.end())
                active.push_back(other.tx);
        }
        const auto outcomes = medium::resolve_deliveries(active, interfaces_, medium_);

        switch (tx.kind)
        {
            case FrameKind::Data: finish_data(meta, outcomes, touched); break;
            case FrameKind::Cts: finish_cts(meta, outcomes, touched); break;
            case FrameKind::WimaxBurst: finish_burst(meta, outcomes); break;
            case FrameKind::Ack: break;
        }
        if (meta.tx_hold)
            release(tx.source, clc::ClcState::Tx);
        if (meta.rx_hold)
            release(tx.dest, clc::ClcState::Rx);

        if (tx.kind == FrameKind::Data || tx.kind == FrameKind::Cts)
            overhear(tx);

        prune();
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (std::size_t s : touched)
            reschedule(s);
    }

    std::optional<medium::DeliveryOutcome> outcome_for(const std::vector<medium::DeliveryOutcome>& outcomes,
                                                       std::uint64_t id,
                                                       NodeIndex receiver) const
    {
        for (const auto& o : outcomes)
        {
            if (o.transmission == id && o.receiver == receiver)
                return o;
        }
        return std::nullopt;
    }

    void finish_data(OnAir& meta, const std::vector<medium::DeliveryOutcome>& outcomes, std::vector<std::size_t>& touched)
    {
        const auto& tx = meta.tx;
        const auto s = static_cast<std::size_t>(station_of_[tx.source]);
        auto& st = stations_[s];
        auto& link = links_[static_cast<std::size_t>(meta.link)];
        const auto outcome = outcome_for(outcomes, tx.id, tx.dest);
        const bool acked = meta.accepted && outcome && outcome->result == medium::DeliveryResult::Decoded;

        TraceEvent ev;
        ev.type = acked ? "deliver" : "lost";
        ev.actor = id_of(tx.source);
        ev.detail = "link=" + link.id + " id=" + std::to_string(tx.id) + " bytes=" + std::to_string(tx.bytes)
                    + " result=" + (outcome ? std::string(medium::to_string(outcome->result)) : "none")
                    + (meta.accepted ? "" : " refused");
        ev.node = tx.source;
        ev.link = meta.link;
        ev.begin = tx.start;
        ev.end = tx.end();
        ev.value = static_cast<std::int64_t>(tx.bytes);
        trace(std::move(ev));

        if (acked)
        {
            record_delivery(link, tx.bytes);
            link.stats.delay_samples.push_back(now() - meta.enqueued);
        }
        else
        {
            ++link.stats.corrupted_frames;
        }

        st.transmitting = false;
        const auto verdict = st.dcf.on_tx_outcome(acked, rng_);
        if (verdict == wifi::TxVerdict::Retry)
        {
            ++link.stats.retransmissions;
        }
        else
        {
            if (verdict == wifi::TxVerdict::Dropped)
            {
                ++link.stats.dropped_frames;
                link.stats.dropped_bytes += tx.bytes;
            }
            st.queue.pop_front();
            if (st.traffic.type == TrafficSpec::Type::Saturated)
                enqueue(s);
        }
        st.dcf.resume_after_tx(now());
        touched.push_back(s);
    }

    void finish_cts(OnAir& meta, const std::vector<medium::DeliveryOutcome>& outcomes, std::vector<std::size_t>& touched)
    {
        const auto& tx = meta.tx;
        for (const auto& o : outcomes)
        {
            if (o.transmission != tx.id || o.result != medium::DeliveryResult::Decoded)
                continue;
            const int s = station_of_[o.receiver];
            if (s < 0)
                continue;
            auto& st = stations_[static_cast<std::size_t>(s)];
            if (st.transmitting)
                continue;
            if (!st.dcf.on_overheard(tx, o.rx_power_dbm, medium_.wifi_sensitivity_dbm, now()))
                continue;
            ++st.token;
            touched.push_back(static_cast<std::size_t>(s));
            TraceEvent ev;
            ev.type = "nav";
            ev.actor = id_of(st.node);
            ev.detail = "from=" + id_of(tx.source) + " until=" + std::to_string(st.dcf.nav().expiry);
            ev.node = st.node;
            ev.begin = now();
            ev.end = st.dcf.nav().expiry;
            trace(std::move(ev));
        }
    }

    void finish_burst(OnAir& meta, const std::vector<medium::DeliveryOutcome>& outcomes)
    {
        const auto& tx = meta.tx;
        auto& ss = subscribers_[static_cast<std::size_t>(meta.subscriber)];
        auto& link = links_[static_cast<std::size_t>(meta.link)];
        const auto outcome = outcome_for(outcomes, tx.id, tx.dest);
        const bool ok = meta.accepted && outcome && outcome->result == medium::DeliveryResult::Decoded;
        link.in_flight -= tx.bytes;

        TraceEvent ev;
        ev.type = ok ? "deliver" : "lost";
        ev.actor = id_of(tx.source);
        ev.detail = "link=" + link.id + " id=" + std::to_string(tx.id) + " bytes=" + std::to_string(tx.bytes)
                    + " result=" + (outcome ? std::string(medium::to_string(outcome->result)) : "none")
                    + (meta.accepted ? "" : " refused");
        ev.node = tx.source;
        ev.link = meta.link;
        ev.begin = tx.start;
        ev.end = tx.end();
        ev.value = static_cast<std::int64_t>(tx.bytes);
        trace(std::move(ev));

        if (ok)
        {
            record_delivery(link, tx.bytes);
            link.stats.delay_samples.push_back(tx.airtime);
            ss.deliveries.emplace_back(now(), tx.bytes);
        }
        else
        {
            ++link.stats.corrupted_frames;
            ++link.stats.retransmissions;
            link.queued += tx.bytes;
            ss.retx_times.push_back(now());
        }
        if (tx.source == ss.node)
            ss_transmitting_ = false;
    }

    void overhear(const Transmission& tx)
    {
        const auto& src = interfaces_[tx.source];
        for (auto& ss : subscribers_)
        {
            if (!ss.afr)
                continue;
            const auto& em = stations_[static_cast<std::size_t>(ss.emitter)];
            const auto& rx = interfaces_[em.node];
            if (rx.platform == src.platform || em.transmitting)
                continue;
            const double p = medium::rx_power_at(tx, src, rx, medium_);
            if (p >= medium_.wifi_sensitivity_dbm)
                ss.overheard.push_back({tx.source, p, now()});
        }
    }

    void prune()
    {
        Micros horizon = now();
        for (const auto& [id, m] : air_)
        {
            if (!m.ended)
                horizon = std::min(horizon, m.tx.start);
        }
        for (auto it = air_.begin(); it != air_.end();)
        {
            if (it->second.ended && it->second.tx.end() <= horizon)
                it = air_.erase(it);
            else
                ++it;
        }
    }

    // ---------------------------------------------------------------- reservations

    /// `demand` is what the threshold gate compares against; a negative
    /// value bypasses the gate.
    void request_frs(std::size_t s, Micros nav_end, double power_dbm, Micros demand)
    {
        auto& st = stations_[s];
        if (nav_end - (now() + cfg_.dcf.cts_airtime) <= 0)
            return;
        if (demand >= 0 && demand < cfg_.afr.params.th_dur)
        {
            TraceEvent ev;
            ev.type = "frs_skip";
            ev.actor = id_of(st.node);
            ev.detail = "demand=" + std::to_string(demand);
            ev.node = st.node;
            trace(std::move(ev));
            return;
        }
        st.pending_frs = PendingFrs{nav_end, power_dbm};
        if (st.sensed_external == 0)
            send_frs(s);
    }

    void retry_frs(std::size_t s)
    {
        auto& st = stations_[s];
        if (!st.pending_frs || st.sensed_external > 0)
            return;
        send_frs(s);
    }

    void send_frs(std::size_t s)
    {
        auto& st = stations_[s];
        const PendingFrs plan = *st.pending_frs;
        st.pending_frs.reset();
        const Micros reservation = plan.nav_end - (now() + cfg_.dcf.cts_airtime);
        if (reservation <= 0)
            return;

        afr::FrsContext ctx;
        ctx.source = st.node;
        ctx.channel_mhz = interfaces_[st.node].channel_mhz;
        ctx.cts_airtime = cfg_.dcf.cts_airtime;
        ctx.th_dur = cfg_.afr.params.th_dur;
        ctx.allow_skip = false;
        const auto frames = afr::emit_frs(reservation, plan.power_dbm, now(), ctx);

        TraceEvent ev;
        ev.type = "frs";
        ev.actor = id_of(st.node);
        ev.detail = "nav_start=" + std::to_string(now() + cfg_.dcf.cts_airtime) + " nav_end="
                    + std::to_string(plan.nav_end) + " chunks=" + std::to_string(frames.size());
        ev.node = st.node;
        ev.begin = now() + cfg_.dcf.cts_airtime;
        ev.end = plan.nav_end;
        ev.value = static_cast<std::int64_t>(frames.size());
        trace(std::move(ev));

        for (const auto& frame : frames)
        {
            schedule(frame.start, [this, s, frame] {
                auto& me = stations_[s];
                if (me.transmitting)
                    return;
                acquire(me.node, clc::ClcState::Tx, {frame.start, frame.end()}, [this, s, frame](bool granted) {
                    if (!granted || stations_[s].transmitting)
                        return;
                    OnAir meta;
                    meta.tx = frame;
                    meta.tx.start = now();
                    meta.tx_hold = platform_of(stations_[s].node).managed;
                    start_transmission(std::move(meta));
                });
            });
        }
    }

    // ---------------------------------------------------------------- WiMAX

    void frame_boundary()
    {
        const Micros frame_len = cfg_.wimax.frame_len;
        const Micros next_start = now() + frame_len;

        maps_.erase(std::remove_if(maps_.begin(), maps_.end(),
                                   [&](const auto& m) { return m.first + frame_len <= now(); }),
                    maps_.end());

        std::vector<wimax::SsDemand> demands;
        for (std::size_t s = 0; s < subscribers_.size(); ++s)
        {
            auto& ss = subscribers_[s];
            if (ss.dl_link < 0)
                continue;
            auto& dl = links_[static_cast<std::size_t>(ss.dl_link)];
            auto& ul = links_[static_cast<std::size_t>(ss.ul_link)];
            if (ss.traffic.type == TrafficSpec::Type::Cbr)
            {
                cbr_fill(dl, ss.traffic.dl_rate_bps, frame_len);
                cbr_fill(ul, ss.traffic.ul_rate_bps, frame_len);
            }
            if (ss.afr)
                adapt(s);
            if (!claims(ss, next_start))
                continue;

            const auto demand_of = [&](const LinkRt& link, Micros subframe) -> std::uint64_t {
                if (ss.traffic.type == TrafficSpec::Type::Saturated)
                    return std::max(wimax::capacity_of(subframe, cfg_.wimax.bytes_per_us), link.queued);
                return link.queued > link.committed ? link.queued - link.committed : 0;
            };
            const Micros dl_end = static_cast<Micros>(std::llround(static_cast<double>(frame_len) * cfg_.wimax.dl_ratio));
            const std::uint64_t dl_bytes = demand_of(dl, dl_end);
            const std::uint64_t ul_bytes = demand_of(ul, frame_len - dl_end);
            if (dl_bytes + ul_bytes == 0)
                continue;
            demands.push_back({ss.node, dl_bytes, Direction::Downlink});
            demands.push_back({ss.node, ul_bytes, Direction::Uplink});
            ss.claimed_ever = true;
            ss.last_claim = next_start;
        }

        const wimax::FrameMap* previous = maps_.empty() ? nullptr : &maps_.back().second;
        wimax::FrameMap map = wimax::build_frame_map(demands, frame_len, cfg_.wimax.dl_ratio, cfg_.wimax.bytes_per_us, previous);

        for (std::size_t s = 0; s < subscribers_.size(); ++s)
        {
            auto& ss = subscribers_[s];
            const auto grants = map.grants_for(ss.node);
            if (grants.empty())
                continue;
            for (const auto& g : grants)
            {
                auto& link = links_[static_cast<std::size_t>(g.direction == Direction::Downlink ? ss.dl_link : ss.ul_link)];
                link.committed += wimax::capacity_of(g.length, cfg_.wimax.bytes_per_us);
                schedule(next_start + g.offset, [this, s, g, next_start] { burst_start(s, g, next_start); });
            }
            if (ss.afr && (!cfg_.afr.dpe || ss.dpe.cts_enabled))
                plan_reservation(s, grants, next_start);
        }

        TraceEvent ev;
        ev.type = "frame";
        ev.actor = "wimax";
        ev.detail = "start=" + std::to_string(next_start) + " grants=" + std::to_string(map.grants.size());
        ev.begin = next_start;
        ev.value = static_cast<std::int64_t>(map.grants.size());
        trace(std::move(ev));

        maps_.emplace_back(next_start, std::move(map));
        schedule(next_start, [this] { frame_boundary(); });
    }

    void cbr_fill(LinkRt& link, double rate_bps, Micros frame_len)
    {
        link.cbr_carry += rate_bps / 8.0 * static_cast<double>(frame_len) / 1e6;
        const auto whole = static_cast<std::uint64_t>(std::floor(link.cbr_carry));
        link.cbr_carry -= static_cast<double>(whole);
        link.queued += whole;
        link.stats.offered_bytes += whole;
    }

    bool claims(const Subscriber& ss, Micros frame_start) const
    {
        if (!ss.afr || !cfg_.afr.dma || !ss.claimed_ever)
            return true;
        return frame_start - ss.last_claim >= ss.dma.claim_interval;
    }

    void adapt(std::size_t s)
    {
        auto& ss = subscribers_[s];
        const auto& params = cfg_.afr.params;
        const Micros t = now();

        while (!ss.overheard.empty() && ss.overheard.front().at < t - params.dma_window)
            ss.overheard.pop_front();
        while (!ss.bursts.empty() && ss.bursts.front().end <= t - params.dma_window)
            ss.bursts.pop_front();

        const auto& members = platforms_[interfaces_[ss.node].platform].members;
        const std::vector<afr::OverheardFrame> heard(ss.overheard.begin(), ss.overheard.end());
        ss.estimate = afr::estimate_interferers(heard, params.dma_window, t, members,
                                                params.assumed_interferer_power_dbm, medium_.path_loss);
        if (!cfg_.afr.dma || t == 0)
            return;

        const Micros window_start = std::max<Micros>(0, t - params.dma_window);
        Micros busy = 0;
        for (const auto& b : ss.bursts)
            busy += std::max<Micros>(0, std::min(b.end, t) - std::max(b.begin, window_start));
        const double share = std::clamp(static_cast<double>(busy) / static_cast<double>(t - window_start), 0.0, 1.0);
        const Micros before = ss.dma.claim_interval;
        ss.dma = afr::dma_update(ss.dma, ss.estimate, share, t, params);
        if (ss.dma.claim_interval != before)
        {
            TraceEvent ev;
            ev.type = "dma";
            ev.actor = id_of(ss.node);
            ev.detail = "interval=" + std::to_string(ss.dma.claim_interval) + " systems="
                        + std::to_string(ss.estimate.active_systems);
            ev.node = ss.node;
            ev.value = ss.dma.claim_interval;
            trace(std::move(ev));
        }
    }

    void plan_reservation(std::size_t s, const std::vector<wimax::Grant>& grants, Micros frame_start)
    {
        auto& ss = subscribers_[s];
        const auto& params = cfg_.afr.params;
        const Micros first = frame_start + grants.front().offset;
        const Micros last = frame_start + grants.back().end();
        const Micros base = last - first + params.guard;
        const auto demand = static_cast<Micros>(std::llround(static_cast<double>(base) * ss.dpe.reservation_growth));
        const Micros at = std::max(now(), first - params.guard - cfg_.dcf.cts_airtime - params.lead);
        const Micros nav_end = first - params.guard + demand;

        const auto& emitter = interfaces_[stations_[static_cast<std::size_t>(ss.emitter)].node];
        double power = emitter.tx_power_dbm;
        if (cfg_.afr.acp)
        {
            power = afr::acp_power(ss.estimate.max_distance_m, medium_.cca_threshold_dbm, medium_.path_loss,
                                   params.acp_margin_db, params.acp_floor_dbm, params.acp_ceiling_dbm);
        }
        const auto emitter_index = static_cast<std::size_t>(ss.emitter);
        schedule(at, [this, emitter_index, nav_end, power, demand] { request_frs(emitter_index, nav_end, power, demand); });
    }

    void burst_start(std::size_t s, wimax::Grant grant, Micros frame_start)
    {
        auto& ss = subscribers_[s];
        const bool down = grant.direction == Direction::Downlink;
        const int link_index = down ? ss.dl_link : ss.ul_link;
        auto& link = links_[static_cast<std::size_t>(link_index)];
        const std::uint64_t cap = wimax::capacity_of(grant.length, cfg_.wimax.bytes_per_us);
        link.committed -= std::min(link.committed, cap);

        auto bursts = wimax::ss_burst(wimax::FrameMap{cfg_.wimax.frame_len, 0, {grant}}, ss.node, frame_start,
                                      interfaces_, ss.bs);
        Transmission tx = bursts.front();

        auto launch = [this, s, link_index, cap, tx](bool granted) mutable {
            auto& sub = subscribers_[s];
            auto& l = links_[static_cast<std::size_t>(link_index)];
            if (!granted)
                return;
            std::uint64_t bytes = std::min(l.queued, cap);
            if (sub.traffic.type == TrafficSpec::Type::Saturated && bytes < cap)
            {
                l.stats.offered_bytes += cap - bytes;
                l.queued += cap - bytes;
                bytes = cap;
            }
            if (bytes == 0)
                return;
            l.queued -= bytes;
            l.in_flight += bytes;
            tx.bytes = bytes;
            tx.start = now();
            sub.bursts.push_back({tx.start, tx.end()});
            OnAir meta;
            meta.tx = tx;
            meta.link = link_index;
            meta.subscriber = static_cast<int>(s);
            meta.tx_hold = !is_wimax(interfaces_[tx.source].kind) ? false : platform_of(tx.source).managed && tx.source == sub.node;
            start_transmission(std::move(meta));
        };

        if (down)
            launch(true);
        else
            acquire(ss.node, clc::ClcState::Tx, {tx.start, tx.end()}, launch);
    }

    void dpe_tick(std::size_t s)
    {
        auto& ss = subscribers_[s];
        const auto& params = cfg_.afr.params;
        const Micros t = now();

        while (!ss.retx_times.empty() && ss.retx_times.front() <= t - params.retx_window)
            ss.retx_times.pop_front();
        while (!ss.deliveries.empty() && ss.deliveries.front().first <= t - params.eval_window)
            ss.deliveries.pop_front();

        afr::DpeInputs inputs;
        inputs.retransmissions_in_window = ss.retx_times.size();
        const Micros span = std::min(t, params.eval_window);
        if (params.metric == afr::DpeMetric::Aggregate)
        {
            inputs.throughput_Bps = aggregate_throughput(t, span);
        }
        else
        {
            std::uint64_t bytes = 0;
            for (const auto& d : ss.deliveries)
                bytes += d.second;
            inputs.throughput_Bps = span > 0 ? static_cast<double>(bytes) * 1e6 / static_cast<double>(span) : 0.0;
        }
        const bool was = ss.dpe.cts_enabled;
        ss.dpe = afr::dpe_tick(ss.dpe, inputs, t, params);
        if (ss.dpe.cts_enabled != was)
        {
            TraceEvent ev;
            ev.type = "dpe";
            ev.actor = id_of(ss.node);
            ev.detail = std::string("cts=") + (ss.dpe.cts_enabled ? "on" : "off") + " retx="
                        + std::to_string(inputs.retransmissions_in_window);
            ev.node = ss.node;
            ev.value = ss.dpe.cts_enabled ? 1 : 0;
            trace(std::move(ev));
        }
        schedule(t + params.retx_window, [this, s] { dpe_tick(s); });
    }

    double aggregate_throughput(Micros t, Micros span)
    {
        // Tracks every link's delivered bytes at each tick to difference over the evaluation window.
        std::uint64_t total = 0;
        for (const auto& l : links_)
            total += l.stats.delivered_bytes;
        aggregate_history_.emplace_back(t, total);
        while (aggregate_history_.size() > 1 && aggregate_history_.front().first < t - span)
            aggregate_history_.pop_front();
        const auto& [t0, b0] = aggregate_history_.front();
        if (t <= t0)
            return 0.0;
        return static_cast<double>(total - b0) * 1e6 / static_cast<double>(t - t0);
    }

    // ---------------------------------------------------------------- results

    RunResult collect()
    {
        RunResult result;
        result.scenario = cfg_.name;
        result.seed = seed_;
        result.duration_us = cfg_.duration_us;
        result.measured_us = measured_us_;
        result.timeline_bin_us = cfg_.timeline_bin_us;
        result.cts_count = cts_count_;
        result.cts_airtime_us = cts_airtime_;
        result.events = queue_.processed();

        const double seconds = static_cast<double>(measured_us_) / 1e6;
        std::vector<SystemShare> systems;
        for (std::size_t i = 0; i < links_.size(); ++i)
        {
            auto& l = links_[i];
            LinkResult lr;
            lr.id = l.id;
            lr.source = id_of(l.source);
            lr.dest = id_of(l.dest);
            lr.system = l.system;
            lr.stats = l.stats;
            if (l.wimax)
            {
                lr.backlog_bytes = l.queued + l.in_flight;
            }
            else
            {
                const auto& st = stations_[static_cast<std::size_t>(station_of_[l.source])];
                for (const auto& f : st.queue)
                    lr.backlog_bytes += f.bytes;
            }
            lr.throughput_Bps = seconds > 0 ? static_cast<double>(l.measured_bytes) / seconds : 0.0;
            lr.share = measured_us_ > 0 ? static_cast<double>(l.measured_airtime) / static_cast<double>(measured_us_) : 0.0;
            lr.timeline = l.timeline;

            auto it = std::find_if(systems.begin(), systems.end(), [&](const SystemShare& sys) { return sys.system == l.system; });
            if (it == systems.end())
                systems.push_back({l.system, lr.share});
            else
                it->share += lr.share;
            result.links.push_back(std::move(lr));
        }
        result.system_shares = systems;
        for (const auto& sys : systems)
        {
            if (sys.system == "wimax")
                result.wimax_share = sys.share;
        }
        std::vector<double> shares;
        for (const auto& sys : systems)
            shares.push_back(sys.share);
        const bool any = std::any_of(shares.begin(), shares.end(), [](double x) { return x > 0.0; });
        result.fairness_index = any ? jain_index(shares) : 0.0;

        for (const auto& p : platforms_)
        {
            if (p.members.size() >= 2)
                result.colocated_conflict_us += conflict_time(p, cfg_.warmup_us, cfg_.duration_us);
        }
        result.trace_hash = trace_hash_;
        return result;
    }

    const ScenarioConfig& cfg_;
    std::uint64_t seed_;
    const RunOptions& options_;
    Rng rng_;
    medium::MediumConfig medium_;
    EventQueue queue_;

    std::vector<RadioInterface> interfaces_;
    std::map<std::string, NodeIndex, std::less<>> index_of_;
    std::vector<Platform> platforms_;
    std::vector<Station> stations_;
    std::vector<Subscriber> subscribers_;
    std::vector<LinkRt> links_;
    std::vector<int> station_of_;
    std::vector<int> subscriber_of_;
    std::map<std::size_t, std::uint64_t> st_arrivals_;
    std::map<NodeIndex, int> tx_holds_;
    std::map<NodeIndex, int> rx_holds_;
    std::map<std::uint64_t, OnAir> air_;
    std::vector<std::pair<Micros, wimax::FrameMap>> maps_;
    std::deque<std::pair<Micros, std::uint64_t>> aggregate_history_;

    std::uint64_t next_tx_id_ = 1;
    std::uint64_t cts_count_ = 0;
    Micros cts_airtime_ = 0;
    Micros measured_us_ = 0;
    bool has_wimax_ = false;
    bool ss_transmitting_ = false;
    std::uint64_t trace_hash_ = 14695981039346656037ULL;
};

}  // namespace

RunResult run(const ScenarioConfig& scenario, std::uint64_t seed, const RunOptions& options)
{
    validate(scenario);
    Simulation sim(scenario, seed, options);
    return sim.run();
}

}  // namespace coexsim
