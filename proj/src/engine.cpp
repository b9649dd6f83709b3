#include "ranstack/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <deque>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <variant>

#include "ranstack/forwarding.hpp"
#include "ranstack/link_map.hpp"
#include "ranstack/mac.hpp"
#include "ranstack/params.hpp"
#include "ranstack/pdcp.hpp"
#include "ranstack/phy.hpp"
#include "ranstack/rlc.hpp"
#include "ranstack/rrc.hpp"
#include "ranstack/rrm.hpp"
#include "ranstack/scenario_io.hpp"

namespace ranstack::engine {

namespace {

SimTime next_arrival_gap(const TrafficCfg& cfg, bool first, Rng& rng) {
    switch (cfg.kind) {
        case TrafficKind::PERIODIC:
            if (first) return static_cast<SimTime>(rng.uniform() * cfg.period_ms * kUsPerMs);
            return ms_to_us(cfg.period_ms);
        case TrafficKind::POISSON_PACKETS:
            return static_cast<SimTime>(rng.exponential(1.0 / cfg.packets_per_s) * kUsPerSec) + 1;
        case TrafficKind::POISSON_FILES:
            return static_cast<SimTime>(rng.exponential(1.0 / cfg.files_per_s) * kUsPerSec) + 1;
        case TrafficKind::FULL_BUFFER:
            break;
    }
    return 0;
}

}  // namespace

std::vector<SimTime> arrival_times(const TrafficCfg& cfg, SimTime horizon_us, Rng& rng) {
    std::vector<SimTime> times;
    if (cfg.kind == TrafficKind::FULL_BUFFER) return times;
    const SimTime stop = cfg.stop_ms ? std::min(horizon_us, ms_to_us(*cfg.stop_ms)) : horizon_us;
    SimTime t = ms_to_us(cfg.start_ms) + next_arrival_gap(cfg, true, rng);
    while (t < stop) {
        times.push_back(t);
        t += next_arrival_gap(cfg, false, rng);
    }
    return times;
}

namespace {

// ---------------------------------------------------------------------------
// Event machinery
// ---------------------------------------------------------------------------

struct TickEv {
    std::uint32_t carrier;
};
struct ArrivalEv {
    std::uint32_t bearer;
};
struct SegRef {
    std::uint32_t channel;
    std::uint64_t seq;
    std::uint32_t wire_bytes;
    bool last;
};
struct FeedbackEv {
    std::uint32_t carrier;
    std::uint32_t ue;
    int proc_id;  // -1 when the RAT runs without HARQ
    bool delivered;
    std::vector<SegRef> segs;
};
struct DeliveryEv {
    TransportBlock tb;
};
struct DiscoveryEv {};
struct MobilityEv {};
struct QosEvalEv {};
struct MeasurementEv {};
struct PdcpReorderEv {
    std::uint32_t bearer;
    std::uint64_t epoch;
};
struct RlcSweepEv {
    std::uint32_t channel;
};
struct EstablishEv {
    std::uint32_t ue;
    std::uint32_t cell;
};
struct ReleaseEv {
    std::uint32_t ue;
};
struct HandoverEv {
    rrc::HandoverDecision decision;
};
struct CommandEv {
    std::uint32_t bearer;
    rrm::StackConfigCommand cmd;
};

using Payload = std::variant<TickEv, ArrivalEv, FeedbackEv, DeliveryEv, DiscoveryEv, MobilityEv,
                             QosEvalEv, MeasurementEv, PdcpReorderEv, RlcSweepEv, EstablishEv,
                             ReleaseEv, HandoverEv, CommandEv>;

struct Event {
    EventKey key;
    Payload payload;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const { return event_before(b.key, a.key); }
};

// ---------------------------------------------------------------------------
// Runtime state
// ---------------------------------------------------------------------------

struct CarrierRt {
    CarrierCfg cfg;
    std::uint32_t idx = 0;
    std::uint32_t cell = 0;
    std::uint32_t rat = 0;
    std::uint32_t sched = 0;
    BandClass band = BandClass::MID;
    double noise_dbm = 0.0;
    int ru_total = 0;
    // stats
    std::int64_t ttis = 0, granted = 0, deferred = 0, tbs = 0, retx = 0, harq_drops = 0,
                 phy_losses = 0;
    std::int64_t ru_used = 0;
};

struct CellRt {
    CellCfg cfg;
    std::uint32_t idx = 0;
    std::vector<std::uint32_t> carriers;           // carrier rt indices
    std::map<std::uint32_t, std::uint32_t> scheds;  // rat -> scheduler idx
    std::map<std::uint32_t, rrc::EntityMode> rrc_modes;  // rat -> mode
};

struct CopyRecord {
    std::uint32_t emitted = 0;  // wire bytes handed to MAC so far
    std::uint32_t acked = 0;    // wire bytes confirmed delivered
    bool last_emitted = false;
    bool terminal = false;   // copy finished its life (received or lost)
    bool confirmed = false;  // PDCP retransmit buffer released
    std::size_t tunnel_index = 0;
    SimTime created_at = 0;
};

struct QueuedCopy {
    PdcpPdu pdu;
    std::uint32_t sent = 0;  // payload bytes already segmented out
    std::size_t tunnel_index = 0;
};

struct ChannelRt {
    std::uint32_t idx = 0;
    std::string name;
    std::uint32_t bearer = 0;
    std::uint32_t cell = 0;
    std::uint32_t rat = 0;
    std::uint32_t sched = 0;
    bool active = true;
    rlc::Mode mode = rlc::Mode::UNACKNOWLEDGED;
    rlc::RxEntity rx;
    std::deque<QueuedCopy> txq;
    std::int64_t pending_bytes = 0;
    std::map<std::uint64_t, CopyRecord> records;
    bool sweep_scheduled = false;
};

struct SchedulerRt {
    std::uint32_t idx = 0;
    std::uint32_t cell = 0;
    std::uint32_t rat = 0;
    std::vector<std::uint32_t> carriers;
    std::set<std::uint32_t> channels;    // active channels bound here
    std::set<std::uint32_t> backlogged;  // subset with pending bytes
    std::set<std::uint32_t> fullbuffer;  // bearers to replenish at ticks
    mac::RrCursors cursors;
};

struct Fate {
    std::int32_t copies = 0;
    bool delivered = false;
};

struct TunnelMeta {
    std::string cell_id;
    std::string rat_id;
    std::string channel_name;
    std::int64_t placements = 0;
    std::int64_t delivered_copies = 0;
};

struct BearerRt {
    std::uint32_t idx = 0;
    std::string id;
    std::uint32_t ue = 0;
    QosProfile qos;
    DispatchMode requested = DispatchMode::AUTO;
    std::vector<TunnelCfg> explicit_tunnels;
    bool established = false;
    bool best_effort = false;
    pdcp::PdcpEntity pdcp;
    fwd::Dispatcher dispatcher;
    std::vector<TunnelMeta> tunnel_meta;
    std::optional<std::uint32_t> group;
    Rng rng_fwd;
    // traffic
    std::optional<TrafficCfg> traffic;
    Rng rng_traffic;
    bool full_buffer = false;
    // accounting
    std::map<std::uint64_t, Fate> fates;
    std::int64_t offered = 0;
    std::int64_t delivered = 0;
    std::int64_t delivered_app_bytes = 0;
    std::int64_t deadline_misses = 0;
    std::int64_t late_deliveries = 0;
    std::int64_t in_order_violations = 0;
    std::int64_t payload_mismatches = 0;
    std::int64_t released_drops = 0;
    std::int64_t last_delivered_seq = -1;
    std::vector<double> latencies_ms;
    std::uint64_t scheduled_reorder_epoch = ~0ULL;
    // qos evaluation window
    SimTime last_eval = 0;
    std::int64_t eval_app_bytes = 0;
    std::int64_t eval_offered = 0;
    std::int64_t eval_misses = 0;
    std::int64_t eval_skipped_seen = 0;
    SimTime last_reconfig = -1;
    std::vector<ReconfigEvent> reconfigs;
};

struct UeRt {
    std::uint32_t idx = 0;
    std::string id;
    Position pos;
    Position vel;
    std::set<std::uint32_t> rats;
    double freq_min = 0.0, freq_max = 0.0;
    RrcState state = RrcState::IDLE;
    std::vector<std::uint32_t> serving;
    std::vector<std::uint32_t> bearers;
    std::vector<bool> known_cells;
    bool attach_pending = false;
    bool attach_failed_logged = false;
    bool handover_pending = false;
    rrc::A3Tracker a3;
};

std::string instance_id(const std::string& base, int index, int count) {
    if (count <= 1) return base;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%04d", index);
    return base + buf;
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

class Simulation {
public:
    Simulation(const ScenarioConfig& cfg, std::uint64_t seed, const RunOptions& opt)
        : cfg_(cfg), seed_(seed), opt_(opt) {}

    MetricsReport run();

private:
    // setup
    void build_topology();
    void expand_population();
    void build_link_geometry();
    void refresh_links();
    void arm_initial_events();

    // event plumbing
    void push(SimTime t, EventKind kind, Payload payload) {
        if (t < now_) throw SimAbort("causality violation: event scheduled in the past");
        queue_.push(Event{EventKey{t, kind, seq_counter_++}, std::move(payload)});
    }

    // handlers
    void on_tick(const TickEv& ev);
    void on_arrival(const ArrivalEv& ev);
    void on_feedback(const FeedbackEv& ev);
    void on_delivery(const DeliveryEv& ev);
    void on_discovery();
    void on_mobility();
    void on_qos_eval();
    void on_measurement();
    void on_pdcp_reorder(const PdcpReorderEv& ev);
    void on_rlc_sweep(const RlcSweepEv& ev);
    void on_establish(const EstablishEv& ev);
    void on_release(const ReleaseEv& ev);
    void on_handover(const HandoverEv& ev);
    void on_command(const CommandEv& ev);

    // helpers
    double link_sinr(std::uint32_t ue, std::uint32_t carrier) const {
        return link_matrix_[ue * carriers_.size() + carrier];
    }
    phy::LinkState link_state(std::uint32_t ue, const CarrierRt& car) const;
    bool carrier_compatible(const UeRt& ue, const CarrierRt& car) const;
    std::vector<rrm::CandidateCarrier> candidates_for(const UeRt& ue);
    void discovery_pass(bool allow_attach);
    void try_attach(UeRt& ue, bool via_paging);
    void establish_now(UeRt& ue, std::uint32_t cell);
    void activate_bearer(BearerRt& b, std::uint32_t serving_cell);
    std::uint32_t map_channel(BearerRt& b, std::uint32_t cell, std::uint32_t rat,
                              const std::string& name);
    void retire_channel(std::uint32_t channel_idx);
    void dispatch_pdu(BearerRt& b, const PdcpPdu& pdu);
    void enqueue_copy(BearerRt& b, std::size_t tunnel_index, const PdcpPdu& pdu);
    std::int64_t copy_cost_estimate(const ChannelRt& ch, const QueuedCopy& copy) const;
    void add_pending(ChannelRt& ch, std::int64_t delta);
    void offer_sdu(BearerRt& b, SimTime created_at, std::size_t size);
    Bytes make_payload(const BearerRt& b, std::uint64_t seq, std::size_t size) const;
    void replenish_full_buffer(BearerRt& b);
    std::vector<MacSubPdu> pull_from_channel(ChannelRt& ch, std::int64_t budget);
    void send_tb(CarrierRt& car, const TransportBlock& tb, int proc_id,
                 bool retransmission = false);
    void ack_segment(const SegRef& ref);
    void fail_copy(ChannelRt& ch, std::uint64_t seq);
    void deliver_sdu(BearerRt& b, const Sdu& sdu);
    void handle_rx_result(BearerRt& b, pdcp::PdcpEntity::RxResult&& res);
    void maybe_schedule_reorder(BearerRt& b);
    void apply_plan(BearerRt& b, const rrm::BearerPlan& plan, std::uint32_t serving_cell);
    void form_group_for(BearerRt& b, GroupPurpose purpose);
    void drop_group_ref(BearerRt& b);
    void validate_runtime();
    void violation(const std::string& what);
    void trace_rrm(const char* decision, const std::string& subject, const std::string& detail);
    void trace_rrc(const char* event, const std::string& ue, const std::string& cell,
                   const std::string& detail);
    MetricsReport finalize();

    std::uint32_t rat_index(const std::string& id) const {
        for (std::uint32_t i = 0; i < rats_.size(); ++i) {
            if (rats_[i].id == id) return i;
        }
        throw ProtocolError("unknown rat '" + id + "'");
    }
    std::uint32_t cell_index(const std::string& id) const {
        for (std::uint32_t i = 0; i < cells_.size(); ++i) {
            if (cells_[i].cfg.id == id) return i;
        }
        throw ProtocolError("unknown cell '" + id + "'");
    }

    // configuration
    ScenarioConfig cfg_;
    std::uint64_t seed_ = 0;
    RunOptions opt_;
    SimTime duration_us_ = 0;

    // topology
    std::vector<RatProfile> rats_;
    std::vector<CellRt> cells_;
    std::vector<CarrierRt> carriers_;
    std::vector<SchedulerRt> scheds_;
    std::vector<UeRt> ues_;
    std::vector<BearerRt> bearers_;
    std::vector<ChannelRt> channels_;
    std::map<std::string, std::pair<std::uint32_t, std::uint32_t>> channel_bindings_;
    bool topology_static_ = true;

    // radio state
    LinkGeometry geometry_;
    LinkMatrix link_matrix_;
    rrm::RadioMap radio_map_;
    rrm::GroupRegistry groups_;

    // MAC state
    std::map<std::uint64_t, mac::HarqBank> harq_banks_;  // (carrier<<32 | ue)
    std::map<std::uint32_t, std::deque<std::pair<std::uint32_t, int>>> retx_;

    // rng streams
    Rng rng_topology_;
    Rng rng_rrc_;
    std::vector<Rng> rng_phy_;  // per carrier
    std::vector<Rng> rng_mac_;  // per carrier

    // event loop
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    SimTime now_ = 0;
    std::uint64_t seq_counter_ = 0;
    std::uint64_t tb_counter_ = 0;

    // globals
    GlobalMetrics global_;
    std::vector<std::string> abort_diagnostics_;
};

phy::LinkState Simulation::link_state(std::uint32_t ue, const CarrierRt& car) const {
    phy::LinkState ls;
    ls.ue = ue;
    ls.cell = car.cell;
    ls.carrier = car.idx;
    ls.sinr_db = link_sinr(ue, car.idx);
    ls.ideal = car.cfg.ideal;
    ls.fixed_loss_prob = car.cfg.fixed_loss_prob;
    ls.updated_at = now_;
    return ls;
}

bool Simulation::carrier_compatible(const UeRt& ue, const CarrierRt& car) const {
    if (!ue.rats.count(car.rat)) return false;
    return car.cfg.center_freq_mhz >= ue.freq_min && car.cfg.center_freq_mhz <= ue.freq_max;
}

void Simulation::violation(const std::string& what) {
    if (!opt_.keep_going) throw SimAbort(what);
    abort_diagnostics_.push_back(what);
}

void Simulation::trace_rrm(const char* decision, const std::string& subject,
                           const std::string& detail) {
    if (opt_.trace.rrm) {
        (*opt_.trace.rrm) << us_to_ms(now_) << ',' << decision << ',' << subject << ',' << detail
                          << '\n';
    }
}

void Simulation::trace_rrc(const char* event, const std::string& ue, const std::string& cell,
                           const std::string& detail) {
    if (opt_.trace.rrc) {
        (*opt_.trace.rrc) << us_to_ms(now_) << ',' << event << ',' << ue << ',' << cell << ','
                          << detail << '\n';
    }
}

// ---------------------------------------------------------------------------
// Setup
// ---------------------------------------------------------------------------

void Simulation::build_topology() {
    rats_ = cfg_.rats;
    for (std::uint32_t ci = 0; ci < cfg_.cells.size(); ++ci) {
        CellRt cell;
        cell.cfg = cfg_.cells[ci];
        cell.idx = ci;
        cells_.push_back(std::move(cell));
    }
    for (auto& cell : cells_) {
        for (const auto& car_cfg : cell.cfg.carriers) {
            CarrierRt car;
            car.cfg = car_cfg;
            car.idx = static_cast<std::uint32_t>(carriers_.size());
            car.cell = cell.idx;
            car.rat = rat_index(car_cfg.rat);
            car.band = freq_band_class(car_cfg);
            car.noise_dbm = phy::noise_floor_dbm(car_cfg.bandwidth_mhz, cfg_.phy.noise_figure_db);
            car.ru_total = static_cast<int>(rats_[car.rat].resource_units_per_mhz *
                                            car_cfg.bandwidth_mhz);
            cell.carriers.push_back(car.idx);

            if (!cell.scheds.count(car.rat)) {
                SchedulerRt sched;
                sched.idx = static_cast<std::uint32_t>(scheds_.size());
                sched.cell = cell.idx;
                sched.rat = car.rat;
                cell.scheds[car.rat] = sched.idx;
                cell.rrc_modes[car.rat] = rats_[car.rat].kind == RatKind::WIFI_LIKE
                                              ? rrc::EntityMode::TRANSPARENT
                                              : rrc::EntityMode::FULL;
                scheds_.push_back(std::move(sched));
            }
            car.sched = cell.scheds[car.rat];
            scheds_[car.sched].carriers.push_back(car.idx);
            carriers_.push_back(std::move(car));
        }
    }
    for (const auto& car : carriers_) {
        rng_phy_.push_back(Rng::stream(seed_, "phy/" + cells_[car.cell].cfg.id + "/" + car.cfg.id));
        rng_mac_.push_back(Rng::stream(seed_, "mac/" + cells_[car.cell].cfg.id + "/" + car.cfg.id));
    }
}

void Simulation::expand_population() {
    std::map<std::string, std::vector<std::uint32_t>> spec_to_instances;

    for (const auto& ue_cfg : cfg_.ues) {
        std::vector<std::uint32_t> instances;
        for (int k = 0; k < ue_cfg.count; ++k) {
            UeRt ue;
            ue.idx = static_cast<std::uint32_t>(ues_.size());
            ue.id = instance_id(ue_cfg.id, k, ue_cfg.count);
            if (ue_cfg.placement) {
                const double r = ue_cfg.placement->radius_m * std::sqrt(rng_topology_.uniform());
                const double theta = 2.0 * 3.14159265358979323846 * rng_topology_.uniform();
                ue.pos = {ue_cfg.placement->center.x + r * std::cos(theta),
                          ue_cfg.placement->center.y + r * std::sin(theta)};
            } else {
                ue.pos = *ue_cfg.position;
            }
            ue.vel = ue_cfg.velocity_mps;
            if (ue.vel.x != 0.0 || ue.vel.y != 0.0) topology_static_ = false;
            for (const auto& r : ue_cfg.rats) ue.rats.insert(rat_index(r));
            ue.freq_min = ue_cfg.freq_min_mhz;
            ue.freq_max = ue_cfg.freq_max_mhz;
            ue.known_cells.assign(cells_.size(), false);
            instances.push_back(ue.idx);
            ues_.push_back(std::move(ue));
        }
        spec_to_instances[ue_cfg.id] = std::move(instances);
    }

    std::map<std::string, const TrafficCfg*> traffic_by_bearer;
    for (const auto& t : cfg_.traffic) traffic_by_bearer[t.bearer] = &t;

    for (const auto& b_cfg : cfg_.bearers) {
        const auto& instances = spec_to_instances.at(b_cfg.ue);
        const int count = static_cast<int>(instances.size());
        for (int k = 0; k < count; ++k) {
            BearerRt b;
            b.idx = static_cast<std::uint32_t>(bearers_.size());
            b.id = instance_id(b_cfg.id, k, count);
            b.ue = instances[k];
            b.qos = b_cfg.qos;
            b.requested = b_cfg.dispatch;
            b.explicit_tunnels = b_cfg.tunnels;
            b.pdcp = pdcp::PdcpEntity(b.idx, b.id);
            b.rng_fwd = Rng::stream(seed_, "fwd/" + b.id);
            b.rng_traffic = Rng::stream(seed_, "traffic/" + b.id);
            if (const auto it = traffic_by_bearer.find(b_cfg.id); it != traffic_by_bearer.end()) {
                b.traffic = *it->second;
                b.full_buffer = it->second->kind == TrafficKind::FULL_BUFFER;
            }
            ues_[b.ue].bearers.push_back(b.idx);
            bearers_.push_back(std::move(b));
        }
    }
}

void Simulation::build_link_geometry() {
    geometry_.carriers.clear();
    for (const auto& car : carriers_) {
        LinkGeometry::CarrierGeom g;
        g.cell_position = cells_[car.cell].cfg.position;
        g.tx_power_dbm = cells_[car.cell].cfg.tx_power_dbm;
        g.freq_mhz = car.cfg.center_freq_mhz;
        g.band = car.band;
        g.noise_dbm = car.noise_dbm;
        for (const auto& other : carriers_) {
            if (other.idx != car.idx && other.cell != car.cell &&
                other.cfg.center_freq_mhz == car.cfg.center_freq_mhz) {
                g.cochannel.push_back(other.idx);
            }
        }
        geometry_.carriers.push_back(std::move(g));
    }
    refresh_links();
}

void Simulation::refresh_links() {
    geometry_.ue_positions.resize(ues_.size());
    for (std::size_t i = 0; i < ues_.size(); ++i) geometry_.ue_positions[i] = ues_[i].pos;
    fill_link_matrix(geometry_, link_matrix_);
}

void Simulation::arm_initial_events() {
    for (const auto& car : carriers_) {
        push(0, EventKind::TTI_TICK, TickEv{car.idx});
    }
    push(kSibPeriodUs, EventKind::TIMER, DiscoveryEv{});
    push(kQosEvalPeriodUs, EventKind::TIMER, QosEvalEv{});
    if (!topology_static_) push(kMobilityUpdateUs, EventKind::TIMER, MobilityEv{});
    if (cfg_.measurement) {
        push(ms_to_us(cfg_.measurement->period_ms), EventKind::TIMER, MeasurementEv{});
    }

    for (auto& b : bearers_) {
        if (!b.traffic || b.full_buffer) continue;
        const SimTime start = ms_to_us(b.traffic->start_ms);
        const SimTime first = start + next_arrival_gap(*b.traffic, true, b.rng_traffic);
        const SimTime stop =
            b.traffic->stop_ms ? std::min(duration_us_, ms_to_us(*b.traffic->stop_ms)) : duration_us_;
        if (first < stop) push(first, EventKind::TRAFFIC_ARRIVAL, ArrivalEv{b.idx});
    }

    std::uint32_t inst = 0;
    for (const auto& ue_cfg : cfg_.ues) {
        for (int k = 0; k < ue_cfg.count; ++k, ++inst) {
            if (ue_cfg.release_at_ms) {
                push(ms_to_us(*ue_cfg.release_at_ms), EventKind::CONTROL, ReleaseEv{inst});
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Discovery / attach / establish
// ---------------------------------------------------------------------------

void Simulation::discovery_pass(bool allow_attach) {
    bool any_idle = false;
    for (const auto& ue : ues_) {
        if (ue.state == RrcState::IDLE) any_idle = true;
    }

    if (topology_static_ && !any_idle) {
        radio_map_.touch_all(now_);
        return;
    }

    for (auto& ue : ues_) {
        for (const auto& cell : cells_) {
            double best = -1e9;
            bool any = false;
            for (const auto car_idx : cell.carriers) {
                const auto& car = carriers_[car_idx];
                if (!carrier_compatible(ue, car)) continue;
                any = true;
                best = std::max(best, link_sinr(ue.idx, car_idx));
            }
            if (!any) continue;
            if (best >= cfg_.phy.detection_threshold_db) {
                const bool newly = !ue.known_cells[cell.idx];
                ue.known_cells[cell.idx] = true;
                for (const auto car_idx : cell.carriers) {
                    const auto& car = carriers_[car_idx];
                    if (!carrier_compatible(ue, car)) continue;
                    radio_map_.update(ue.idx, cell.idx, car_idx, link_sinr(ue.idx, car_idx), now_);
                }
                if (newly) {
                    // SIB events come only from FULL entities; RRC-less RATs
                    // are associated silently through the RRM radio map.
                    for (const auto& [rat, mode] : cell.rrc_modes) {
                        if (mode == rrc::EntityMode::FULL) {
                            trace_rrc("sib", ue.id, cell.cfg.id, rats_[rat].id);
                            break;
                        }
                    }
                }
            }
        }
    }

    if (allow_attach && cfg_.attach_policy == AttachPolicy::ON_DISCOVERY) {
        for (auto& ue : ues_) {
            if (ue.state == RrcState::IDLE && !ue.attach_pending) try_attach(ue, false);
        }
    }
}

void Simulation::try_attach(UeRt& ue, bool via_paging) {
    std::vector<std::uint32_t> candidates;
    for (const auto& cell : cells_) {
        bool compatible = false;
        for (const auto car_idx : cell.carriers) {
            if (carrier_compatible(ue, carriers_[car_idx])) compatible = true;
        }
        if (compatible) candidates.push_back(cell.idx);
    }
    const auto choice = rrm::attach(ue.idx, candidates, radio_map_, now_);
    if (!choice) {
        if (!ue.attach_failed_logged) {
            global_.attach_failures++;
            ue.attach_failed_logged = true;
            trace_rrm("attach_fail", ue.id, "no compatible cell in range");
        }
        return;
    }
    if (via_paging) {
        const auto outcome = rrc::page(ue.state, true);
        trace_rrc("page", ue.id, cells_[*choice].cfg.id,
                  outcome == rrc::PageOutcome::REACHED ? "reached" : "unreached");
        if (outcome != rrc::PageOutcome::REACHED) return;
    }
    ue.attach_pending = true;
    trace_rrm("attach", ue.id, cells_[*choice].cfg.id);
    push(now_ + kSignalingDelayUs, EventKind::CONTROL, EstablishEv{ue.idx, *choice});
}

void Simulation::on_establish(const EstablishEv& ev) {
    auto& ue = ues_[ev.ue];
    ue.attach_pending = false;
    rrc::check_establish(ue.state);
    ue.state = RrcState::CONNECTED;
    ue.serving.assign(1, ev.cell);

    const auto& cell = cells_[ev.cell];
    bool full_rrc = false;
    for (const auto& [rat, mode] : cell.rrc_modes) {
        if (mode == rrc::EntityMode::FULL) full_rrc = true;
    }
    if (full_rrc) trace_rrc("establish", ue.id, cell.cfg.id, "");

    const std::uint64_t nonce = rng_rrc_.next_u64();
    for (const auto b_idx : ue.bearers) {
        auto& b = bearers_[b_idx];
        pdcp::Key key = rrc::derive_key(ue.id, cell.cfg.id, nonce);
        b.pdcp.set_key(key);
        activate_bearer(b, ev.cell);
    }
}

void Simulation::establish_now(UeRt& ue, std::uint32_t cell) {
    push(now_, EventKind::CONTROL, EstablishEv{ue.idx, cell});
    ue.attach_pending = true;
}

std::vector<rrm::CandidateCarrier> Simulation::candidates_for(const UeRt& ue) {
    std::vector<rrm::CandidateCarrier> out;
    for (const auto& car : carriers_) {
        if (!carrier_compatible(ue, car)) continue;
        const auto sinr = radio_map_.sinr(ue.idx, car.cell, car.idx, now_);
        if (!sinr) continue;
        rrm::CandidateCarrier c;
        c.cell = car.cell;
        c.carrier = car.idx;
        c.rat = car.rat;
        c.role = car.cfg.service_role;
        const auto& rat = rats_[car.rat];
        const double bits_per_tti =
            static_cast<double>(phy::tb_capacity_bits(rat, car.cfg, *sinr));
        c.rate_estimate_bps = bits_per_tti * (1e6 / static_cast<double>(rat.tti_us));
        if (car.cfg.ideal) {
            c.delivery_estimate = 1.0;
        } else if (car.cfg.fixed_loss_prob) {
            c.delivery_estimate = 1.0 - *car.cfg.fixed_loss_prob;
        } else {
            c.delivery_estimate = 1.0 - phy::bler(rat.se_curve, *sinr, cfg_.phy);
        }
        out.push_back(c);
    }
    return out;
}

void Simulation::activate_bearer(BearerRt& b, std::uint32_t serving_cell) {
    if (b.established) return;

    if (!b.explicit_tunnels.empty()) {
        rrm::BearerPlan plan;
        plan.mode = b.requested == DispatchMode::AUTO
                        ? (b.explicit_tunnels.size() > 1 ? DispatchMode::SPLIT : DispatchMode::SINGLE)
                        : b.requested;
        apply_plan(b, plan, serving_cell);  // tunnels mapped below from cfg
    } else {
        auto plan = rrm::plan_bearer(b.qos, serving_cell, candidates_for(ues_[b.ue]));
        if (b.requested != DispatchMode::AUTO) {
            // The scenario pins the initial mode; RRM may still reconfigure
            // it later through the QoS ladder.
            plan.mode = b.requested;
            if (plan.mode == DispatchMode::SINGLE && !plan.tunnels.empty()) {
                plan.tunnels.resize(1);
                plan.group.reset();
            }
        }
        apply_plan(b, plan, serving_cell);
    }

    b.established = true;
    b.last_eval = now_;

    // Anything that arrived before the tunnels existed goes out now.
    for (const auto& pdu : b.dispatcher.take_held()) dispatch_pdu(b, pdu);

    if (b.full_buffer) {
        for (const auto& t : b.dispatcher.tunnels()) {
            scheds_[channels_[t.channel].sched].fullbuffer.insert(b.idx);
        }
        replenish_full_buffer(b);
    }
}

void Simulation::apply_plan(BearerRt& b, const rrm::BearerPlan& plan, std::uint32_t serving_cell) {
    b.best_effort = b.best_effort || plan.best_effort;
    b.dispatcher.set_mode(plan.mode == DispatchMode::AUTO ? DispatchMode::SINGLE : plan.mode);

    if (!b.explicit_tunnels.empty()) {
        for (const auto& t : b.explicit_tunnels) {
            const auto cell_idx = cell_index(t.cell);
            const auto rat_idx = rat_index(t.rat);
            const auto ch = map_channel(b, cell_idx, rat_idx, t.channel);
            b.dispatcher.add_tunnel(ch);
            b.tunnel_meta.push_back({t.cell, t.rat, channels_[ch].name});
        }
    } else {
        for (const auto& t : plan.tunnels) {
            const std::string name = b.id + "/" + cells_[t.cell].cfg.id + "/" + rats_[t.rat].id;
            const auto ch = map_channel(b, t.cell, t.rat, name);
            b.dispatcher.add_tunnel(ch);
            b.tunnel_meta.push_back({cells_[t.cell].cfg.id, rats_[t.rat].id, name});
        }
    }

    if (plan.group) form_group_for(b, *plan.group);

    std::string detail = std::string(to_string(b.dispatcher.mode())) + " over " +
                         std::to_string(b.dispatcher.tunnels().size()) + " tunnel(s)";
    if (b.best_effort) detail += " best-effort";
    trace_rrm("plan", b.id, detail);
    (void)serving_cell;
}

std::uint32_t Simulation::map_channel(BearerRt& b, std::uint32_t cell, std::uint32_t rat,
                                      const std::string& name) {
    const auto& cell_rt = cells_[cell];
    const auto sched_it = cell_rt.scheds.find(rat);
    if (sched_it == cell_rt.scheds.end()) {
        throw ProtocolError("no scheduler for cell '" + cell_rt.cfg.id + "' and rat '" +
                            rats_[rat].id + "'");
    }

    // A logical channel binds to exactly one scheduler, ever.
    const auto binding = std::make_pair(cell, rat);
    auto [it, inserted] = channel_bindings_.emplace(name, binding);
    if (!inserted && it->second != binding) {
        throw ProtocolError("channel '" + name + "' shared between schedulers");
    }

    ChannelRt ch;
    ch.idx = static_cast<std::uint32_t>(channels_.size());
    ch.name = name;
    ch.bearer = b.idx;
    ch.cell = cell;
    ch.rat = rat;
    ch.sched = sched_it->second;
    ch.mode = rats_[rat].has_rlc ? rlc::Mode::UNACKNOWLEDGED : rlc::Mode::TRANSPARENT;
    ch.rx = rlc::RxEntity(ch.mode);
    channels_.push_back(std::move(ch));
    scheds_[sched_it->second].channels.insert(channels_.back().idx);
    return channels_.back().idx;
}

void Simulation::retire_channel(std::uint32_t channel_idx) {
    auto& ch = channels_[channel_idx];
    if (!ch.active) return;
    ch.active = false;
    auto& b = bearers_[ch.bearer];
    for (auto& [seq, rec] : ch.records) {
        if (!rec.terminal) {
            rec.terminal = true;
            b.fates[seq].copies--;
        }
    }
    ch.txq.clear();
    ch.pending_bytes = 0;
    auto& sched = scheds_[ch.sched];
    sched.channels.erase(channel_idx);
    sched.backlogged.erase(channel_idx);
}

void Simulation::form_group_for(BearerRt& b, GroupPurpose purpose) {
    std::set<std::uint32_t> cells;
    for (const auto& t : b.dispatcher.tunnels()) cells.insert(channels_[t.channel].cell);
    if (cells.size() < 2) return;
    auto existing = groups_.find(cells, purpose);
    std::uint32_t gid;
    if (existing) {
        gid = *existing;
    } else {
        // Grouping on demand; refuse only if some member sits in a different
        // group already (single-membership invariant).
        for (const auto c : cells) {
            if (groups_.group_of(c)) return;  // leave ungrouped rather than conflict
        }
        std::string name = to_string(purpose);
        name += ":";
        for (const auto c : cells) name += cells_[c].cfg.id + "+";
        gid = groups_.form(cells, purpose, name);
        trace_rrm("group_form", name, "");
    }
    groups_.add_reference(gid, b.id);
    b.group = gid;
}

void Simulation::drop_group_ref(BearerRt& b) {
    if (!b.group) return;
    groups_.drop_reference(*b.group, b.id);
    const auto& refs = groups_.references();
    const auto it = refs.find(*b.group);
    if (it == refs.end() || it->second.empty()) {
        trace_rrm("group_dissolve", groups_.state(*b.group).name, "");
        groups_.dissolve(*b.group);
    }
    b.group.reset();
}

void Simulation::on_release(const ReleaseEv& ev) {
    auto& ue = ues_[ev.ue];
    if (ue.state != RrcState::CONNECTED) return;  // scripted release on idle UE: no-op
    rrc::check_release(ue.state);

    for (const auto b_idx : ue.bearers) {
        auto& b = bearers_[b_idx];
        if (!b.established) continue;
        for (const auto& t : b.dispatcher.tunnels()) retire_channel(t.channel);
        b.released_drops += static_cast<std::int64_t>(b.dispatcher.held_size());
        b.dispatcher.take_held();
        b.dispatcher.tunnels().clear();
        b.tunnel_meta.clear();
        drop_group_ref(b);
        b.established = false;
        for (auto& sched : scheds_) sched.fullbuffer.erase(b.idx);
    }
    ue.state = RrcState::IDLE;
    const std::string cell_id = ue.serving.empty() ? "" : cells_[ue.serving.front()].cfg.id;
    ue.serving.clear();
    trace_rrc("release", ue.id, cell_id, "buffers drained");
}

// ---------------------------------------------------------------------------
// Traffic
// ---------------------------------------------------------------------------

Bytes Simulation::make_payload(const BearerRt& b, std::uint64_t seq, std::size_t size) const {
    Bytes payload = b.pdcp.upper_header();
    if (payload.size() > size) payload.resize(size);
    Rng body(fnv1a64(b.id) ^ (seq * 0x9e3779b97f4a7c15ULL + 0xd1b54a32d192ed03ULL));
    while (payload.size() < size) {
        std::uint64_t word = body.next_u64();
        for (int i = 0; i < 8 && payload.size() < size; ++i) {
            payload.push_back(static_cast<std::uint8_t>(word >> (8 * i)));
        }
    }
    return payload;
}

void Simulation::offer_sdu(BearerRt& b, SimTime created_at, std::size_t size) {
    Sdu sdu;
    sdu.bearer = b.idx;
    sdu.created_at = created_at;
    sdu.payload = make_payload(b, b.pdcp.tx_next(), size);

    const PdcpPdu pdu = b.pdcp.tx(sdu);
    b.offered++;
    b.eval_offered++;
    b.fates[pdu.seq];  // default-construct: zero copies until placed
    dispatch_pdu(b, pdu);
}

void Simulation::dispatch_pdu(BearerRt& b, const PdcpPdu& pdu) {
    const auto placements = b.dispatcher.dispatch(pdu, b.rng_fwd);
    for (const auto t : placements) enqueue_copy(b, t, pdu);
    // Hold-queue overflow leaves the fate at zero copies; it counts as lost.
}

std::int64_t Simulation::copy_cost_estimate(const ChannelRt& ch, const QueuedCopy& copy) const {
    const auto remaining = static_cast<std::int64_t>(copy.pdu.payload.size()) - copy.sent;
    if (remaining <= 0) return 0;
    if (ch.mode == rlc::Mode::TRANSPARENT) {
        return kMacSubheaderBytes + kPdcpHeaderBytes + remaining;
    }
    return kMacSubheaderBytes + kRlcSegHeaderBytes + (copy.sent == 0 ? kPdcpHeaderBytes : 0) +
           remaining;
}

void Simulation::add_pending(ChannelRt& ch, std::int64_t delta) {
    const bool was_backlogged = ch.pending_bytes > 0;
    ch.pending_bytes += delta;
    const bool is_backlogged = ch.pending_bytes > 0;
    auto& sched = scheds_[ch.sched];
    if (!was_backlogged && is_backlogged && ch.active) sched.backlogged.insert(ch.idx);
    if (was_backlogged && !is_backlogged) sched.backlogged.erase(ch.idx);
}

void Simulation::enqueue_copy(BearerRt& b, std::size_t tunnel_index, const PdcpPdu& pdu) {
    auto& tunnel = b.dispatcher.tunnels()[tunnel_index];
    auto& ch = channels_[tunnel.channel];
    if (!ch.active) return;
    if (ch.records.count(pdu.seq)) return;  // this leg already carries/carried the copy

    CopyRecord rec;
    rec.tunnel_index = tunnel_index;
    rec.created_at = pdu.created_at;
    ch.records.emplace(pdu.seq, rec);
    b.fates[pdu.seq].copies++;
    b.tunnel_meta[tunnel_index].placements++;

    QueuedCopy copy{pdu, 0, tunnel_index};
    const auto cost = copy_cost_estimate(ch, copy);
    ch.txq.push_back(std::move(copy));
    add_pending(ch, cost);
}

void Simulation::replenish_full_buffer(BearerRt& b) {
    if (!b.established || !b.full_buffer) return;
    std::int64_t backlog = static_cast<std::int64_t>(b.dispatcher.held_size()) * cfg_.mtu_bytes;
    for (const auto& t : b.dispatcher.tunnels()) {
        backlog += channels_[t.channel].pending_bytes;
    }
    while (backlog < kFullBufferWatermarkBytes) {
        offer_sdu(b, now_, static_cast<std::size_t>(cfg_.mtu_bytes));
        backlog += cfg_.mtu_bytes;
    }
}

void Simulation::on_arrival(const ArrivalEv& ev) {
    auto& b = bearers_[ev.bearer];
    const auto& t = *b.traffic;

    auto& ue = ues_[b.ue];
    if (ue.state == RrcState::IDLE && !ue.attach_pending &&
        cfg_.attach_policy == AttachPolicy::ON_DEMAND) {
        try_attach(ue, true);
    }

    if (t.kind == TrafficKind::POISSON_FILES) {
        // One file becomes a burst of MTU-sized SDUs.
        const double size = std::max(1.0, b.rng_traffic.exponential(t.mean_file_bytes));
        auto remaining = static_cast<std::int64_t>(size);
        while (remaining > 0) {
            const auto chunk =
                std::max<std::int64_t>(64, std::min<std::int64_t>(remaining, cfg_.mtu_bytes));
            offer_sdu(b, now_, static_cast<std::size_t>(chunk));
            remaining -= chunk;
        }
    } else {
        offer_sdu(b, now_, static_cast<std::size_t>(t.size_bytes));
    }

    const SimTime stop = t.stop_ms ? std::min(duration_us_, ms_to_us(*t.stop_ms)) : duration_us_;
    const SimTime next = now_ + next_arrival_gap(t, false, b.rng_traffic);
    if (next < stop) push(next, EventKind::TRAFFIC_ARRIVAL, ArrivalEv{b.idx});
}

// ---------------------------------------------------------------------------
// MAC / PHY TTI machinery
// ---------------------------------------------------------------------------

std::vector<MacSubPdu> Simulation::pull_from_channel(ChannelRt& ch, std::int64_t budget) {
    std::vector<MacSubPdu> out;
    while (!ch.txq.empty() && budget > 0) {
        QueuedCopy& copy = ch.txq.front();
        const std::int64_t before = copy_cost_estimate(ch, copy);
        auto& rec = ch.records.at(copy.pdu.seq);

        if (ch.mode == rlc::Mode::TRANSPARENT) {
            const std::int64_t need = before;
            if (need > budget) break;  // no segmentation in transparent mode
            RlcPdu pdu;
            pdu.transparent = true;
            pdu.sn = copy.pdu.sn;
            pdu.offset = 0;
            pdu.last = true;
            pdu.data = copy.pdu.payload;
            pdu.bearer = copy.pdu.bearer;
            pdu.compressed = copy.pdu.compressed;
            pdu.ciphered = copy.pdu.ciphered;
            pdu.seq = copy.pdu.seq;
            pdu.created_at = copy.pdu.created_at;
            rec.emitted += static_cast<std::uint32_t>(pdu.wire_bytes());
            rec.last_emitted = true;
            out.push_back({ch.idx, std::move(pdu)});
            budget -= need;
            ch.txq.pop_front();
            add_pending(ch, -before);
            continue;
        }

        const std::int64_t header = kMacSubheaderBytes + kRlcSegHeaderBytes +
                                    (copy.sent == 0 ? kPdcpHeaderBytes : 0);
        if (budget <= header) break;
        const auto remaining = static_cast<std::int64_t>(copy.pdu.payload.size()) - copy.sent;
        const auto chunk = std::min<std::int64_t>(remaining, budget - header);

        RlcPdu seg;
        seg.transparent = false;
        seg.sn = copy.pdu.sn;
        seg.offset = copy.sent;
        seg.data.assign(copy.pdu.payload.begin() + copy.sent,
                        copy.pdu.payload.begin() + copy.sent + chunk);
        seg.last = (copy.sent + chunk == static_cast<std::int64_t>(copy.pdu.payload.size()));
        seg.bearer = copy.pdu.bearer;
        seg.compressed = copy.pdu.compressed;
        seg.ciphered = copy.pdu.ciphered;
        seg.seq = copy.pdu.seq;
        seg.created_at = copy.pdu.created_at;

        rec.emitted += static_cast<std::uint32_t>(seg.wire_bytes());
        if (seg.last) rec.last_emitted = true;

        budget -= header + chunk;
        copy.sent += static_cast<std::uint32_t>(chunk);
        const std::int64_t after = copy_cost_estimate(ch, copy);
        const bool done = copy.sent == copy.pdu.payload.size();
        out.push_back({ch.idx, std::move(seg)});
        if (done) ch.txq.pop_front();
        add_pending(ch, after - before);
    }
    return out;
}

void Simulation::send_tb(CarrierRt& car, const TransportBlock& tb, int proc_id, bool retransmission) {
    const auto& rat = rats_[car.rat];
    const auto ls = link_state(tb.ue, car);
    const auto se = phy::se_bits_per_ru(rat.se_curve, ls.sinr_db);
    const std::int64_t capacity_bits = static_cast<std::int64_t>(tb.ru_cost) * se;
    const std::int64_t tb_bits = static_cast<std::int64_t>(tb.wire_bytes()) * 8;

    phy::TxOutcome outcome;
    if (retransmission && tb_bits > capacity_bits) {
        // The link degraded since the block was built; the original coding
        // no longer fits and the retransmission is unrecoverable.
        outcome = phy::TxOutcome::LOST;
    } else {
        outcome = phy::transmit(tb_bits, capacity_bits, ls, rat.se_curve, cfg_.phy,
                                rng_phy_[car.idx]);
    }

    FeedbackEv fb;
    fb.carrier = car.idx;
    fb.ue = tb.ue;
    fb.proc_id = proc_id;
    fb.delivered = outcome == phy::TxOutcome::DELIVERED;
    for (const auto& sp : tb.subpdus) {
        fb.segs.push_back({sp.channel, sp.rlc.seq, static_cast<std::uint32_t>(sp.rlc.wire_bytes()),
                           sp.rlc.last});
    }
    push(now_ + rat.tti_us * kHarqFeedbackTtis, EventKind::CONFIRMATION, std::move(fb));

    if (outcome == phy::TxOutcome::DELIVERED) {
        push(now_ + rat.tti_us + car.cfg.path_delay_us, EventKind::CONFIRMATION, DeliveryEv{tb});
    } else {
        car.phy_losses++;
    }
}

void Simulation::on_tick(const TickEv& ev) {
    auto& car = carriers_[ev.carrier];
    const auto& rat = rats_[car.rat];
    car.ttis++;

    const auto access = mac::band_access(car.cfg, now_, rng_mac_[car.idx]);
    if (access == mac::Access::DEFERRED) {
        car.deferred++;
    } else {
        car.granted++;
        auto& sched = scheds_[car.sched];

        for (const auto b_idx : sched.fullbuffer) replenish_full_buffer(bearers_[b_idx]);

        int pool = car.ru_total;

        // Pending retransmissions preempt new data.
        auto& rq = retx_[car.idx];
        while (!rq.empty() && pool > 0) {
            const auto [ue_idx, pid] = rq.front();
            auto& bank = harq_banks_.at((static_cast<std::uint64_t>(car.idx) << 32) | ue_idx);
            auto& proc = bank.process(pid);
            bool any_active = false;
            for (const auto& sp : proc.tb.subpdus) {
                if (channels_[sp.channel].active) any_active = true;
            }
            if (!any_active) {
                // The channels died (handover/release); give the process up.
                for (const auto& sp : proc.tb.subpdus) fail_copy(channels_[sp.channel], sp.rlc.seq);
                proc.state = mac::HarqState::IDLE;
                proc.tx_count = 0;
                proc.tb = {};
                rq.pop_front();
                continue;
            }
            if (proc.tb.ru_cost > pool) break;  // head of line waits for a wider TTI
            pool -= proc.tb.ru_cost;
            car.ru_used += proc.tb.ru_cost;
            rq.pop_front();
            proc.tx_count++;
            car.retx++;
            send_tb(car, proc.tb, pid, true);
        }

        if (pool > 0 && !sched.backlogged.empty()) {
            std::vector<mac::SchedChannel> inputs;
            for (const auto ch_idx : sched.backlogged) {
                const auto& ch = channels_[ch_idx];
                const auto& b = bearers_[ch.bearer];
                const auto se = phy::se_bits_per_ru(rat.se_curve, link_sinr(b.ue, car.idx));
                if (se <= 0) continue;
                if (rat.has_harq) {
                    auto& bank =
                        harq_banks_[(static_cast<std::uint64_t>(car.idx) << 32) | b.ue];
                    if (!bank.acquire()) continue;  // all processes busy for this UE
                }
                inputs.push_back({ch_idx, b.qos.priority, ch.pending_bytes, se});
            }

            const auto allocations = mac::schedule_tti(pool, inputs, sched.cursors);

            // One transport block per UE; group allocations by owner.
            std::map<std::uint32_t, std::vector<mac::Allocation>> by_ue;
            for (const auto& a : allocations) {
                by_ue[bearers_[channels_[a.channel].bearer].ue].push_back(a);
            }
            for (const auto& [ue_idx, allocs] : by_ue) {
                std::vector<MacSubPdu> subpdus;
                int ru_sum = 0;
                for (const auto& a : allocs) {
                    auto pulled = pull_from_channel(channels_[a.channel], a.bytes);
                    for (auto& sp : pulled) subpdus.push_back(std::move(sp));
                    ru_sum += a.ru;
                    if (opt_.trace.mac) {
                        (*opt_.trace.mac)
                            << now_ / rat.tti_us << ',' << cells_[car.cell].cfg.id << ','
                            << car.cfg.id << ',' << channels_[a.channel].name << ',' << a.bytes * 8
                            << '\n';
                    }
                }
                if (subpdus.empty()) continue;
                auto tb = mac::mux(tb_counter_++, car.idx, ue_idx, std::move(subpdus), ru_sum);
                car.ru_used += ru_sum;
                car.tbs++;
                if (rat.has_harq) {
                    auto& bank =
                        harq_banks_[(static_cast<std::uint64_t>(car.idx) << 32) | ue_idx];
                    auto* proc = bank.acquire();
                    proc->tb = std::move(tb);
                    proc->tx_count = 1;
                    proc->state = mac::HarqState::WAITING_FEEDBACK;
                    send_tb(car, proc->tb, proc->process_id);
                } else {
                    send_tb(car, tb, -1);
                }
            }
        }
    }

    const SimTime next = now_ + rat.tti_us;
    if (next < duration_us_) push(next, EventKind::TTI_TICK, TickEv{car.idx});
}

void Simulation::fail_copy(ChannelRt& ch, std::uint64_t seq) {
    const auto it = ch.records.find(seq);
    if (it == ch.records.end() || it->second.terminal) return;
    it->second.terminal = true;
    auto& b = bearers_[ch.bearer];
    b.fates[seq].copies--;
    if (ch.active) {
        b.dispatcher.confirm(it->second.tunnel_index, 0, false, now_, 0.0);
    }
}

void Simulation::ack_segment(const SegRef& ref) {
    auto& ch = channels_[ref.channel];
    const auto it = ch.records.find(ref.seq);
    if (it == ch.records.end()) return;
    auto& rec = it->second;
    rec.acked += ref.wire_bytes;
    if (!ch.active || rec.confirmed) return;
    if (rec.last_emitted && rec.acked >= rec.emitted) {
        rec.confirmed = true;
        auto& b = bearers_[ch.bearer];
        b.pdcp.confirm(ref.seq);
        const double delay_ms = us_to_ms(now_ - rec.created_at);
        b.dispatcher.confirm(rec.tunnel_index, static_cast<std::int64_t>(rec.emitted) * 8, true,
                             now_, delay_ms);
    }
}

void Simulation::on_feedback(const FeedbackEv& ev) {
    if (ev.proc_id >= 0) {
        auto& bank = harq_banks_.at((static_cast<std::uint64_t>(ev.carrier) << 32) | ev.ue);
        auto& proc = bank.process(ev.proc_id);
        const auto result = bank.feedback(proc, ev.delivered);
        switch (result) {
            case mac::HarqResult::DONE:
                for (const auto& ref : ev.segs) ack_segment(ref);
                break;
            case mac::HarqResult::RETRANSMIT:
                retx_[ev.carrier].push_back({ev.ue, ev.proc_id});
                break;
            case mac::HarqResult::DROP:
                carriers_[ev.carrier].harq_drops++;
                for (const auto& ref : ev.segs) fail_copy(channels_[ref.channel], ref.seq);
                break;
        }
        return;
    }

    // No HARQ on this RAT: one shot, report the outcome upward immediately.
    if (ev.delivered) {
        for (const auto& ref : ev.segs) ack_segment(ref);
    } else {
        for (const auto& ref : ev.segs) fail_copy(channels_[ref.channel], ref.seq);
    }
}

void Simulation::on_delivery(const DeliveryEv& ev) {
    const auto parts = mac::demux(ev.tb);
    if (!parts) {
        global_.stale_tb_drops++;
        return;
    }
    for (const auto& sp : *parts) {
        auto& ch = channels_[sp.channel];
        auto& b = bearers_[ch.bearer];
        const auto rec_it = ch.records.find(sp.rlc.seq);
        if (!ch.active) {
            global_.stale_tb_drops++;
            if (rec_it != ch.records.end() && !rec_it->second.terminal) {
                rec_it->second.terminal = true;
                b.fates[sp.rlc.seq].copies--;
            }
            continue;
        }
        auto completed = ch.rx.on_pdu(sp.rlc, now_);
        if (ch.rx.has_partials() && !ch.sweep_scheduled) {
            ch.sweep_scheduled = true;
            push(now_ + kRlcReassemblyTimeoutUs, EventKind::TIMER, RlcSweepEv{ch.idx});
        }
        if (!completed) continue;

        if (rec_it != ch.records.end() && !rec_it->second.terminal) {
            rec_it->second.terminal = true;
            b.fates[sp.rlc.seq].copies--;
            b.tunnel_meta[rec_it->second.tunnel_index].delivered_copies++;
        }
        handle_rx_result(b, b.pdcp.rx(*completed, now_));
    }
}

void Simulation::handle_rx_result(BearerRt& b, pdcp::PdcpEntity::RxResult&& res) {
    for (const auto& sdu : res.delivered) deliver_sdu(b, sdu);
    maybe_schedule_reorder(b);
}

void Simulation::maybe_schedule_reorder(BearerRt& b) {
    const auto deadline = b.pdcp.reorder_deadline();
    if (deadline && b.scheduled_reorder_epoch != b.pdcp.reorder_epoch()) {
        b.scheduled_reorder_epoch = b.pdcp.reorder_epoch();
        push(*deadline, EventKind::TIMER, PdcpReorderEv{b.idx, b.pdcp.reorder_epoch()});
    }
}

void Simulation::deliver_sdu(BearerRt& b, const Sdu& sdu) {
    if (static_cast<std::int64_t>(sdu.seq) <= b.last_delivered_seq) {
        b.in_order_violations++;
        global_.in_order_violations++;
        violation("in-order violation on bearer " + b.id + " seq " + std::to_string(sdu.seq));
        return;
    }
    b.last_delivered_seq = static_cast<std::int64_t>(sdu.seq);

    auto& fate = b.fates[sdu.seq];
    if (fate.delivered) {
        b.in_order_violations++;
        global_.in_order_violations++;
        violation("duplicate delivery on bearer " + b.id + " seq " + std::to_string(sdu.seq));
        return;
    }
    fate.delivered = true;

    const SimTime latency = now_ - sdu.created_at;
    if (latency < 0) {
        violation("negative latency on bearer " + b.id);
        return;
    }
    const double latency_ms = us_to_ms(latency);
    b.latencies_ms.push_back(latency_ms);
    b.delivered++;
    const auto app_bytes = static_cast<std::int64_t>(sdu.payload.size()) -
                           std::min<std::int64_t>(kUpperHeaderBytes, sdu.payload.size());
    b.delivered_app_bytes += app_bytes;
    b.eval_app_bytes += app_bytes;
    if (latency_ms > b.qos.latency_budget_ms) {
        b.deadline_misses++;
        b.late_deliveries++;
        b.eval_misses++;
    }

    if (cfg_.verify_payloads) {
        const Bytes expected = make_payload(b, sdu.seq, sdu.payload.size());
        if (expected != sdu.payload) {
            b.payload_mismatches++;
            global_.payload_mismatches++;
        }
    }
}

// ---------------------------------------------------------------------------
// Timers: discovery, mobility, measurements, QoS, reordering, reassembly
// ---------------------------------------------------------------------------

void Simulation::on_discovery() {
    discovery_pass(true);
    const SimTime next = now_ + kSibPeriodUs;
    if (next < duration_us_) push(next, EventKind::TIMER, DiscoveryEv{});
}

void Simulation::on_mobility() {
    const double dt_s = us_to_s(kMobilityUpdateUs);
    for (auto& ue : ues_) {
        ue.pos.x += ue.vel.x * dt_s;
        ue.pos.y += ue.vel.y * dt_s;
    }
    refresh_links();
    const SimTime next = now_ + kMobilityUpdateUs;
    if (next < duration_us_) push(next, EventKind::TIMER, MobilityEv{});
}

void Simulation::on_measurement() {
    const auto& m = *cfg_.measurement;
    for (auto& ue : ues_) {
        if (ue.state != RrcState::CONNECTED || ue.serving.empty()) continue;
        rrc::MeasurementReport report;
        report.ue = ue.idx;
        report.timestamp = now_;
        for (const auto& car : carriers_) {
            if (!carrier_compatible(ue, car)) continue;
            if (!m.carriers.empty() &&
                std::find(m.carriers.begin(), m.carriers.end(), car.cfg.id) == m.carriers.end()) {
                continue;
            }
            const double sinr = link_sinr(ue.idx, car.idx);
            if (sinr < cfg_.phy.detection_threshold_db) continue;
            report.entries.emplace_back(car.cell, car.idx, sinr);
            radio_map_.update(ue.idx, car.cell, car.idx, sinr, now_);
        }
        if (ue.handover_pending) continue;
        const auto decision =
            ue.a3.feed(report, ue.serving.front(), m.a3_offset_db, ms_to_us(m.time_to_trigger_ms));
        if (decision) {
            ue.handover_pending = true;
            trace_rrc("a3", ue.id, cells_[decision->target_cell].cfg.id, "trigger");
            push(now_ + kSignalingDelayUs, EventKind::CONTROL, HandoverEv{*decision});
        }
    }
    const SimTime next = now_ + ms_to_us(m.period_ms);
    if (next < duration_us_) push(next, EventKind::TIMER, MeasurementEv{});
}

void Simulation::on_pdcp_reorder(const PdcpReorderEv& ev) {
    auto& b = bearers_[ev.bearer];
    handle_rx_result(b, b.pdcp.on_reorder_expiry(now_, ev.epoch));
}

void Simulation::on_rlc_sweep(const RlcSweepEv& ev) {
    auto& ch = channels_[ev.channel];
    ch.sweep_scheduled = false;
    ch.rx.poll_timeouts(now_);
    if (ch.rx.has_partials()) {
        ch.sweep_scheduled = true;
        push(now_ + kRlcReassemblyTimeoutUs, EventKind::TIMER, RlcSweepEv{ch.idx});
    }
}

void Simulation::on_qos_eval() {
    for (auto& b : bearers_) {
        if (!b.established) continue;
        const SimTime window = now_ - b.last_eval;
        if (window <= 0) continue;

        rrm::QosWindow w;
        w.measured_rate_bps = static_cast<double>(b.eval_app_bytes) * 8.0 / us_to_s(window);
        w.offered = b.eval_offered;
        // Miss ratio over the window: late deliveries plus SNs skipped by
        // the reordering timer (those are misses by definition).
        const std::int64_t skipped_delta = b.pdcp.counters().gaps_skipped - b.eval_skipped_seen;
        b.eval_skipped_seen = b.pdcp.counters().gaps_skipped;
        w.deadline_miss_ratio = w.offered > 0
                                    ? static_cast<double>(b.eval_misses + skipped_delta) /
                                          static_cast<double>(w.offered)
                                    : 0.0;

        b.eval_app_bytes = 0;
        b.eval_offered = 0;
        b.eval_misses = 0;
        b.last_eval = now_;

        // Cooldown: skip the window that overlaps a fresh reconfiguration.
        if (b.last_reconfig >= 0 && now_ - b.last_reconfig < kQosEvalPeriodUs) continue;
        if (w.offered == 0) continue;

        std::vector<rrm::TunnelPlan> current;
        for (const auto& t : b.dispatcher.tunnels()) {
            current.push_back({channels_[t.channel].cell, channels_[t.channel].rat});
        }
        const auto& ue = ues_[b.ue];
        if (ue.serving.empty()) continue;

        // Candidate discovery is lazy: only bearers with a shortfall pay it.
        const bool rate_short = b.qos.service_type == ServiceType::XMBB &&
                                b.qos.target_rate_bps > 0.0 &&
                                w.measured_rate_bps < kQosRateFactor * b.qos.target_rate_bps;
        const bool miss_short = b.qos.service_type == ServiceType::URC &&
                                w.deadline_miss_ratio > 1.0 - b.qos.reliability_target;
        if (!rate_short && !miss_short) continue;

        const auto decision = rrm::enforce_qos(b.qos, b.dispatcher.mode(), current, w,
                                               ue.serving.front(), candidates_for(ue));
        if (decision.command) {
            auto cmd = *decision.command;
            cmd.bearer = b.id;
            cmd.apply_at = ((now_ / kUsPerMs) + 1) * kUsPerMs;  // next TTI boundary
            b.last_reconfig = cmd.apply_at;
            push(cmd.apply_at, EventKind::CONTROL, CommandEv{b.idx, cmd});
        } else if (decision.flagged) {
            if (!b.best_effort) {
                global_.qos_flags++;
                trace_rrm("flag", b.id, "no escalation available");
            }
            b.best_effort = true;
        }
    }
    const SimTime next = now_ + kQosEvalPeriodUs;
    if (next < duration_us_) push(next, EventKind::TIMER, QosEvalEv{});
}

void Simulation::on_command(const CommandEv& ev) {
    auto& b = bearers_[ev.bearer];
    if (!b.established) return;

    const std::string from = to_string(b.dispatcher.mode());
    const DispatchMode to_mode = ev.cmd.kind == rrm::CommandKind::ESCALATE_SPLIT
                                     ? DispatchMode::SPLIT
                                     : DispatchMode::DUPLICATE;

    for (const auto& t : ev.cmd.add_tunnels) {
        const std::string name = b.id + "/" + cells_[t.cell].cfg.id + "/" + rats_[t.rat].id;
        const auto ch = map_channel(b, t.cell, t.rat, name);
        b.dispatcher.add_tunnel(ch);
        b.tunnel_meta.push_back({cells_[t.cell].cfg.id, rats_[t.rat].id, name});
    }
    b.dispatcher.set_mode(to_mode);
    drop_group_ref(b);
    form_group_for(b, to_mode == DispatchMode::DUPLICATE ? GroupPurpose::COMP
                                                         : GroupPurpose::AGGREGATION);

    ReconfigEvent rec;
    rec.time_ms = us_to_ms(now_);
    rec.from = from;
    rec.to = to_string(to_mode);
    rec.delivered_app_bytes_at = b.delivered_app_bytes;
    b.reconfigs.push_back(rec);
    b.last_reconfig = now_;
    global_.qos_escalations++;
    trace_rrm("escalate", b.id, from + "->" + rec.to);

    if (b.full_buffer) {
        for (const auto& t : b.dispatcher.tunnels()) {
            scheds_[channels_[t.channel].sched].fullbuffer.insert(b.idx);
        }
    }

    validate_runtime();
}

// ---------------------------------------------------------------------------
// Handover
// ---------------------------------------------------------------------------

void Simulation::on_handover(const HandoverEv& ev) {
    const auto& d = ev.decision;
    auto& ue = ues_[d.ue];
    ue.handover_pending = false;
    if (ue.state != RrcState::CONNECTED || ue.serving.empty() ||
        ue.serving.front() != d.source_cell) {
        return;  // stale decision
    }

    // Every affected tunnel must find its RAT on the target cell.
    const auto& target = cells_[d.target_cell];
    for (const auto b_idx : ue.bearers) {
        const auto& b = bearers_[b_idx];
        if (!b.established) continue;
        for (const auto& t : b.dispatcher.tunnels()) {
            const auto& ch = channels_[t.channel];
            if (ch.cell != d.source_cell) continue;
            if (!target.scheds.count(ch.rat)) {
                global_.handovers_aborted++;
                trace_rrm("ho_abort", ue.id,
                          "target " + target.cfg.id + " lacks rat " + rats_[ch.rat].id);
                return;
            }
        }
    }

    global_.handovers++;
    trace_rrm("handover", ue.id, cells_[d.source_cell].cfg.id + "->" + target.cfg.id);

    for (const auto b_idx : ue.bearers) {
        auto& b = bearers_[b_idx];
        if (!b.established) continue;
        bool touched = false;
        for (std::size_t ti = 0; ti < b.dispatcher.tunnels().size(); ++ti) {
            auto& tunnel = b.dispatcher.tunnels()[ti];
            auto& old_ch = channels_[tunnel.channel];
            if (old_ch.cell != d.source_cell) continue;
            const auto rat = old_ch.rat;
            retire_channel(tunnel.channel);
            const std::string name =
                b.id + "/" + target.cfg.id + "/" + rats_[rat].id + "@" + std::to_string(now_);
            const auto ch = map_channel(b, d.target_cell, rat, name);
            tunnel.channel = ch;
            tunnel.estimate = {};  // new path, fresh estimate
            b.tunnel_meta[ti].cell_id = target.cfg.id;
            b.tunnel_meta[ti].channel_name = name;
            touched = true;
        }
        if (touched) {
            // Unconfirmed PDUs ride again on the new tunnels; the receiver
            // dedups, so delivery stays exactly-once.
            for (const auto& pdu : b.pdcp.handover_flush()) dispatch_pdu(b, pdu);
            if (b.full_buffer) {
                for (const auto& t : b.dispatcher.tunnels()) {
                    scheds_[channels_[t.channel].sched].fullbuffer.insert(b.idx);
                }
            }
        }
    }

    // Serving set swaps atomically at this instant.
    for (auto& s : ue.serving) {
        if (s == d.source_cell) s = d.target_cell;
    }
    ue.a3.reset();
    validate_runtime();
}

// ---------------------------------------------------------------------------
// Runtime invariants / finalize
// ---------------------------------------------------------------------------

void Simulation::validate_runtime() {
    // channel -> scheduler exclusivity over all active channels.
    std::map<std::string, std::uint32_t> seen;
    for (const auto& ch : channels_) {
        if (!ch.active) continue;
        auto [it, inserted] = seen.emplace(ch.name, ch.sched);
        if (!inserted && it->second != ch.sched) {
            throw SimAbort("channel '" + ch.name + "' bound to two schedulers");
        }
        const auto& sched = scheds_[ch.sched];
        if (sched.cell != ch.cell || sched.rat != ch.rat) {
            throw SimAbort("channel '" + ch.name + "' bound to a mismatched scheduler");
        }
    }
    for (const auto& b : bearers_) {
        if (!b.established) continue;
        const auto n = b.dispatcher.tunnels().size();
        if ((b.dispatcher.mode() == DispatchMode::SPLIT ||
             b.dispatcher.mode() == DispatchMode::DUPLICATE) &&
            n < 2) {
            throw SimAbort("bearer '" + b.id + "' runs " +
                           std::string(to_string(b.dispatcher.mode())) + " with " +
                           std::to_string(n) + " tunnel(s)");
        }
    }
}

MetricsReport Simulation::finalize() {
    MetricsReport report;
    report.scenario_hash = scenario_hash_hex(cfg_);
    report.seed = seed_;
    report.duration_ms = us_to_ms(duration_us_);

    for (auto& b : bearers_) {
        BearerMetrics m;
        m.id = b.id;
        m.ue = ues_[b.ue].id;
        m.service = to_string(b.qos.service_type);
        m.dispatch = to_string(b.dispatcher.mode());
        m.offered = b.offered;
        m.delivered = b.delivered;

        std::set<std::uint64_t> held_seqs;
        for (const auto& pdu : b.dispatcher.held()) held_seqs.insert(pdu.seq);

        std::int64_t in_flight = 0;
        for (const auto& [seq, fate] : b.fates) {
            if (fate.delivered) continue;
            if (fate.copies > 0 || held_seqs.count(seq)) in_flight++;
        }
        m.in_flight_end = in_flight;
        m.lost = b.offered - b.delivered - in_flight;

        const auto& pc = b.pdcp.counters();
        m.duplicates_discarded = pc.duplicates_discarded;
        m.gaps_skipped = pc.gaps_skipped;
        m.late_discarded = pc.late_discarded;
        m.reorder_peak_depth = pc.reorder_peak_depth;
        m.overflow_drops = b.dispatcher.counters().overflow_drops;
        m.in_order_violations = b.in_order_violations;
        m.payload_mismatches = b.payload_mismatches;
        m.deadline_misses = b.deadline_misses + m.lost;  // lost SDUs miss by definition
        m.delivered_app_bytes = b.delivered_app_bytes;
        m.delivery_ratio = b.offered > 0
                               ? static_cast<double>(b.delivered) / static_cast<double>(b.offered)
                               : 0.0;
        m.deadline_miss_ratio =
            b.offered > 0 ? static_cast<double>(m.deadline_misses) / static_cast<double>(b.offered)
                          : 0.0;
        m.throughput_bps =
            static_cast<double>(b.delivered_app_bytes) * 8.0 / us_to_s(duration_us_);
        m.latency_p50_ms = percentile_ms(b.latencies_ms, 0.50);
        m.latency_p95_ms = percentile_ms(b.latencies_ms, 0.95);
        m.latency_p99_ms = percentile_ms(b.latencies_ms, 0.99);
        m.best_effort = b.best_effort;

        std::int64_t total_placements = 0;
        for (const auto& t : b.tunnel_meta) total_placements += t.placements;
        for (std::size_t ti = 0; ti < b.tunnel_meta.size(); ++ti) {
            const auto& meta = b.tunnel_meta[ti];
            TunnelMetrics tm;
            tm.cell = meta.cell_id;
            tm.rat = meta.rat_id;
            tm.channel = meta.channel_name;
            tm.placements = meta.placements;
            tm.delivered_copies = meta.delivered_copies;
            tm.share = total_placements > 0 ? static_cast<double>(meta.placements) /
                                                  static_cast<double>(total_placements)
                                            : 0.0;
            tm.ewma_rate_bps = ti < b.dispatcher.tunnels().size()
                                   ? b.dispatcher.tunnels()[ti].estimate.ewma_rate_bps
                                   : 0.0;
            m.tunnels.push_back(std::move(tm));
        }
        m.reconfigs = b.reconfigs;

        report.bearers.push_back(std::move(m));

        global_.offered += b.offered;
        global_.delivered += b.delivered;
        global_.lost += report.bearers.back().lost;
        global_.in_flight_end += in_flight;
    }

    for (const auto& ue : ues_) {
        UeMetrics m;
        m.id = ue.id;
        m.final_state = ue.state == RrcState::CONNECTED ? "CONNECTED" : "IDLE";
        for (const auto c : ue.serving) m.serving_cells.push_back(cells_[c].cfg.id);
        for (const auto b_idx : ue.bearers) {
            m.offered += bearers_[b_idx].offered;
            m.delivered += bearers_[b_idx].delivered;
            m.throughput_bps += static_cast<double>(bearers_[b_idx].delivered_app_bytes) * 8.0 /
                                us_to_s(duration_us_);
        }
        report.ues.push_back(std::move(m));
    }

    for (const auto& car : carriers_) {
        CarrierMetrics m;
        m.cell = cells_[car.cell].cfg.id;
        m.id = car.cfg.id;
        m.ttis = car.ttis;
        m.granted = car.granted;
        m.deferred = car.deferred;
        m.transport_blocks = car.tbs;
        m.retransmissions = car.retx;
        m.harq_drops = car.harq_drops;
        m.phy_losses = car.phy_losses;
        m.grant_rate = car.ttis > 0 ? static_cast<double>(car.granted) /
                                          static_cast<double>(car.ttis)
                                    : 0.0;
        const double ru_offered = static_cast<double>(car.granted) * car.ru_total;
        m.utilization = ru_offered > 0 ? static_cast<double>(car.ru_used) / ru_offered : 0.0;
        report.carriers.push_back(std::move(m));
    }

    // Conservation audit: the incremental copy counters must agree with a
    // full recount of the per-channel records; delivery counters must agree
    // with the fate map.
    bool audit_ok = true;
    std::map<std::uint32_t, std::int64_t> recount;  // bearer -> live copies
    for (const auto& ch : channels_) {
        for (const auto& [seq, rec] : ch.records) {
            if (!rec.terminal) recount[ch.bearer]++;
        }
    }
    for (const auto& b : bearers_) {
        std::int64_t copies = 0;
        std::int64_t delivered = 0;
        for (const auto& [seq, fate] : b.fates) {
            copies += fate.copies;
            if (fate.delivered) delivered++;
        }
        const auto rc = recount.count(b.idx) ? recount.at(b.idx) : 0;
        if (copies != rc || delivered != b.delivered) {
            audit_ok = false;
            abort_diagnostics_.push_back("conservation audit failed for bearer " + b.id);
        }
    }
    global_.audit_ok = audit_ok && abort_diagnostics_.empty();
    report.global = global_;
    if (!audit_ok && !opt_.keep_going) {
        throw SimAbort("conservation audit failed");
    }
    return report;
}

MetricsReport Simulation::run() {
    if (opt_.duration_ms_override) cfg_.duration_ms = *opt_.duration_ms_override;
    duration_us_ = ms_to_us(cfg_.duration_ms);

    const auto validation = validate_scenario(cfg_);
    if (!validation.ok()) {
        std::string msg = "invalid scenario:";
        for (const auto& v : validation.violations) msg += "\n  " + v.path + ": " + v.message;
        throw std::runtime_error(msg);
    }

    rng_topology_ = Rng::stream(seed_, "topology");
    rng_rrc_ = Rng::stream(seed_, "rrc");

    build_topology();
    expand_population();
    build_link_geometry();
    radio_map_.set_report_period(cfg_.measurement ? ms_to_us(cfg_.measurement->period_ms)
                                                  : kSibPeriodUs);

    // Time zero: first broadcast/discovery pass, then pre-connected UEs.
    discovery_pass(false);
    std::uint32_t inst = 0;
    for (const auto& ue_cfg : cfg_.ues) {
        for (int k = 0; k < ue_cfg.count; ++k, ++inst) {
            if (ue_cfg.initial_state == RrcState::CONNECTED) {
                establish_now(ues_[inst], cell_index(ue_cfg.serving_cells.front()));
            }
        }
    }
    if (cfg_.attach_policy == AttachPolicy::ON_DISCOVERY) {
        for (auto& ue : ues_) {
            if (ue.state == RrcState::IDLE && !ue.attach_pending) try_attach(ue, false);
        }
    }

    arm_initial_events();

    while (!queue_.empty()) {
        const auto& top = queue_.top();
        if (top.key.time >= duration_us_) break;
        Event ev = std::move(const_cast<Event&>(queue_.top()));
        queue_.pop();
        now_ = ev.key.time;
        global_.events_processed++;

        std::visit(
            [this](auto&& payload) {
                using T = std::decay_t<decltype(payload)>;
                if constexpr (std::is_same_v<T, TickEv>) on_tick(payload);
                else if constexpr (std::is_same_v<T, ArrivalEv>) on_arrival(payload);
                else if constexpr (std::is_same_v<T, FeedbackEv>) on_feedback(payload);
                else if constexpr (std::is_same_v<T, DeliveryEv>) on_delivery(payload);
                else if constexpr (std::is_same_v<T, DiscoveryEv>) on_discovery();
                else if constexpr (std::is_same_v<T, MobilityEv>) on_mobility();
                else if constexpr (std::is_same_v<T, QosEvalEv>) on_qos_eval();
                else if constexpr (std::is_same_v<T, MeasurementEv>) on_measurement();
                else if constexpr (std::is_same_v<T, PdcpReorderEv>) on_pdcp_reorder(payload);
                else if constexpr (std::is_same_v<T, RlcSweepEv>) on_rlc_sweep(payload);
                else if constexpr (std::is_same_v<T, EstablishEv>) on_establish(payload);
                else if constexpr (std::is_same_v<T, ReleaseEv>) on_release(payload);
                else if constexpr (std::is_same_v<T, HandoverEv>) on_handover(payload);
                else if constexpr (std::is_same_v<T, CommandEv>) on_command(payload);
            },
            ev.payload);
    }
    now_ = duration_us_;

    return finalize();
}

}  // namespace

MetricsReport run(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options) {
    Simulation sim(config, seed, options);
    return sim.run();
}

}  // namespace ranstack::engine
