#include "sipovl/scenario.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace sipovl {

namespace {

enum ChannelIndex : std::size_t { kUacToP1, kP1ToUac, kP1ToP2, kP2ToP1, kP2ToUas, kUasToP2 };

constexpr std::uint64_t kProbeStart = 0;

}  // namespace

Scenario::Scenario(const ScenarioConfig& cfg) : cfg_(cfg) {
  const SimTime t1 = from_ms(cfg.t1_ms);
  const SimTime duration = from_seconds(cfg.duration_s);

  const EntityId uac = sim_.add_entity("uac", {});
  const EntityId p1 = sim_.add_entity("p1", {});
  const EntityId p2 = sim_.add_entity("p2", {});
  const EntityId uas = sim_.add_entity("uas", {});
  probe_ = sim_.add_entity("probe", [this](const SimEvent& ev) { on_probe(ev); });

  auto add_channel = [&](EntityId from, EntityId to, const HopLink& hop) {
    const std::uint64_t index = channels_.size();
    channels_.push_back(std::make_unique<Channel>(
        Link{from, to, from_ms(hop.delay_ms), hop.loss},
        stream_seed(cfg.seed, RngStream::kLinkLossBase, index)));
  };
  add_channel(uac, p1, cfg.uac_p1);
  add_channel(p1, uac, cfg.uac_p1);
  add_channel(p1, p2, cfg.p1_p2);
  add_channel(p2, p1, cfg.p1_p2);
  add_channel(p2, uas, cfg.p2_uas);
  add_channel(uas, p2, cfg.p2_uas);

  uac_ = std::make_unique<UserAgentClient>(
      sim_, uac, log_,
      ArrivalStream(cfg.offered_rate_cps, duration, cfg.arrival_process,
                    stream_seed(cfg.seed, RngStream::kArrivals)),
      HoldTimeSampler(cfg.hold_time_mean_s, cfg.hold_time_distribution, stream_seed(cfg.seed, RngStream::kHoldTimes)),
      t1);
  uac_->set_channel(channels_[kUacToP1].get());

  ProxyConfig up;
  up.role = ProxyRole::kUpstream;
  up.q_max = static_cast<std::size_t>(cfg.q_max);
  up.service_time = service_time_for_capacity(cfg.upstream_capacity_cps, messages_received_per_call(Node::kP1));
  up.t1 = t1;
  up.forward_delay = from_ms(cfg.dns_delay_ms);
  p1_ = std::make_unique<ProxyModel>(sim_, p1, up, log_);
  p1_->set_channels(channels_[kP1ToUac].get(), channels_[kP1ToP2].get());
  if (cfg.control_enabled) {
    WindowControllerParams params;
    params.z_th_ms = cfg.z_th_ms;
    params.alpha = cfg.alpha;
    params.history_size = static_cast<std::size_t>(cfg.history_k);
    params.initial_window = cfg.initial_window;
    params.initial_win_th = cfg.initial_win_th;
    params.predicate = cfg.comparator;
    p1_->attach_controller(WindowController(params));
  }

  ProxyConfig down;
  down.role = ProxyRole::kDownstream;
  down.q_max = static_cast<std::size_t>(cfg.q_max);
  down.service_time = service_time_for_capacity(cfg.downstream_capacity_cps, messages_received_per_call(Node::kP2));
  down.t1 = t1;
  p2_ = std::make_unique<ProxyModel>(sim_, p2, down, log_);
  p2_->set_channels(channels_[kP2ToP1].get(), channels_[kP2ToUas].get());
  if (cfg.cpu_sensor_enabled) p2_->attach_sensor(CpuSensor(from_ms(cfg.cpu_window_ms), cfg.cpu_threshold));

  uas_ = std::make_unique<UserAgentServer>(sim_, uas, log_, from_ms(cfg.answer_delay_ms));
  uas_->set_channel(channels_[kUasToP2].get());

  sim_.set_handler(uac, [this](const SimEvent& ev) { uac_->on_event(ev); });
  sim_.set_handler(p1, [this](const SimEvent& ev) { p1_->on_event(ev); });
  sim_.set_handler(p2, [this](const SimEvent& ev) { p2_->on_event(ev); });
  sim_.set_handler(uas, [this](const SimEvent& ev) { uas_->on_event(ev); });
}

void Scenario::on_probe(const SimEvent& ev) {
  const SimTime now = sim_.now();
  log_.record(now, MetricKind::kBusyProbe, 0, p2_->cpu_busy_accum().count());
  log_.record(now, MetricKind::kUpstreamBusyProbe, 0, p1_->cpu_busy_accum().count());
  if (const auto* t = std::get_if<TimerFire>(&ev.payload); t && t->key == kProbeStart) {
    p2_->reset_high_water();
  } else {
    log_.record(now, MetricKind::kQueueHighWater, 0, static_cast<std::int64_t>(p2_->queue_high_water()));
  }
}

RunResult Scenario::run() {
  if (ran_) throw SimulationError("scenario already ran");
  ran_ = true;
  const SimTime warmup = from_seconds(cfg_.warmup_s);
  const SimTime window = from_seconds(cfg_.window_s);
  sim_.schedule(warmup, probe_, TimerFire{kProbeStart});
  sim_.schedule(warmup + window, probe_, SimEnd{});
  uac_->start();
  sim_.run_until(from_seconds(cfg_.duration_s));

  RunResult r;
  r.report = compute_report(log_, warmup, window,
                            ReportContext{cfg_.offered_rate_cps, static_cast<std::size_t>(cfg_.q_max)});
  r.tally = uac_->tally();
  r.upstream = p1_->stats();
  r.downstream = p2_->stats();
  r.trace_digest = sim_.trace_digest();
  r.events_dispatched = sim_.dispatched();
  r.downstream_service_time = p2_->config().service_time;
  r.upstream_service_time = p1_->config().service_time;
  r.acks_at_uas = uas_->acks_received();
  r.controller = p1_->controller();
  r.log = std::move(log_);
  return r;
}

std::unique_ptr<Scenario> build_scenario(const ScenarioConfig& cfg) {
  if (auto violations = validate(cfg); !violations.empty()) throw ConfigValidationError(std::move(violations));
  return std::make_unique<Scenario>(cfg);
}

RunResult run_scenario(const ScenarioConfig& cfg) { return build_scenario(cfg)->run(); }

std::vector<MetricsReport> run_sweep(const ScenarioConfig& base, std::span<const double> rates,
                                     unsigned max_threads) {
  std::vector<ScenarioConfig> configs;
  configs.reserve(rates.size());
  for (double rate : rates) {
    configs.push_back(config_for_rate(base, rate));
    if (auto violations = validate(configs.back()); !violations.empty()) {
      throw ConfigValidationError(std::move(violations));
    }
  }
  std::vector<MetricsReport> rows(configs.size());
  if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());
  // Points are independent; process them in batches, filling rows by index.
  for (std::size_t start = 0; start < configs.size(); start += max_threads) {
    const std::size_t end = std::min(configs.size(), start + max_threads);
    std::vector<std::future<MetricsReport>> batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&cfg = configs[i]] { return run_scenario(cfg).report; }));
    }
    for (std::size_t i = start; i < end; ++i) rows[i] = batch[i - start].get();
  }
  return rows;
}

}  // namespace sipovl
