#include "powsim/engine.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <set>

#include "powsim/defense.hpp"
#include "powsim/strategies.hpp"

namespace powsim {

const char* to_string(TraceEventKind kind) {
  switch (kind) {
    case TraceEventKind::Found: return "found";
    case TraceEventKind::HeaderPublished: return "header_published";
    case TraceEventKind::Published: return "published";
    case TraceEventKind::BodyPublished: return "body_published";
    case TraceEventKind::Accepted: return "accepted";
    case TraceEventKind::RejectedStale: return "rejected_stale";
    case TraceEventKind::RaceStarted: return "race_started";
    case TraceEventKind::RaceResolved: return "race_resolved";
    case TraceEventKind::WindowOpened: return "window_opened";
    case TraceEventKind::WindowExpired: return "window_expired";
    case TraceEventKind::DummyAppended: return "dummy_appended";
    case TraceEventKind::HeaderDiscarded: return "header_discarded";
    case TraceEventKind::PrivateBranchDiscarded: return "private_branch_discarded";
    case TraceEventKind::MinerPaused: return "miner_paused";
    case TraceEventKind::MinerResumed: return "miner_resumed";
    case TraceEventKind::TipChanged: return "tip_changed";
  }
  return "unknown";
}

const char* to_string(WindowOutcome outcome) {
  switch (outcome) {
    case WindowOutcome::HonestBlock: return "honest_block";
    case WindowOutcome::AttackerBlock: return "attacker_block";
    case WindowOutcome::Expired: return "expired";
    case WindowOutcome::RunEnd: return "run_end";
  }
  return "unknown";
}

RacePartition make_race_partition(double attacker_power, double honest_power, double rushing) {
  if (attacker_power < 0.0 || attacker_power > 1.0 || honest_power < 0.0 || honest_power > 1.0) {
    throw SimError(Err::InvalidPowers, "race powers must lie in [0, 1]");
  }
  if (rushing < 0.0 || rushing > 1.0) {
    throw SimError(Err::InvalidPowers, "rushing fraction must lie in [0, 1]");
  }
  return RacePartition{attacker_power + rushing * honest_power, (1.0 - rushing) * honest_power};
}

RacePartition resolve_race(const std::vector<BlockId>& tips,
                           double attacker_power,
                           double honest_power,
                           double rushing) {
  if (tips.size() != 2) {
    throw SimError(Err::MoreThanTwoTips,
                   "a race needs exactly 2 tips, got " + std::to_string(tips.size()));
  }
  return make_race_partition(attacker_power, honest_power, rushing);
}

namespace {

enum class EvKind { Found, Arrival, WindowDeadline };

struct Ev {
  double t = 0.0;
  std::uint64_t seq = 0;
  EvKind kind = EvKind::Found;
  int miner = -1;
  std::uint64_t token = 0;
  BlockId block = kNoBlock;
  bool body = false;
  std::uint64_t wid = 0;
};

struct EvLater {
  bool operator()(const Ev& a, const Ev& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

struct BlockMeta {
  bool accepted = false;
  bool rejected = false;
  bool discarded = false;  // header or private block killed by the defense
  bool eligible = false;   // full/dummy with fully accepted full/dummy ancestry
  std::uint64_t acceptance_index = 0;
};

struct MinerRt {
  MinerSpec spec;
  bool paused = false;
  bool retired = false;
  std::uint64_t token = 0;
  BlockId target = 0;
  BlockId self_tip = kNoBlock;  // own published chain awaiting acceptance
};

class Engine {
 public:
  explicit Engine(const Scenario& scenario) : scn_(scenario), rng_(scenario.seed) {
    scn_.validate();
  }

  SimTrace run();

 private:
  Scenario scn_;
  Rng rng_;
  SimTrace trace_;

  std::priority_queue<Ev, std::vector<Ev>, EvLater> queue_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  std::uint64_t processed_ = 0;

  std::vector<BlockMeta> meta_;
  BlockId next_block_id_ = 1;

  std::vector<MinerRt> miners_;
  std::optional<std::size_t> attacker_;
  bool attacker_is_bdos_ = false;
  BdosState bdos_;
  SelfishState selfish_;
  bool pool_publishes_immediately_ = false;

  BlockId best_tip_ = 0;
  int best_height_ = 0;
  std::uint64_t full_on_main_ = 0;
  std::uint64_t acceptance_counter_ = 0;

  bool race_active_ = false;
  BlockId race_attack_tip_ = kNoBlock;
  BlockId race_honest_tip_ = kNoBlock;

  bool defense_on_ = false;
  double window_len_ = 0.0;
  WindowState ws_;
  WindowRecord cur_win_;
  bool win_open_ = false;
  std::vector<BlockId> outstanding_headers_;

  double last_effort_t_ = 0.0;
  double active_honest_power_ = 0.0;
  double active_attacker_power_ = 0.0;

  bool stopped_ = false;

  // --- small helpers -------------------------------------------------------

  BlockMeta& meta(BlockId id) {
    if (id >= meta_.size()) meta_.resize(id + 1);
    return meta_[id];
  }

  bool is_attacker(int miner_index) const {
    return attacker_ && static_cast<int>(*attacker_) == miner_index;
  }

  MinerId attacker_miner_id() const {
    return attacker_ ? miners_[*attacker_].spec.id : MinerId::system();
  }

  MinerStats& stats_for(int miner_index) {
    return trace_.miners[static_cast<std::size_t>(miner_index)];
  }

  void log(TraceEventKind kind, int miner = MinerId::kSystem, BlockId block = kNoBlock,
           BlockId aux = kNoBlock) {
    trace_.events.push_back(TraceEvent{now_, trace_.events.size(), kind, miner, block, aux});
  }

  void schedule_found(std::size_t mi) {
    MinerRt& m = miners_[mi];
    if (m.spec.power <= 0.0 || m.paused || m.retired) return;
    double dt = sample_interblock(m.spec.power, scn_.mean_block_interval, rng_);
    queue_.push(Ev{now_ + dt, next_seq_++, EvKind::Found, static_cast<int>(mi), m.token});
  }

  void restart_miner(std::size_t mi, BlockId target) {
    MinerRt& m = miners_[mi];
    m.target = target;
    m.token++;
    schedule_found(mi);
  }

  void schedule_arrival(BlockId block, bool body) {
    queue_.push(Ev{now_ + scn_.propagation_delay, next_seq_++, EvKind::Arrival, -1, 0, block, body});
  }

  // --- effort accounting (defense loss estimators) ---------------------------

  void set_power_active(const MinerSpec& spec, bool active) {
    double sign = active ? 1.0 : -1.0;
    if (attacker_ && spec.id == miners_[*attacker_].spec.id) {
      active_attacker_power_ += sign * spec.power;
    } else {
      active_honest_power_ += sign * spec.power;
    }
  }

  void advance_effort(double t) {
    double dt = t - last_effort_t_;
    if (dt > 0.0 && defense_on_ && win_open_) {
      cur_win_.honest_effort += active_honest_power_ * dt;
      cur_win_.attacker_effort += active_attacker_power_ * dt;
      cur_win_.total_effort += (active_honest_power_ + active_attacker_power_) * dt;
    }
    last_effort_t_ = t;
  }

  void open_window() {
    cur_win_ = WindowRecord{};
    cur_win_.id = ws_.window_id;
    cur_win_.opened_at = ws_.opened_at;
    win_open_ = true;
    log(TraceEventKind::WindowOpened, MinerId::kSystem, ws_.anchor_tip);
    queue_.push(Ev{ws_.opened_at + window_len_, next_seq_++, EvKind::WindowDeadline, -1, 0,
                   kNoBlock, false, ws_.window_id});
  }

  void close_window(WindowOutcome outcome) {
    if (!win_open_) return;
    cur_win_.closed_at = now_;
    cur_win_.outcome = outcome;
    trace_.windows.push_back(cur_win_);
    win_open_ = false;
  }

  void reset_window_on_extension(BlockId new_tip, WindowOutcome outcome) {
    if (!defense_on_) return;
    close_window(outcome);
    ws_ = on_main_chain_extended(ws_, new_tip, now_);
    open_window();
  }

  // --- rational miners -------------------------------------------------------

  bool header_outstanding() const { return !outstanding_headers_.empty(); }

  double honest_race_win_prob() const {
    if (!header_outstanding()) return 1.0;
    return (1.0 - scn_.rushing) * scn_.honest_power();
  }

  void update_rational(std::size_t mi) {
    MinerRt& m = miners_[mi];
    if (m.spec.strategy != StrategyKind::Rational || m.retired || m.spec.power <= 0.0) return;
    PublicView view{header_outstanding(), honest_race_win_prob(), best_tip_};
    MiningDecision d = rational_decision(scn_.rational_policy, view);
    if (d.pause && !m.paused) {
      m.paused = true;
      m.token++;
      set_power_active(m.spec, false);
      log(TraceEventKind::MinerPaused, m.spec.id.value);
    } else if (!d.pause && m.paused) {
      m.paused = false;
      set_power_active(m.spec, true);
      log(TraceEventKind::MinerResumed, m.spec.id.value);
      restart_miner(mi, best_tip_);
    }
  }

  void update_all_rationals() {
    for (std::size_t i = 0; i < miners_.size(); ++i) update_rational(i);
    maybe_retire_attacker();
  }

  void maybe_retire_attacker() {
    if (!scn_.attacker_retires_after_halt || !attacker_ || !attacker_is_bdos_) return;
    MinerRt& a = miners_[*attacker_];
    if (a.retired) return;
    for (const MinerRt& m : miners_) {
      if (m.spec.id == a.spec.id || m.spec.power <= 0.0) continue;
      if (!m.paused) return;
    }
    // Every other miner gave up; the incentive is banked and the attack ends.
    a.retired = true;
    a.token++;
    set_power_active(a.spec, false);
    log(TraceEventKind::MinerPaused, a.spec.id.value);
  }

  // --- mining targets --------------------------------------------------------

  BlockId desired_target(const MinerRt& m) const {
    if (is_attacker(m.spec.id.value)) {
      if (attacker_is_bdos_) {
        if (bdos_.phase == BdosPhase::Racing) {
          return race_active_ ? race_attack_tip_ : best_tip_;
        }
        if (bdos_.phase == BdosPhase::HeaderOut) return *bdos_.withheld;
        return best_tip_;
      }
      if (!selfish_.branch.empty() && !pool_publishes_immediately_) return selfish_.branch.back();
      if (m.self_tip != kNoBlock) return m.self_tip;
      return best_tip_;
    }
    if (m.self_tip != kNoBlock) return m.self_tip;
    return best_tip_;
  }

  void redirect_miners() {
    for (std::size_t i = 0; i < miners_.size(); ++i) {
      MinerRt& m = miners_[i];
      if (m.paused || m.retired || m.spec.power <= 0.0) continue;
      if (m.self_tip != kNoBlock) {
        const BlockMeta& sm = meta_[m.self_tip];
        if (sm.rejected || sm.discarded || trace_.tree.at(m.self_tip).height <= best_height_) {
          m.self_tip = kNoBlock;  // pending chain can no longer lead
        }
      }
      BlockId want = desired_target(m);
      if (want != m.target) restart_miner(i, want);
    }
  }

  // --- creation and publication ----------------------------------------------

  BlockId create_block(int miner_index, BlockId parent, BlockKind kind) {
    Block b;
    b.id = next_block_id_++;
    b.parent = parent;
    b.miner = MinerId::of(miner_index);
    b.kind = kind;
    b.tx_count = kind == BlockKind::Full ? 1 : 0;
    b.created_at = now_;
    trace_.tree.append(b);
    meta(b.id);
    return b.id;
  }

  void publish_full(BlockId id) {
    Block& b = trace_.tree.at_mut(id);
    if (!b.published_at) b.published_at = now_;
    log(TraceEventKind::Published, b.miner.value, id);
    schedule_arrival(id, false);
  }

  void publish_header(BlockId id) {
    Block& b = trace_.tree.at_mut(id);
    if (!b.published_at) b.published_at = now_;
    log(TraceEventKind::HeaderPublished, b.miner.value, id);
    schedule_arrival(id, false);
  }

  void publish_body(BlockId id) {
    log(TraceEventKind::BodyPublished, trace_.tree.at(id).miner.value, id);
    schedule_arrival(id, true);
  }

  void apply_bdos_actions(const std::vector<BdosAction>& actions) {
    for (const BdosAction& act : actions) {
      switch (act.kind) {
        case BdosActionKind::PublishHeader: publish_header(act.block); break;
        case BdosActionKind::PublishBody: publish_body(act.block); break;
        case BdosActionKind::PublishFull: publish_full(act.block); break;
      }
    }
  }

  void apply_selfish_actions(const std::vector<SelfishAction>& actions) {
    for (const SelfishAction& act : actions) {
      if (act.kind != SelfishActionKind::PublishBlocks) continue;
      for (BlockId id : act.blocks) publish_full(id);
    }
  }

  void discard_private_branch() {
    for (std::size_t k = selfish_.published_upto; k < selfish_.branch.size(); ++k) {
      BlockId id = selfish_.branch[k];
      meta_[id].discarded = true;
      log(TraceEventKind::PrivateBranchDiscarded, attacker_miner_id().value, id);
    }
    selfish_ = reset_selfish(best_height_);
  }

  // --- fork choice -----------------------------------------------------------

  void recount_main_delta(BlockId from_old, BlockId to_new) {
    const BlockTree& tree = trace_.tree;
    auto counted = [&](BlockId id) {
      const Block& blk = tree.at(id);
      return blk.kind == BlockKind::Full && !blk.is_genesis();
    };
    BlockId a = from_old;
    BlockId b = to_new;
    while (tree.at(a).height > tree.at(b).height) {
      if (counted(a)) --full_on_main_;
      a = tree.at(a).parent;
    }
    while (tree.at(b).height > tree.at(a).height) {
      if (counted(b)) ++full_on_main_;
      b = tree.at(b).parent;
    }
    while (a != b) {
      if (counted(a)) --full_on_main_;
      if (counted(b)) ++full_on_main_;
      a = tree.at(a).parent;
      b = tree.at(b).parent;
    }
  }

  bool attack_machine_racing() const {
    if (!attacker_) return false;
    return attacker_is_bdos_ ? bdos_.phase == BdosPhase::Racing : selfish_.racing;
  }

  void start_race(BlockId attack_tip) {
    if (race_active_) {
      throw SimError(Err::MoreThanTwoTips, "a third tip joined an active race");
    }
    race_attack_tip_ = attack_tip;
    race_honest_tip_ = best_tip_;
    // Validates the two-tip precondition; the split itself is realized by
    // per-find rushing draws.
    resolve_race({race_attack_tip_, race_honest_tip_}, miners_[*attacker_].spec.power,
                 scn_.honest_power(), scn_.rushing);
    race_active_ = true;
    log(TraceEventKind::RaceStarted, attacker_miner_id().value, attack_tip, race_honest_tip_);
    redirect_miners();
  }

  void finish_race(BlockId new_best) {
    bool attacker_won = trace_.tree.is_ancestor(race_attack_tip_, new_best);
    log(TraceEventKind::RaceResolved,
        attacker_won ? attacker_miner_id().value : MinerId::kSystem, new_best, race_attack_tip_);
    if (attacker_is_bdos_) {
      bdos_ = bdos_step(bdos_, BdosEvent::RaceResolved).state;
    } else {
      SelfishCtx ctx;
      ctx.race_won = attacker_won;
      ctx.new_public_height = trace_.tree.at(new_best).height;
      selfish_ = selfish_step(selfish_, SelfishEvent::RaceResolved, ctx).state;
    }
    race_active_ = false;
    race_attack_tip_ = kNoBlock;
    race_honest_tip_ = kNoBlock;
  }

  void notify_strategies_on_extension(const Block& b) {
    if (!attacker_) return;
    const MinerRt& a = miners_[*attacker_];
    if (a.retired) return;
    if (b.kind == BlockKind::Dummy) {
      if (!attacker_is_bdos_) {
        // Whatever was withheld is now below a dummy and can never attach.
        if (selfish_.holds_private()) {
          discard_private_branch();
        } else {
          selfish_ = reset_selfish(best_height_);
        }
      }
      return;
    }
    if (b.miner == a.spec.id) return;

    if (attacker_is_bdos_) {
      if (bdos_.phase == BdosPhase::HeaderOut &&
          b.height == trace_.tree.at(*bdos_.withheld).height) {
        BdosStep step = bdos_step(bdos_, BdosEvent::RivalBlockPublished);
        bdos_ = step.state;
        apply_bdos_actions(step.actions);
      }
      return;
    }
    if (pool_publishes_immediately_) {
      selfish_ = reset_selfish(best_height_);
      return;
    }
    if (!selfish_.racing) {
      SelfishStep step = selfish_step(selfish_, SelfishEvent::HonestBlockPublished);
      selfish_ = step.state;
      apply_selfish_actions(step.actions);
    }
  }

  /// Fork-choice integration of a freshly accepted block. `from_expiry`
  /// marks the dummy whose window bookkeeping the expiry handler already did.
  void integrate_acceptance(BlockId id, bool from_expiry) {
    const Block& b = trace_.tree.at(id);
    BlockMeta& bm = meta_[id];
    bm.eligible = (b.kind == BlockKind::Full || b.kind == BlockKind::Dummy) &&
                  (b.is_genesis() || meta_[b.parent].eligible);
    if (!bm.eligible) return;

    bool advanced = b.height > best_height_;
    bool dummy_tie =
        !advanced && b.height == best_height_ && b.kind == BlockKind::Dummy && id != best_tip_;
    if (!advanced && !dummy_tie) {
      // First-seen keeps the tip on equal height, unless this is the second
      // leg of an attack race forming right now.
      if (b.height == best_height_ && attacker_ && b.miner == attacker_miner_id() &&
          attack_machine_racing()) {
        start_race(id);
      }
      return;
    }

    BlockId old_best = best_tip_;
    if (b.parent == old_best) {
      if (b.kind == BlockKind::Full && !b.is_genesis()) ++full_on_main_;
    } else {
      recount_main_delta(old_best, id);
      log(TraceEventKind::TipChanged, MinerId::kSystem, id, old_best);
    }
    best_tip_ = id;
    best_height_ = b.height;
    trace_.extension_times.push_back(now_);

    if (race_active_) finish_race(id);

    if (!from_expiry && b.kind != BlockKind::Dummy) {
      reset_window_on_extension(id, b.miner == attacker_miner_id()
                                        ? WindowOutcome::AttackerBlock
                                        : WindowOutcome::HonestBlock);
    }

    notify_strategies_on_extension(b);
    redirect_miners();
    if (full_on_main_ >= scn_.horizon_blocks) stopped_ = true;
  }

  // --- event handlers ----------------------------------------------------------

  void record_occupancy_step() {
    if (!attacker_) return;
    int state = attacker_is_bdos_ ? static_cast<int>(bdos_.phase) : selfish_state_index(selfish_);
    trace_.state_steps[static_cast<std::size_t>(state)]++;
    trace_.total_steps++;
  }

  void on_found(const Ev& ev) {
    MinerRt& m = miners_[static_cast<std::size_t>(ev.miner)];
    if (ev.token != m.token || m.paused || m.retired) return;
    record_occupancy_step();

    BlockId parent = m.target;
    if (race_active_ && !is_attacker(ev.miner)) {
      parent = rng_.bernoulli(scn_.rushing) ? race_attack_tip_ : race_honest_tip_;
    }

    bool bdos_withholds =
        is_attacker(ev.miner) && attacker_is_bdos_ && bdos_.phase != BdosPhase::Racing;
    BlockKind kind = bdos_withholds ? BlockKind::HeaderOnly : BlockKind::Full;
    BlockId id = create_block(ev.miner, parent, kind);
    log(TraceEventKind::Found, ev.miner, id, parent);
    stats_for(ev.miner).found++;

    if (is_attacker(ev.miner)) {
      if (attacker_is_bdos_) {
        BdosStep step = bdos_step(bdos_, BdosEvent::SelfBlockFound, id);
        bdos_ = step.state;
        apply_bdos_actions(step.actions);
      } else if (pool_publishes_immediately_) {
        publish_full(id);
        m.self_tip = id;
      } else {
        SelfishCtx ctx;
        ctx.found_block = id;
        SelfishStep step = selfish_step(selfish_, SelfishEvent::SelfBlockFound, ctx);
        selfish_ = step.state;
        apply_selfish_actions(step.actions);
      }
    } else {
      publish_full(id);
      m.self_tip = id;
    }
    restart_miner(static_cast<std::size_t>(ev.miner), id);
  }

  void remove_outstanding_header(BlockId id) {
    auto it = std::find(outstanding_headers_.begin(), outstanding_headers_.end(), id);
    if (it != outstanding_headers_.end()) outstanding_headers_.erase(it);
  }

  void on_arrival(const Ev& ev) {
    BlockId id = ev.block;
    BlockMeta& bm = meta_[id];
    if (bm.discarded || bm.rejected) return;  // chain died while this was in flight
    if (bm.accepted && ev.body) return;

    if (!ev.body && trace_.tree.at(id).kind == BlockKind::HeaderOnly) {
      // Header publication: visible to everyone, height- and timer-neutral.
      // A header whose parent was already superseded by a dummy is dead on
      // arrival; registering it would stall pause-on-header miners for nothing.
      const Block& h = trace_.tree.at(id);
      if (accept_block(trace_.tree, h.parent, h.created_at, ws_, defense_on_, false) ==
          AcceptDecision::RejectStaleParent) {
        bm.discarded = true;
        trace_.headers_discarded++;
        log(TraceEventKind::HeaderDiscarded, h.miner.value, id);
        if (attacker_is_bdos_ && bdos_.phase == BdosPhase::HeaderOut && bdos_.withheld &&
            *bdos_.withheld == id) {
          bdos_ = bdos_step(bdos_, BdosEvent::DefenseDiscard).state;
          redirect_miners();
        }
        return;
      }
      outstanding_headers_.push_back(id);
      update_all_rationals();
      return;
    }
    if (ev.body) {
      Block& blk = trace_.tree.at_mut(id);
      blk.kind = BlockKind::Full;
      blk.tx_count = 1;
      remove_outstanding_header(id);
    }

    const Block& b = trace_.tree.at(id);
    AcceptDecision decision =
        accept_block(trace_.tree, b.parent, b.created_at, ws_, defense_on_, scn_.grace_inflight);
    if (decision == AcceptDecision::RejectStaleParent) {
      bm.rejected = true;
      trace_.stale_rejected++;
      log(TraceEventKind::RejectedStale, b.miner.value, id);
      // A body bounced in flight leaves no race to run; reset the attacker.
      if (attacker_is_bdos_ && bdos_.phase == BdosPhase::Racing && !race_active_ &&
          bdos_.withheld && *bdos_.withheld == id) {
        bdos_ = bdos_step(bdos_, BdosEvent::RaceResolved).state;
      }
      redirect_miners();
      if (ev.body) update_all_rationals();
      return;
    }
    bm.accepted = true;
    bm.acceptance_index = ++acceptance_counter_;
    log(TraceEventKind::Accepted, b.miner.value, id);
    integrate_acceptance(id, false);
    if (ev.body) update_all_rationals();
  }

  void on_window_deadline(const Ev& ev) {
    if (!defense_on_ || ev.wid != ws_.window_id) return;
    close_window(WindowOutcome::Expired);
    log(TraceEventKind::WindowExpired, MinerId::kSystem, ws_.anchor_tip);

    std::vector<BlockId> tips = race_active_
                                    ? std::vector<BlockId>{race_attack_tip_, race_honest_tip_}
                                    : std::vector<BlockId>{best_tip_};
    BlockId dummy_id = next_block_id_++;
    ExpiryOutcome out = on_window_expiry(trace_.tree, ws_, window_len_, now_, tips,
                                         outstanding_headers_, dummy_id);
    BlockMeta& dm = meta(dummy_id);
    dm.accepted = true;
    dm.acceptance_index = ++acceptance_counter_;
    trace_.dummy_blocks++;
    log(TraceEventKind::DummyAppended, MinerId::kSystem, dummy_id, out.dummy.parent);

    for (BlockId header : out.discarded_headers) {
      meta_[header].discarded = true;
      trace_.headers_discarded++;
      remove_outstanding_header(header);
      log(TraceEventKind::HeaderDiscarded, trace_.tree.at(header).miner.value, header);
      if (attacker_is_bdos_ && bdos_.phase == BdosPhase::HeaderOut && bdos_.withheld &&
          *bdos_.withheld == header) {
        bdos_ = bdos_step(bdos_, BdosEvent::DefenseDiscard).state;
      }
    }

    ws_ = out.next;
    open_window();
    integrate_acceptance(dummy_id, true);
    update_all_rationals();
    redirect_miners();
  }

  // --- finalization -------------------------------------------------------------

  void finalize() {
    close_window(WindowOutcome::RunEnd);
    trace_.final_tip = best_tip_;

    std::vector<BlockId> path = trace_.tree.ancestor_path(best_tip_);
    std::set<BlockId> on_main(path.begin(), path.end());
    std::uint64_t full_count = 0;
    for (BlockId id : path) {
      const Block& b = trace_.tree.at(id);
      if (b.is_genesis() || b.kind != BlockKind::Full) continue;
      ++full_count;
      if (!b.miner.is_system()) stats_for(b.miner.value).on_main++;
    }
    trace_.full_blocks_on_main = full_count;

    for (const auto& [id, b] : trace_.tree.blocks()) {
      if (b.is_genesis() || b.miner.is_system()) continue;
      if (on_main.find(id) == on_main.end()) stats_for(b.miner.value).discarded++;
    }
    trace_.processed_events = processed_;
  }
};

SimTrace Engine::run() {
  trace_.scenario = scn_;
  trace_.tree = BlockTree::with_genesis();
  meta(0).accepted = true;
  meta(0).eligible = true;

  attacker_ = scn_.attacker_index();
  if (attacker_) {
    attacker_is_bdos_ = scn_.miners[*attacker_].strategy == StrategyKind::Bdos;
    trace_.chain_states = attacker_is_bdos_ ? 3 : 4;
    pool_publishes_immediately_ =
        !attacker_is_bdos_ && scn_.defense.enabled && !scn_.selfish_stubborn;
  }
  selfish_ = reset_selfish(0);

  miners_.reserve(scn_.miners.size());
  for (const MinerSpec& spec : scn_.miners) {
    MinerRt m;
    m.spec = spec;
    m.target = trace_.tree.genesis();
    miners_.push_back(m);
    trace_.miners.push_back(MinerStats{spec.id, spec.power, spec.strategy, 0, 0, 0});
  }
  for (const MinerRt& m : miners_) {
    if (m.spec.power > 0.0) set_power_active(m.spec, true);
  }

  defense_on_ = scn_.defense.enabled;
  if (defense_on_) {
    window_len_ = scn_.defense_window();
    ws_ = WindowState{0, 0.0, trace_.tree.genesis(), std::nullopt};
    open_window();
  }

  update_all_rationals();
  for (std::size_t i = 0; i < miners_.size(); ++i) {
    if (!miners_[i].paused) restart_miner(i, trace_.tree.genesis());
  }

  const std::uint64_t budget = scn_.event_budget();
  while (!queue_.empty() && !stopped_ && processed_ < budget) {
    Ev ev = queue_.top();
    queue_.pop();
    assert(ev.t + 1e-9 >= now_);
    now_ = ev.t;
    advance_effort(now_);
    ++processed_;
    switch (ev.kind) {
      case EvKind::Found: on_found(ev); break;
      case EvKind::Arrival: on_arrival(ev); break;
      case EvKind::WindowDeadline: on_window_deadline(ev); break;
    }
  }
  finalize();
  return trace_;
}

}  // namespace

SimTrace run(const Scenario& scenario) {
  Engine engine(scenario);
  return engine.run();
}

}  // namespace powsim
