#include "powsim/strategies.hpp"

namespace powsim {

const char* to_string(BdosPhase phase) {
  switch (phase) {
    case BdosPhase::Idle: return "idle";
    case BdosPhase::HeaderOut: return "header_out";
    case BdosPhase::Racing: return "racing";
  }
  return "unknown";
}

namespace {

[[noreturn]] void illegal(const char* machine, const char* event, const char* phase) {
  throw SimError(Err::IllegalTransition,
                 std::string(machine) + " cannot take " + event + " in phase " + phase);
}

}  // namespace

BdosStep bdos_step(const BdosState& state, BdosEvent event, BlockId block) {
  BdosStep step{state, {}};
  switch (event) {
    case BdosEvent::SelfBlockFound:
      switch (state.phase) {
        case BdosPhase::Idle:
          // Announce the proof, keep the transactions back.
          step.state.phase = BdosPhase::HeaderOut;
          step.state.withheld = block;
          step.state.header_published = true;
          step.actions.push_back({BdosActionKind::PublishHeader, block});
          return step;
        case BdosPhase::HeaderOut:
          // Second find on top of the withheld block: cash the first body in,
          // put the next header out. The attack rolls forward.
          step.actions.push_back({BdosActionKind::PublishBody, *state.withheld});
          step.actions.push_back({BdosActionKind::PublishHeader, block});
          step.state.withheld = block;
          return step;
        case BdosPhase::Racing:
          // Extending the contested tip settles the race in the attacker's favor.
          step.actions.push_back({BdosActionKind::PublishFull, block});
          return step;
      }
      break;
    case BdosEvent::RivalBlockPublished:
      switch (state.phase) {
        case BdosPhase::Idle:
          return step;  // nothing withheld, nothing to do
        case BdosPhase::HeaderOut:
          step.state.phase = BdosPhase::Racing;
          step.actions.push_back({BdosActionKind::PublishBody, *state.withheld});
          return step;
        case BdosPhase::Racing:
          illegal("bdos", "RivalBlockPublished", "racing");
      }
      break;
    case BdosEvent::RaceResolved:
      if (state.phase != BdosPhase::Racing) {
        illegal("bdos", "RaceResolved", to_string(state.phase));
      }
      step.state = BdosState{};
      return step;
    case BdosEvent::DefenseDiscard:
      if (state.phase != BdosPhase::HeaderOut) {
        illegal("bdos", "DefenseDiscard", to_string(state.phase));
      }
      step.state = BdosState{};
      return step;
  }
  illegal("bdos", "unknown", to_string(state.phase));
}

SelfishState reset_selfish(int public_height) {
  SelfishState fresh;
  fresh.base_height = public_height;
  fresh.public_height = public_height;
  return fresh;
}

SelfishStep selfish_step(const SelfishState& state, SelfishEvent event, const SelfishCtx& ctx) {
  SelfishStep step{state, {}};
  switch (event) {
    case SelfishEvent::SelfBlockFound: {
      if (state.racing) {
        // Immediate publication wins the reward of two blocks.
        step.state.branch.push_back(ctx.found_block);
        step.state.published_upto = step.state.branch.size();
        step.actions.push_back({SelfishActionKind::PublishBlocks, {ctx.found_block}});
        return step;
      }
      if (step.state.branch.empty()) step.state.base_height = state.public_height;
      step.state.branch.push_back(ctx.found_block);
      step.actions.push_back({SelfishActionKind::HoldPrivate, {ctx.found_block}});
      return step;
    }
    case SelfishEvent::HonestBlockPublished: {
      if (state.racing) {
        illegal("selfish", "HonestBlockPublished", "racing");
      }
      step.state.public_height = state.public_height + 1;
      if (!state.holds_private()) {
        // Behind or level with the public chain: follow it.
        step.state = reset_selfish(step.state.public_height);
        step.actions.push_back({SelfishActionKind::AdoptPublic, {}});
        return step;
      }
      int lead_now = step.state.private_tip_height() - step.state.public_height;
      std::vector<BlockId> unpublished(state.branch.begin() + static_cast<long>(state.published_upto),
                                       state.branch.end());
      if (lead_now == 0) {
        // The public chain caught up: reveal the branch, race for the slot.
        step.state.racing = true;
        step.state.published_upto = step.state.branch.size();
        step.actions.push_back({SelfishActionKind::PublishBlocks, unpublished});
        return step;
      }
      if (lead_now == 1) {
        // Down to a single-block lead: reveal everything, the longer private
        // branch takes over outright.
        step.actions.push_back({SelfishActionKind::PublishBlocks, unpublished});
        step.state = reset_selfish(step.state.base_height + static_cast<int>(step.state.branch.size()));
        return step;
      }
      // Still two or more ahead: reveal exactly one block to match the
      // public height and keep the rest back.
      step.state.published_upto = state.published_upto + 1;
      step.actions.push_back({SelfishActionKind::PublishBlocks, {unpublished.front()}});
      return step;
    }
    case SelfishEvent::RaceResolved: {
      if (!state.racing) {
        illegal("selfish", "RaceResolved", "idle");
      }
      step.state = reset_selfish(ctx.new_public_height);
      return step;
    }
  }
  illegal("selfish", "unknown", "unknown");
}

int selfish_state_index(const SelfishState& state) {
  if (state.racing) return 2;
  int lead = state.lead();
  if (lead <= 0) return 0;
  if (lead == 1) return 1;
  return 3;
}

MiningDecision rational_decision(const RationalPolicy& policy, const PublicView& view) {
  MiningDecision decision;
  decision.target = view.honest_tip;
  if (view.header_outstanding && policy.stop_when_header_seen) {
    decision.pause = true;
    return decision;
  }
  if (view.honest_race_win_prob < policy.min_win_probability) {
    decision.pause = true;
    return decision;
  }
  return decision;
}

}  // namespace powsim
