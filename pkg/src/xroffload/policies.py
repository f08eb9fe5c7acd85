"""Non-learning decision policies over the discrete action lattice."""

from __future__ import annotations

from dataclasses import dataclass

from .framemodel import DEFAULT_BETA_GRID, Action, simulate_frame

DEFAULT_ALPHA_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class ActionGrid:
    """All valid (n_ul, n_dl, alpha) actions for a given slot budget.

    Actions are ordered lexicographically by (n_ul, n_dl, alpha_index), so
    index 0 is the smallest allocation and argmax tie-breaks are stable.
    """

    actions: tuple[Action, ...]
    alpha_values: tuple[float, ...]
    slots_per_frame: int

    @classmethod
    def build(cls, slots_per_frame: int,
              alpha_values=DEFAULT_ALPHA_VALUES) -> "ActionGrid":
        alphas = tuple(float(a) for a in alpha_values)
        if not alphas:
            raise ValueError("alpha_values must be non-empty")
        if any(not (0.0 <= a <= 1.0) for a in alphas):
            raise ValueError("alpha values must lie in [0, 1]")
        actions = []
        for n_ul in range(1, slots_per_frame + 1):
            for n_dl in range(0, slots_per_frame - n_ul + 1):
                for ai, alpha in enumerate(alphas):
                    actions.append(Action(n_ul=n_ul, n_dl=n_dl,
                                          alpha_index=ai, alpha=alpha))
        return cls(actions=tuple(actions), alpha_values=alphas,
                   slots_per_frame=slots_per_frame)

    def __len__(self) -> int:
        return len(self.actions)

    def __getitem__(self, index: int) -> Action:
        return self.actions[index]

    def restrict_alpha(self, alpha: float) -> "ActionGrid":
        """Same slot lattice with the offload ratio clamped to one value."""
        clamped = tuple(Action(n_ul=a.n_ul, n_dl=a.n_dl, alpha_index=0,
                               alpha=float(alpha))
                        for a in self.actions if a.alpha_index == 0)
        return ActionGrid(actions=clamped, alpha_values=(float(alpha),),
                          slots_per_frame=self.slots_per_frame)


def always_offload_policy(state, selector, grid: ActionGrid) -> Action:
    """Pick a slot split with the supplied selector, offload ratio pinned to 1."""
    clamped = grid.restrict_alpha(1.0)
    return clamped[selector(state, clamped)]


def never_offload_policy(state, selector, grid: ActionGrid) -> Action:
    """Pick a slot split with the supplied selector, offload ratio pinned to 0."""
    clamped = grid.restrict_alpha(0.0)
    return clamped[selector(state, clamped)]


def greedy_oracle(frame, trace_slice, grid: ActionGrid, cfg, hp, radio, rp,
                  beta_grid=DEFAULT_BETA_GRID) -> tuple[Action, float]:
    """Full-knowledge per-frame argmax over the entire grid.

    Simulates every action against the actual channel slice and returns the
    best (action, reward); ties keep the lexicographically smallest action.
    """
    from .env import reward as reward_fn

    best_action = None
    best_reward = -float("inf")
    for action in grid.actions:
        outcome = simulate_frame(frame, action, trace_slice, cfg, hp, radio,
                                 beta_grid=beta_grid)
        r = reward_fn(outcome, rp)
        if r > best_reward:
            best_reward = r
            best_action = action
    return best_action, best_reward


class OraclePolicy:
    """Per-frame greedy oracle over a fixed grid (full channel knowledge)."""

    def __init__(self, grid: ActionGrid, cfg, hp, radio, rp,
                 beta_grid=DEFAULT_BETA_GRID):
        self.grid = grid
        self.cfg = cfg
        self.hp = hp
        self.radio = radio
        self.rp = rp
        self.beta_grid = beta_grid

    def select(self, frame, trace_slice) -> Action:
        action, _ = greedy_oracle(frame, trace_slice, self.grid, self.cfg,
                                  self.hp, self.radio, self.rp,
                                  beta_grid=self.beta_grid)
        return action
