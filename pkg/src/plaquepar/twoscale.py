"""Serial two-scale driver: macro loop with one micro problem per step.

Each macro step first solves the (warm-started) periodic micro problem
at the current growth state, then advances the foam-cell concentration
with the cycle-averaged growth value: forward Euler for the scalar ODE
model, one IMEX step for the reaction-diffusion model.
"""

from dataclasses import dataclass, field

import numpy as np

from . import growth, microflow
from .errors import ConfigError

__all__ = [
    "DAY",
    "Schedule",
    "TrajectoryRecord",
    "state_functional",
    "channel_width",
    "advance_two_scale",
    "run_serial",
    "run_coarse_step",
    "trajectory_to_csv",
]

DAY = 86400.0  # seconds per day


@dataclass(frozen=True)
class Schedule:
    """Macro/coarse/micro time grids.

    T_end in seconds; the fine step is dt = T_end / N_l (always derived,
    never configured independently).  P coarse intervals cover the
    horizon; when P does not divide N_l the first N_l mod P intervals
    carry one extra fine step, so interval boundaries stay on the fine
    grid and the per-process maximum is ceil(N_l / P).
    """

    T_end: float
    N_l: int
    P: int = 1
    delta_tau: float = 0.02
    period: float = 1.0

    def __post_init__(self):
        if self.T_end <= 0:
            raise ConfigError(f"T_end must be positive, got {self.T_end}")
        if self.N_l < 1:
            raise ConfigError(f"N_l must be at least 1, got {self.N_l}")
        if not 1 <= self.P <= self.N_l:
            raise ConfigError(f"P must satisfy 1 <= P <= N_l={self.N_l}, got {self.P}")
        ns = self.period / self.delta_tau
        if abs(ns - round(ns)) > 1e-9:
            raise ConfigError(
                f"delta_tau={self.delta_tau} must divide the period {self.period}"
            )

    @property
    def dt(self) -> float:
        return self.T_end / self.N_l

    @property
    def dT(self) -> float:
        """Nominal coarse step T_end / P."""
        return self.T_end / self.P

    @property
    def N_s(self) -> int:
        return int(round(self.period / self.delta_tau))

    def interval_steps(self) -> list:
        """Fine steps per coarse interval (first N_l mod P get the extra one)."""
        q, r = divmod(self.N_l, self.P)
        return [q + 1] * r + [q] * (self.P - r)

    def boundaries(self) -> list:
        """Fine-step indices of the interval boundaries, length P + 1."""
        b = [0]
        for n in self.interval_steps():
            b.append(b[-1] + n)
        return b


def state_functional(state) -> float:
    """Scalar observable of a macro state: c_s, or the interface midpoint."""
    if isinstance(state, growth.ScalarState):
        return state.c_s
    return growth.interface_midpoint(state)


def channel_width(state) -> float:
    """Channel width 2h at the domain center."""
    return 2.0 * (1.0 - state_functional(state))


def _macro_step(state, gamma_bar, dt, growth_params):
    if isinstance(state, growth.ScalarState):
        return growth.macro_step_ode(state, gamma_bar, dt)
    return growth.macro_step_pde(state, gamma_bar, dt, growth_params)


def _gamma_scalar(gamma_bar) -> float:
    g = np.asarray(gamma_bar)
    return float(g) if g.ndim == 0 else float(g.mean())


@dataclass
class TrajectoryRecord:
    """Per-macro-step history of a two-scale run.

    Index n holds the state after n fine steps; gammas[n] and cycles[n]
    describe the micro problem that produced step n (undefined at n=0).
    """

    model: str
    t: np.ndarray
    functionals: np.ndarray
    gamma_scalar: np.ndarray
    width: np.ndarray
    cycles: np.ndarray
    states: list
    gammas: list
    means: np.ndarray | None = None
    final_micro: microflow.MicroState = field(default_factory=microflow.MicroState)

    def __len__(self):
        return len(self.t)

    @property
    def endpoint(self) -> float:
        return float(self.functionals[-1])


def _new_record(model, state0, n_steps):
    n = n_steps + 1
    rec = TrajectoryRecord(
        model=model,
        t=np.zeros(n),
        functionals=np.zeros(n),
        gamma_scalar=np.full(n, np.nan),
        width=np.zeros(n),
        cycles=np.zeros(n, dtype=int),
        states=[state0],
        gammas=[None],
        means=np.zeros(n) if model == "pde" else None,
    )
    _fill_record(rec, 0, state0)
    return rec


def _fill_record(rec, n, state, sample=None):
    rec.t[n] = state.t
    rec.functionals[n] = state_functional(state)
    rec.width[n] = channel_width(state)
    if rec.means is not None:
        rec.means[n] = growth.interface_mean(state)
    if sample is not None:
        rec.gamma_scalar[n] = _gamma_scalar(sample.gamma_bar)
        rec.cycles[n] = sample.cycles_used


def advance_two_scale(macro, micro, n_steps: int, dt: float,
                      growth_params: growth.GrowthParams,
                      micro_params: microflow.MicroParams,
                      eps_p: float = 1e-3, max_cycles: int = 10,
                      ledger=None, level: str = "fine", process=None):
    """Advance n_steps of the two-scale loop; the fine/coarse propagator core.

    Returns (macro, micro, steps) where steps is the per-step list of
    (new state, GrowthSample).  Every step solves one micro problem and
    performs one growth-model update (both ledgered).
    """
    steps = []
    for _ in range(n_steps):
        sample, micro = microflow.solve_micro_problem(
            micro, macro, micro_params, growth_params, eps_p, max_cycles,
            ledger=ledger, level=level, process=process,
        )
        macro = _macro_step(macro, sample.gamma_bar, dt, growth_params)
        if ledger is not None:
            ledger.add_rd(level, process=process)
        steps.append((macro, sample))
    return macro, micro, steps


def run_serial(schedule: Schedule, growth_params: growth.GrowthParams,
               micro_params: microflow.MicroParams, macro0, micro0,
               eps_p: float = 1e-3, max_cycles: int = 10,
               ledger=None) -> TrajectoryRecord:
    """Serial reference run over all N_l macro steps.

    The micro state is warm-started across steps from the quasi-periodic
    state of the previous one; the ledger counts exactly N_l micro
    problems.
    """
    model = "ode" if isinstance(macro0, growth.ScalarState) else "pde"
    rec = _new_record(model, macro0, schedule.N_l)
    macro, micro = macro0, micro0
    for n in range(1, schedule.N_l + 1):
        macro, micro, steps = advance_two_scale(
            macro, micro, 1, schedule.dt, growth_params, micro_params,
            eps_p, max_cycles, ledger=ledger, level="fine", process=0,
        )
        state, sample = steps[0]
        rec.states.append(state)
        rec.gammas.append(sample.gamma_bar)
        _fill_record(rec, n, state, sample)
    rec.final_micro = micro
    return rec


def run_coarse_step(macro, micro, dT: float, mode: str,
                    growth_params: growth.GrowthParams,
                    micro_params: microflow.MicroParams,
                    eps_p: float = 1e-3, max_cycles: int = 10, ledger=None):
    """One coarse-propagator step of size dT.

    mode "two_scale" solves one micro problem (ledger: +1 coarse micro);
    mode "heuristic" uses the stationary surrogate instead (+0 micro).
    Returns (new macro state, new micro state, GrowthSample).
    """
    if dT <= 0:
        raise ValueError(f"dT must be positive, got {dT}")
    if mode == "two_scale":
        sample, micro = microflow.solve_micro_problem(
            micro, macro, micro_params, growth_params, eps_p, max_cycles,
            ledger=ledger, level="coarse",
        )
    elif mode == "heuristic":
        sample = microflow.solve_stationary_surrogate(macro, micro_params, growth_params)
        micro = microflow.MicroState(micro_params.mean_inflow)
    else:
        raise ValueError(f"unknown coarse mode {mode!r}")
    macro = _macro_step(macro, sample.gamma_bar, dT, growth_params)
    if ledger is not None:
        ledger.add_rd("coarse")
    return macro, micro, sample


def trajectory_to_csv(rec: TrajectoryRecord, path):
    """Write the trajectory time series as CSV.

    Columns: t_days, c_s (ODE) or c_mid, c_mean (PDE), gamma_bar (mean
    over the interface for the PDE model), width (2h at the center) and
    cycles of the micro problem behind each step.
    """
    def r(v):
        return repr(float(v))

    with open(path, "w", encoding="utf-8") as f:
        if rec.model == "ode":
            f.write("t_days,c_s,gamma_bar,width,cycles\n")
            for n in range(len(rec)):
                f.write(
                    f"{r(rec.t[n] / DAY)},{r(rec.functionals[n])},"
                    f"{r(rec.gamma_scalar[n])},{r(rec.width[n])},{rec.cycles[n]}\n"
                )
        else:
            f.write("t_days,c_mid,c_mean,gamma_bar,width,cycles\n")
            for n in range(len(rec)):
                f.write(
                    f"{r(rec.t[n] / DAY)},{r(rec.functionals[n])},{r(rec.means[n])},"
                    f"{r(rec.gamma_scalar[n])},{r(rec.width[n])},{rec.cycles[n]}\n"
                )
