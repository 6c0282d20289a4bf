"""Parareal engine on the macro scale with three coarse-propagator variants.

Modes:

* "standard": the coarse propagator is one two-scale step of size dT per
  interval; the predictor-corrector update is
  c^{k+1}(T_{p+1}) = C(c^{k+1}(T_p)) + F(c^k(T_p)) - C(c^k(T_p)),
  with the last term cached from the previous iteration.
* "heuristic": same update, but C uses the stationary (heuristically
  averaged) surrogate and costs no micro problems.
* "reusage": the fine sweeps store their cycle-averaged growth values at
  every fine step; the coarse propagation then re-runs the growth model
  over the whole fine grid from those stored values (no corrector terms
  and no coarse micro problems after initialization).

Fine sweeps of one iteration are independent and run on a thread pool;
results are merged in interval order and the ledger increments commute,
so reports are identical for any worker count.  Warm starts follow the
written algorithms: standard/heuristic sweeps reuse the interval's
initialization micro state on the same process each iteration, while
re-usage passes the micro state of the neighboring interval's last fine
step across processes.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import growth, microflow
from .costs import CostLedger, CostModelParams, estimate_parallel_runtime
from .errors import ConfigError, PararealNonConvergenceError
from .twoscale import (Schedule, TrajectoryRecord, _fill_record, _new_record,
                       advance_two_scale, run_coarse_step, run_serial,
                       state_functional)

__all__ = ["PararealEngine", "PararealReport", "run"]

_MODES = ("standard", "heuristic", "reusage")


def _combine(c_coarse, f_fine, c_prev):
    """Predictor-corrector state update C_new + F - C_old."""
    if isinstance(c_coarse, growth.ScalarState):
        return growth.ScalarState(
            c_coarse.c_s + f_fine.c_s - c_prev.c_s, c_coarse.t
        )
    return growth.FieldState(
        c_coarse.grid, c_coarse.c + f_fine.c - c_prev.c, c_coarse.t
    )


@dataclass
class _SweepResult:
    end_state: object
    end_micro: microflow.MicroState
    steps: list  # [(state, sample)] per fine step
    gammas: list  # stored growth values, one per fine step


class PararealEngine:
    """Coordinator/worker implementation of the parareal iteration.

    Holds the interval-boundary iterate values, the cached coarse
    results, warm-start micro states and (for re-usage) the stored
    growth values.  ``initialize`` runs the coarse sweep of step (I);
    each ``iterate`` performs one full parareal iteration.
    """

    def __init__(self, schedule: Schedule, growth_params: growth.GrowthParams,
                 micro_params: microflow.MicroParams, macro0, micro0, *,
                 mode: str = "standard", eps_p: float = 1e-3,
                 max_cycles: int = 10, threads: int | None = None,
                 ledger: CostLedger | None = None):
        if mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {mode!r}")
        if schedule.P < 2:
            raise ConfigError("the parareal engine needs P >= 2; use run_serial for P=1")
        self.sched = schedule
        self.gp = growth_params
        self.mp = micro_params
        self.macro0 = macro0
        self.micro0 = micro0
        self.mode = mode
        self.eps_p = eps_p
        self.max_cycles = max_cycles
        self.threads = max(1, min(threads or os.cpu_count() or 1, schedule.P))
        self.ledger = ledger if ledger is not None else CostLedger(schedule.P)
        self.model = "ode" if isinstance(macro0, growth.ScalarState) else "pde"

        self._steps = schedule.interval_steps()
        self._bounds = schedule.boundaries()
        self._coarse_kind = "heuristic" if mode == "heuristic" else "two_scale"

        self.k = 0
        self.c_bar = None          # iterate values at T_0..T_P
        self.w_init = None         # micro states of the initialization sweep
        self.c_coarse_prev = None  # cached C(c^{(k)}(T_p)) at index p+1
        self.fine_end_w = None     # per-interval final micro states (re-usage)
        self.last_results = None   # fine sweeps of the latest iteration
        self.fine_endpoints = []   # stopping functional, fine variant
        self.coarse_endpoints = []  # stopping functional, coarse variant

    # -- step (I) ----------------------------------------------------------

    def initialize(self):
        """Coarse sweep filling c^{(0)}(T_p) and the warm-start states."""
        c, w = self.macro0, self.micro0
        self.c_bar = [c]
        self.w_init = [w]
        self.c_coarse_prev = [None]
        for p in range(self.sched.P):
            c, w, _ = run_coarse_step(
                c, w, self._steps[p] * self.sched.dt, self._coarse_kind,
                self.gp, self.mp, self.eps_p, self.max_cycles, self.ledger,
            )
            self.c_bar.append(c)
            self.w_init.append(w)
            self.c_coarse_prev.append(c)
        endpoint = state_functional(self.c_bar[-1])
        self.fine_endpoints = [endpoint]
        self.coarse_endpoints = [endpoint]
        self.k = 0
        return self

    # -- fine sweeps (II.a) -------------------------------------------------

    def _sweep(self, p, start_state, warm_micro) -> _SweepResult:
        macro, micro, steps = advance_two_scale(
            start_state, warm_micro, self._steps[p], self.sched.dt,
            self.gp, self.mp, self.eps_p, self.max_cycles,
            ledger=self.ledger, level="fine", process=p,
        )
        return _SweepResult(macro, micro, steps, [s.gamma_bar for _, s in steps])

    def _run_fine(self, starts, warms):
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            futures = [
                pool.submit(self._sweep, p, starts[p], warms[p])
                for p in range(self.sched.P)
            ]
            return [f.result() for f in futures]

    def _restart(self, p):
        """Interval start state at T_p with the boundary time stamped on it."""
        state = self.c_bar[p]
        t = self._bounds[p] * self.sched.dt
        if isinstance(state, growth.ScalarState):
            return growth.ScalarState(state.c_s, t)
        return growth.FieldState(state.grid, state.c, t)

    # -- one parareal iteration (II) ----------------------------------------

    def iterate(self):
        if self.c_bar is None:
            raise RuntimeError("call initialize() before iterate()")
        if self.mode == "reusage":
            return self.iterate_reusage()
        return self.iterate_standard()

    def iterate_standard(self):
        """Fine sweeps from the current iterate, then the corrected coarse sweep."""
        P = self.sched.P
        starts = [self._restart(p) for p in range(P)]
        results = self._run_fine(starts, self.w_init[:P])
        self.ledger.add_message(P)  # fine endpoints to the master

        new_c = [self.macro0]
        w = self.micro0  # master's own warm-start chain for the coarse sweep
        for p in range(P):
            c_coarse, w, _ = run_coarse_step(
                new_c[p], w, self._steps[p] * self.sched.dt, self._coarse_kind,
                self.gp, self.mp, self.eps_p, self.max_cycles, self.ledger,
            )
            new_c.append(_combine(c_coarse, results[p].end_state,
                                  self.c_coarse_prev[p + 1]))
            self.c_coarse_prev[p + 1] = c_coarse
        self.ledger.add_message(P)  # broadcast updated interval starts

        self.c_bar = new_c
        self.last_results = results
        self.k += 1
        self.fine_endpoints.append(state_functional(results[-1].end_state))
        self.coarse_endpoints.append(state_functional(new_c[-1]))
        return self

    def iterate_reusage(self):
        """Fine sweeps storing growth values, then coarse re-propagation on the fine grid."""
        P = self.sched.P
        starts = [self._restart(p) for p in range(P)]
        if self.fine_end_w is None:
            warms = self.w_init[:P]  # initialization states live at T_p already
        else:
            warms = [self.micro0] + self.fine_end_w[: P - 1]
        results = self._run_fine(starts, warms)
        self.fine_end_w = [r.end_micro for r in results]
        self.ledger.add_message(P)  # stored growth values to the master
        self.ledger.add_message(P)  # micro states to the neighboring process

        stored = [g for r in results for g in r.gammas]
        assert len(stored) == self.sched.N_l
        c = self.macro0
        new_c = [c]
        for p in range(P):
            for j in range(self._bounds[p], self._bounds[p + 1]):
                if isinstance(c, growth.ScalarState):
                    c = growth.macro_step_ode(c, stored[j], self.sched.dt)
                else:
                    c = growth.macro_step_pde(c, stored[j], self.sched.dt, self.gp)
                self.ledger.add_rd("coarse")
            new_c.append(c)
        self.ledger.add_message(P)  # broadcast updated interval starts

        self.c_bar = new_c
        self.last_results = results
        self.k += 1
        self.fine_endpoints.append(state_functional(results[-1].end_state))
        self.coarse_endpoints.append(state_functional(new_c[-1]))
        return self

    # -- assembled output ----------------------------------------------------

    def endpoint_values(self, stopping: str):
        if stopping == "fine":
            return self.fine_endpoints
        if stopping == "coarse":
            return self.coarse_endpoints
        raise ConfigError(f"stopping must be 'fine' or 'coarse', got {stopping!r}")

    def trajectory(self) -> TrajectoryRecord:
        """Concatenated fine trajectory of the latest iteration."""
        if self.last_results is None:
            raise RuntimeError("no fine sweeps have been run yet")
        rec = _new_record(self.model, self.macro0, self.sched.N_l)
        n = 0
        for res in self.last_results:
            for state, sample in res.steps:
                n += 1
                rec.states.append(state)
                rec.gammas.append(sample.gamma_bar)
                _fill_record(rec, n, state, sample)
        rec.final_micro = self.last_results[-1].end_micro
        return rec


@dataclass
class PararealReport:
    """Outcome of a parareal run, serializable for report.json."""

    mode: str
    P: int
    N_l: int
    k_par: int
    converged: bool
    stopping: str
    eps_par: float
    per_iteration: list
    ledger: CostLedger
    endpoint: float
    reference_endpoint: float
    speedup: float
    efficiency: float
    estimated_runtime: float
    trajectory: TrajectoryRecord | None = None
    reference: TrajectoryRecord | None = None

    def to_dict(self) -> dict:
        led = self.ledger
        return {
            "mode": self.mode,
            "P": self.P,
            "N_l": self.N_l,
            "k_par": self.k_par,
            "converged": self.converged,
            "stopping": self.stopping,
            "eps_par": self.eps_par,
            "per_iteration_errors": self.per_iteration,
            "micro_problems_fine": led.micro_fine,
            "micro_problems_coarse": led.micro_coarse,
            "micro_problems_serial_equivalent": led.micro_serial_equivalent,
            "rd_solves_fine": led.rd_fine,
            "rd_solves_coarse": led.rd_coarse,
            "per_process_micro": list(led.per_process_micro),
            "messages": led.messages,
            "speedup": self.speedup,
            "efficiency": self.efficiency,
            "estimated_runtime": self.estimated_runtime,
            "endpoint": self.endpoint,
            "reference_endpoint": self.reference_endpoint,
        }


def _serial_report(schedule, gp, mp, macro0, micro0, eps_p, max_cycles,
                   stopping, eps_par, cost_params, mode):
    ledger = CostLedger(1)
    traj = run_serial(schedule, gp, mp, macro0, micro0, eps_p, max_cycles, ledger)
    return PararealReport(
        mode=mode, P=1, N_l=schedule.N_l, k_par=0, converged=True,
        stopping=stopping, eps_par=eps_par, per_iteration=[], ledger=ledger,
        endpoint=traj.endpoint, reference_endpoint=traj.endpoint,
        speedup=1.0, efficiency=1.0,
        estimated_runtime=estimate_parallel_runtime(ledger, cost_params),
        trajectory=traj, reference=traj,
    )


def run(schedule: Schedule, growth_params: growth.GrowthParams,
        micro_params: microflow.MicroParams, macro0, micro0, *,
        mode: str = "standard", stopping: str = "fine", eps_par: float = 1e-3,
        eps_p: float = 1e-3, max_cycles: int = 10, max_iters: int = 20,
        threads: int | None = None, cost_params: CostModelParams | None = None,
        reference: TrajectoryRecord | None = None) -> PararealReport:
    """Run the parareal algorithm until |s_k - s_{k-1}| <= eps_par.

    The stopping functional s_k is the fine endpoint value (stopping
    "fine") or the coarse iterate endpoint ("coarse"); s_0 comes from
    the initialization sweep.  Per-iteration errors are reported against
    a serial reference trajectory (computed here unless supplied).
    P=1 degrades to the serial two-scale run.

    Raises PararealNonConvergenceError (with the partial report
    attached) when max_iters is exhausted.
    """
    if stopping not in ("fine", "coarse"):
        raise ConfigError(f"stopping must be 'fine' or 'coarse', got {stopping!r}")
    if eps_par <= 0:
        raise ConfigError(f"eps_par must be positive, got {eps_par}")
    cost_params = cost_params or CostModelParams()
    if schedule.P == 1:
        return _serial_report(schedule, growth_params, micro_params, macro0,
                              micro0, eps_p, max_cycles, stopping, eps_par,
                              cost_params, mode)

    if reference is None:
        reference = run_serial(schedule, growth_params, micro_params,
                               macro0, micro0, eps_p, max_cycles, ledger=None)
    ref_end = reference.endpoint

    engine = PararealEngine(
        schedule, growth_params, micro_params, macro0, micro0, mode=mode,
        eps_p=eps_p, max_cycles=max_cycles, threads=threads,
    ).initialize()

    per_iteration = []
    converged = False
    while engine.k < max_iters:
        engine.iterate()
        values = engine.endpoint_values(stopping)
        delta = abs(values[-1] - values[-2])
        per_iteration.append({
            "k": engine.k,
            "fine_error": abs(engine.fine_endpoints[-1] - ref_end),
            "coarse_error": abs(engine.coarse_endpoints[-1] - ref_end),
            "stopping_delta": delta,
        })
        if delta <= eps_par:
            converged = True
            break

    led = engine.ledger
    count = led.micro_serial_equivalent
    speedup = schedule.N_l / count
    report = PararealReport(
        mode=mode, P=schedule.P, N_l=schedule.N_l, k_par=engine.k,
        converged=converged, stopping=stopping, eps_par=eps_par,
        per_iteration=per_iteration, ledger=led,
        endpoint=engine.endpoint_values(stopping)[-1],
        reference_endpoint=ref_end, speedup=speedup,
        efficiency=speedup / schedule.P,
        estimated_runtime=estimate_parallel_runtime(led, cost_params),
        trajectory=engine.trajectory(), reference=reference,
    )
    if not converged:
        raise PararealNonConvergenceError(
            f"parareal ({mode}) did not converge within {max_iters} iterations",
            report=report,
        )
    return report
