import numpy as np
import pytest

from plaquepar.costs import CostLedger
from plaquepar.errors import ConfigError
from plaquepar.growth import FieldState, GrowthParams, ScalarState, SolidGrid
from plaquepar.microflow import MicroParams, MicroState
from plaquepar.twoscale import (DAY, Schedule, channel_width, run_coarse_step,
                                run_serial, state_functional, trajectory_to_csv)

GP = GrowthParams()
MP = MicroParams()


def ode_run(t_end_days, n_l, ledger=None, gp=GP):
    sched = Schedule(t_end_days * DAY, n_l, 1, 0.02)
    return run_serial(sched, gp, MP, ScalarState(0.0), MicroState(0.0),
                      1e-3, 10, ledger)


# --- schedule ----------------------------------------------------------------

def test_schedule_grids():
    s = Schedule(300 * DAY, 1000, 30, 0.02)
    assert s.dt == pytest.approx(0.3 * DAY)
    assert s.dT == pytest.approx(10 * DAY)
    assert s.N_s == 50
    steps = s.interval_steps()
    assert sum(steps) == 1000
    assert max(steps) == 34  # ceil(1000/30)
    assert min(steps) in (33, 34)
    b = s.boundaries()
    assert b[0] == 0 and b[-1] == 1000 and len(b) == 31


def test_schedule_divisible_case():
    s = Schedule(300 * DAY, 1000, 10, 0.02)
    assert s.interval_steps() == [100] * 10


def test_schedule_validation():
    with pytest.raises(ConfigError):
        Schedule(-1.0, 10)
    with pytest.raises(ConfigError):
        Schedule(10.0, 10, 11)  # P > N_l
    with pytest.raises(ConfigError):
        Schedule(10.0, 0)
    with pytest.raises(ConfigError):
        Schedule(10.0, 10, 1, delta_tau=0.03)


# --- serial run ---------------------------------------------------------------

def test_zero_growth_rate_keeps_concentration_zero():
    led = CostLedger(1)
    rec = ode_run(30, 50, led, gp=GrowthParams(alpha=0.0))
    assert np.all(rec.functionals == 0.0)
    assert led.micro_fine == 50  # micro problems still solved


def test_ledger_counts_n_l_micro_problems():
    led = CostLedger(1)
    ode_run(30, 100, led)
    assert led.micro_fine == 100
    assert led.micro_coarse == 0
    assert led.rd_fine == 100


def test_reference_run_counts_thousand_micro_problems():
    # the serial reference column: N_l = 1000 micro problems
    led = CostLedger(1)
    ode_run(300, 1000, led)
    assert led.micro_fine == 1000


def test_serial_deterministic():
    a = ode_run(30, 60)
    b = ode_run(30, 60)
    assert np.array_equal(a.functionals, b.functionals)
    assert np.array_equal(a.gamma_scalar[1:], b.gamma_scalar[1:])
    assert a.final_micro.q == b.final_micro.q


def test_concentration_monotone_width_shrinks():
    rec = ode_run(300, 200)
    assert np.all(np.diff(rec.functionals) >= 0)
    assert np.all(np.diff(rec.width) <= 0)
    assert rec.width[0] == pytest.approx(2.0)


def test_coarser_steps_overestimate():
    # forward Euler with a rate decreasing in c_s: larger dt overshoots
    fine = ode_run(300, 1000)
    coarse = ode_run(300, 20)  # dt = 15 days
    assert coarse.endpoint >= fine.endpoint


def test_first_micro_problem_needs_extra_cycle():
    rec = ode_run(30, 10)
    assert rec.cycles[1] == 3  # cold start
    assert np.all(rec.cycles[2:] == 2)  # warm starts on the orbit


def test_record_time_axis():
    rec = ode_run(30, 10)
    assert np.all(np.diff(rec.t) > 0)
    assert rec.t[-1] == pytest.approx(30 * DAY)
    assert len(rec) == 11


def test_pde_serial_smoke():
    grid = SolidGrid(41, 6)
    gp = GrowthParams(alpha=5e-8)
    mp = MicroParams(inflow_offset=1.0)
    sched = Schedule(20 * DAY, 20, 1, 0.02)
    led = CostLedger(1)
    rec = run_serial(sched, gp, mp, FieldState.zero(grid), MicroState(0.0),
                     1e-3, 10, led)
    assert led.micro_fine == 20 and led.rd_fine == 20
    assert rec.model == "pde"
    assert rec.functionals[-1] > 0
    assert rec.means[-1] > 0
    assert np.all(rec.width <= 2.0)


# --- coarse step -----------------------------------------------------------------

def test_heuristic_coarse_counts_zero_micro_problems():
    led = CostLedger(1)
    macro, micro, sample = run_coarse_step(
        ScalarState(0.0), MicroState(0.0), 5 * DAY, "heuristic", GP, MP,
        ledger=led)
    assert led.micro_total == 0
    assert led.rd_coarse == 1
    assert sample.cycles_used == 0
    assert macro.c_s == pytest.approx(5 * DAY * 0.8 * GP.alpha, rel=1e-12)
    assert micro.q == pytest.approx(MP.mean_inflow)


def test_two_scale_coarse_counts_one_micro_problem():
    led = CostLedger(1)
    run_coarse_step(ScalarState(0.0), MicroState(0.0), 5 * DAY, "two_scale",
                    GP, MP, ledger=led)
    assert led.micro_coarse == 1 and led.micro_fine == 0
    assert led.rd_coarse == 1


def test_coincident_grids_match_serial_step():
    # dT = dt reproduces one run_serial step bit for bit
    sched = Schedule(0.3 * DAY, 1, 1, 0.02)
    rec = run_serial(sched, GP, MP, ScalarState(0.0), MicroState(0.0))
    macro, micro, _ = run_coarse_step(ScalarState(0.0), MicroState(0.0),
                                      sched.dt, "two_scale", GP, MP)
    assert macro.c_s == rec.functionals[1]
    assert micro.q == rec.final_micro.q


def test_unknown_coarse_mode():
    with pytest.raises(ValueError):
        run_coarse_step(ScalarState(0.0), MicroState(0.0), 1.0, "bogus", GP, MP)


# --- csv --------------------------------------------------------------------------

def test_trajectory_csv_ode(tmp_path):
    rec = ode_run(30, 10)
    path = tmp_path / "traj.csv"
    trajectory_to_csv(rec, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "t_days,c_s,gamma_bar,width,cycles"
    assert len(rows) == 12
    last = rows[-1].split(",")
    assert float(last[0]) == pytest.approx(30.0)
    assert int(last[4]) == 2


def test_trajectory_csv_pde(tmp_path):
    grid = SolidGrid(21, 4)
    gp = GrowthParams(alpha=5e-8)
    mp = MicroParams(inflow_offset=1.0)
    sched = Schedule(5 * DAY, 5, 1, 0.02)
    rec = run_serial(sched, gp, mp, FieldState.zero(grid), MicroState(0.0))
    path = tmp_path / "traj.csv"
    trajectory_to_csv(rec, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "t_days,c_mid,c_mean,gamma_bar,width,cycles"
    assert len(rows) == 7


def test_state_functional_and_width():
    assert state_functional(ScalarState(0.3)) == 0.3
    assert channel_width(ScalarState(0.3)) == pytest.approx(1.4)
    grid = SolidGrid(11, 3)
    c = np.zeros((3, 11))
    c[-1, 5] = 0.2
    st = FieldState(grid, c)
    assert state_functional(st) == pytest.approx(0.2)
    assert channel_width(st) == pytest.approx(1.6)
