"""Scenario configuration: JSON round-trip, validation and paper presets.

A scenario is a flat record of everything one run needs.  Times are
given in days in the configuration (1 day = 86 400 s) and converted to
seconds internally.  The two shipped presets encode the paper setups:
"ode_paper" (scalar growth model, 300 days at 0.3-day steps) and
"pde_paper" (reaction-diffusion model, 200 days at 0.2-day steps).
"""

import json
from dataclasses import asdict, dataclass, fields

from . import growth, microflow
from .errors import ConfigError
from .twoscale import DAY, Schedule

__all__ = ["Scenario", "parse_scenario", "preset", "PRESETS"]

_MODES = ("serial", "parareal", "reusage", "heuristic")
_STOPPING = ("fine", "coarse")


@dataclass(frozen=True)
class Scenario:
    """Validated run configuration; see the README for the field glossary."""

    model: str = "ode"
    # schedule (days/seconds)
    T_end_days: float = 300.0
    dt_days: float = 0.3
    P: int = 10
    delta_tau: float = 0.02
    eps_p: float = 1e-3
    eps_par: float = 1e-3
    max_iters: int = 20
    max_cycles: int = 10
    # growth model
    alpha: float = 5.0e-7
    sigma0: float = 30.0
    D_s: float = 1.2e-7
    R_s: float = 5.0e-7
    theta: float = 0.7
    reaction_sign: int = 1
    # micro model
    rho_f: float = 1.0
    nu_f: float = 0.04
    rho_s: float = 1.0  # retained for fidelity; unused by the surrogate
    lambda_relax: float = 9.0
    c_geo: float = 12.5
    inflow_amplitude: float = 30.0
    inflow_offset: float = 0.0
    h_min: float = 0.05
    # grid (PDE model)
    nx: int = 101
    ny: int = 11
    # orchestration
    mode: str = "serial"
    stopping: str = "fine"
    threads: int | None = None
    out_dir: str = "out"

    def __post_init__(self):
        if self.model not in ("ode", "pde"):
            raise ConfigError(f"model must be 'ode' or 'pde', got {self.model!r}")
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.stopping not in _STOPPING:
            raise ConfigError(f"stopping must be one of {_STOPPING}, got {self.stopping!r}")
        if self.dt_days <= 0 or self.T_end_days <= 0:
            raise ConfigError("T_end_days and dt_days must be positive")
        n = self.T_end_days / self.dt_days
        if abs(n - round(n)) > 1e-9:
            raise ConfigError(
                f"dt_days={self.dt_days} must divide T_end_days={self.T_end_days}"
            )
        for name in ("eps_p", "eps_par"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_iters < 1 or self.max_cycles < 2:
            raise ConfigError("max_iters must be >= 1 and max_cycles >= 2")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")
        if self.rho_s <= 0:
            raise ConfigError(f"rho_s must be positive, got {self.rho_s}")
        # cross-field validation via the module parameter types
        self.growth_params()
        self.micro_params()
        self.schedule()
        if self.model == "pde":
            growth.SolidGrid(self.nx, self.ny)

    @property
    def N_l(self) -> int:
        return int(round(self.T_end_days / self.dt_days))

    def schedule(self) -> Schedule:
        return Schedule(self.T_end_days * DAY, self.N_l,
                        self.P if self.mode != "serial" else 1, self.delta_tau)

    def growth_params(self) -> growth.GrowthParams:
        return growth.GrowthParams(self.alpha, self.sigma0, self.D_s, self.R_s,
                                   self.theta, self.reaction_sign)

    def micro_params(self) -> microflow.MicroParams:
        return microflow.MicroParams(
            rho_f=self.rho_f, nu_f=self.nu_f, lambda_relax=self.lambda_relax,
            c_geo=self.c_geo, inflow_amplitude=self.inflow_amplitude,
            inflow_offset=self.inflow_offset, delta_tau=self.delta_tau,
            h_min=self.h_min,
        )

    def initial_states(self):
        """Zero concentration and resting flow, as in the paper's setups."""
        if self.model == "ode":
            macro0 = growth.ScalarState(0.0)
        else:
            macro0 = growth.FieldState.zero(growth.SolidGrid(self.nx, self.ny))
        return macro0, microflow.MicroState(0.0)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, path):
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)


def parse_scenario(source) -> Scenario:
    """Load a scenario from a JSON file path, a preset name, or a dict."""
    if isinstance(source, dict):
        return Scenario.from_dict(source)
    if isinstance(source, Scenario):
        return source
    name = str(source)
    if name in PRESETS:
        return preset(name)
    try:
        with open(name, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {name}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"scenario file {name} must contain a JSON object")
    return Scenario.from_dict(data)


PRESETS = {
    # ODE growth model of the first numerical example: 300 days at
    # dt = 0.3 days (N_l = 1000), pulsating inflow 30 sin^2(pi t).
    "ode_paper": dict(
        model="ode", T_end_days=300.0, dt_days=0.3, delta_tau=0.02,
        eps_p=1e-3, eps_par=1e-3, alpha=5.0e-7, sigma0=30.0,
        inflow_amplitude=30.0, inflow_offset=0.0,
    ),
    # Reaction-diffusion growth model: 200 days at dt = 0.2 days
    # (N_l = 1000), inflow 30 (1 + sin^2(pi t)), stricter eps_par.
    "pde_paper": dict(
        model="pde", T_end_days=200.0, dt_days=0.2, delta_tau=0.02,
        eps_p=1e-3, eps_par=1e-4, alpha=5.0e-8, sigma0=30.0,
        D_s=1.2e-7, R_s=5.0e-7, theta=0.7,
        inflow_amplitude=30.0, inflow_offset=1.0, nx=101, ny=11,
    ),
}


def preset(name: str, **overrides) -> Scenario:
    """Instantiate a shipped preset, optionally overriding fields."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    data = dict(PRESETS[name])
    data.update(overrides)
    return Scenario.from_dict(data)
