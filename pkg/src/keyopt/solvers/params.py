"""Per-metaheuristic parameter records, the tuned defaults for the three
shipped applications, and helpers to build parameter-control grids."""

import dataclasses
from dataclasses import dataclass

from ..qlearning import ParameterGrid, three_point_values


def _check_fraction(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {value}")


def _check_positive(name, value):
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class BrkgaParams:
    p: int = 1597
    pe: float = 0.10
    pm: float = 0.20
    rho: float = 0.70

    def __post_init__(self):
        _check_positive("p", self.p)
        _check_fraction("pe", self.pe)
        _check_fraction("pm", self.pm)
        if self.pe >= 0.5:
            raise ValueError(f"elite fraction must keep pe*p < p/2, got {self.pe}")
        if self.pm >= 1.0 - self.pe:
            raise ValueError(f"mutant fraction must keep pm*p < p - pe*p, got {self.pm}")
        if not 0.5 < self.rho <= 1.0:
            raise ValueError(f"inherit probability must be in (0.5, 1], got {self.rho}")


@dataclass(frozen=True)
class GaParams:
    p: int = 1000
    pc: float = 0.85
    mu: float = 0.03

    def __post_init__(self):
        _check_positive("p", self.p)
        _check_fraction("pc", self.pc)
        _check_fraction("mu", self.mu)


@dataclass(frozen=True)
class SaParams:
    t0: float = 10000.0
    sa_max: int = 100
    alpha: float = 0.99
    beta_min: float = 0.10
    beta_max: float = 0.20

    def __post_init__(self):
        _check_positive("t0", self.t0)
        _check_positive("sa_max", self.sa_max)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"cooling rate must be in (0, 1), got {self.alpha}")
        _check_fraction("beta_min", self.beta_min)
        _check_fraction("beta_max", self.beta_max)


@dataclass(frozen=True)
class GraspParams:
    hs: float = 0.125
    he: float = 0.00012
    t0: float = 10000.0
    alpha: float = 0.99

    def __post_init__(self):
        if not 0.0 < self.hs <= 1.0:
            raise ValueError(f"start grid spacing must be in (0, 1], got {self.hs}")
        if not 0.0 < self.he <= self.hs:
            raise ValueError(f"end grid spacing must be in (0, hs], got {self.he}")
        _check_positive("t0", self.t0)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"cooling rate must be in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class IlsParams:
    beta_min: float = 0.15
    beta_max: float = 0.40

    def __post_init__(self):
        _check_fraction("beta_min", self.beta_min)
        _check_fraction("beta_max", self.beta_max)


@dataclass(frozen=True)
class VnsParams:
    beta_min: float = 0.05
    k_max: int = 6

    def __post_init__(self):
        _check_fraction("beta_min", self.beta_min)
        _check_positive("k_max", self.k_max)


@dataclass(frozen=True)
class PsoParams:
    p: int = 100
    c1: float = 2.05
    c2: float = 2.05
    w: float = 0.73

    def __post_init__(self):
        _check_positive("p", self.p)
        _check_positive("c1", self.c1)
        _check_positive("c2", self.c2)
        if self.w < 0:
            raise ValueError(f"inertia weight must be >= 0, got {self.w}")


@dataclass(frozen=True)
class LnsParams:
    t0: float = 1000.0
    alpha: float = 0.90
    beta_min: float = 0.10
    beta_max: float = 0.30

    def __post_init__(self):
        _check_positive("t0", self.t0)
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"cooling rate must be in (0, 1), got {self.alpha}")
        _check_fraction("beta_min", self.beta_min)
        _check_fraction("beta_max", self.beta_max)


SOLVER_NAMES = ("brkga", "ga", "sa", "grasp", "ils", "vns", "pso", "lns")

PARAM_TYPES = {
    "brkga": BrkgaParams,
    "ga": GaParams,
    "sa": SaParams,
    "grasp": GraspParams,
    "ils": IlsParams,
    "vns": VnsParams,
    "pso": PsoParams,
    "lns": LnsParams,
}

# Tuned parameter sets per shipped application.
_PMEDIAN = {
    "brkga": BrkgaParams(p=1597, pe=0.10, pm=0.20, rho=0.70),
    "ga": GaParams(p=1000, pc=0.85, mu=0.03),
    "sa": SaParams(t0=10000.0, sa_max=100, alpha=0.99, beta_min=0.10, beta_max=0.20),
    "grasp": GraspParams(hs=0.125, he=0.00012),
    "ils": IlsParams(beta_min=0.15, beta_max=0.40),
    "vns": VnsParams(beta_min=0.05, k_max=6),
    "pso": PsoParams(p=100, c1=2.05, c2=2.05, w=0.73),
    "lns": LnsParams(t0=1000.0, alpha=0.90, beta_min=0.10, beta_max=0.30),
}

_PARTITION = {
    "brkga": BrkgaParams(p=1597, pe=0.10, pm=0.20, rho=0.70),
    "ga": GaParams(p=1000, pc=0.85, mu=0.002),
    "sa": SaParams(t0=1000000.0, sa_max=1000, alpha=0.99, beta_min=0.005, beta_max=0.05),
    "grasp": GraspParams(hs=0.125, he=0.00012),
    "ils": IlsParams(beta_min=0.005, beta_max=0.10),
    "vns": VnsParams(beta_min=0.005, k_max=10),
    "pso": PsoParams(p=50, c1=2.05, c2=2.05, w=0.73),
    "lns": LnsParams(t0=1000.0, alpha=0.90, beta_min=0.10, beta_max=0.30),
}

_HUBTREE = {
    "brkga": BrkgaParams(p=1597, pe=0.15, pm=0.20, rho=0.70),
    "ga": GaParams(p=600, pc=0.99, mu=0.005),
    "sa": SaParams(t0=1000000.0, sa_max=1500, alpha=0.99, beta_min=0.01, beta_max=0.05),
    "grasp": GraspParams(hs=0.125, he=0.00012),
    "ils": IlsParams(beta_min=0.05, beta_max=0.20),
    "vns": VnsParams(beta_min=0.005, k_max=10),
    "pso": PsoParams(p=200, c1=2.05, c2=2.05, w=0.73),
    "lns": LnsParams(t0=1000000.0, alpha=0.97, beta_min=0.10, beta_max=0.30),
}

DEFAULT_TABLES = {
    "pmedian": _PMEDIAN,
    "partition": _PARTITION,
    "hubtree": _HUBTREE,
}


def defaults_for(problem_id: str) -> dict:
    """Tuned parameter set for a problem; problems without their own table
    use the p-median row."""
    return dict(DEFAULT_TABLES.get(problem_id, _PMEDIAN))


_INT_FIELDS = {"p", "sa_max", "k_max"}


def with_overrides(params, overrides: dict):
    """Copy of a parameter record with some fields replaced; integer fields
    are rounded."""
    clean = {}
    for key, value in overrides.items():
        clean[key] = max(1, round(value)) if key in _INT_FIELDS else value
    return dataclasses.replace(params, **clean)


def control_grid(solver: str, params) -> ParameterGrid:
    """Three-point parameter grid centered on the tuned values, clipped to
    each field's validity range."""
    if solver == "brkga":
        spec = {
            "p": three_point_values(params.p, lo=4, integer=True),
            "pe": three_point_values(params.pe, lo=0.01, hi=0.49),
            "pm": three_point_values(params.pm, lo=0.0, hi=0.49),
            "rho": three_point_values(params.rho, lo=0.51, hi=1.0),
        }
        initial = {"p": params.p, "pe": params.pe, "pm": params.pm, "rho": params.rho}
    elif solver == "ga":
        spec = {
            "p": three_point_values(params.p, lo=4, integer=True),
            "pc": three_point_values(params.pc, lo=0.0, hi=1.0),
            "mu": three_point_values(params.mu, lo=0.0, hi=1.0),
        }
        initial = {"p": params.p, "pc": params.pc, "mu": params.mu}
    elif solver == "sa":
        spec = {
            "t0": three_point_values(params.t0, lo=1e-3),
            "sa_max": three_point_values(params.sa_max, lo=1, integer=True),
            "alpha": three_point_values(params.alpha, lo=0.01, hi=0.999),
            "beta_min": three_point_values(params.beta_min, lo=0.0, hi=1.0),
            "beta_max": three_point_values(params.beta_max, lo=0.0, hi=1.0),
        }
        initial = {"t0": params.t0, "sa_max": params.sa_max, "alpha": params.alpha,
                   "beta_min": params.beta_min, "beta_max": params.beta_max}
    elif solver == "grasp":
        spec = {
            "hs": three_point_values(params.hs, lo=1e-5, hi=1.0),
            "he": three_point_values(params.he, lo=1e-7, hi=1.0),
        }
        initial = {"hs": params.hs, "he": params.he}
    elif solver == "ils":
        spec = {
            "beta_min": three_point_values(params.beta_min, lo=0.0, hi=1.0),
            "beta_max": three_point_values(params.beta_max, lo=0.0, hi=1.0),
        }
        initial = {"beta_min": params.beta_min, "beta_max": params.beta_max}
    elif solver == "vns":
        spec = {
            "beta_min": three_point_values(params.beta_min, lo=0.0, hi=1.0),
            "k_max": three_point_values(params.k_max, lo=1, integer=True),
        }
        initial = {"beta_min": params.beta_min, "k_max": params.k_max}
    elif solver == "pso":
        spec = {
            "p": three_point_values(params.p, lo=2, integer=True),
            "c1": three_point_values(params.c1, lo=0.01),
            "c2": three_point_values(params.c2, lo=0.01),
            "w": three_point_values(params.w, lo=0.0, hi=1.0),
        }
        initial = {"p": params.p, "c1": params.c1, "c2": params.c2, "w": params.w}
    elif solver == "lns":
        spec = {
            "t0": three_point_values(params.t0, lo=1e-3),
            "alpha": three_point_values(params.alpha, lo=0.01, hi=0.999),
            "beta_min": three_point_values(params.beta_min, lo=0.0, hi=1.0),
            "beta_max": three_point_values(params.beta_max, lo=0.0, hi=1.0),
        }
        initial = {"t0": params.t0, "alpha": params.alpha,
                   "beta_min": params.beta_min, "beta_max": params.beta_max}
    else:
        raise ValueError(f"unknown solver: {solver}")
    return ParameterGrid.from_dict(spec, initial=initial)
