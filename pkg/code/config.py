import os
from dataclasses import dataclass, replace

from errors import *

HERMITIAN_TOL = 1e-10
IMAGINARY_TOL = 1e-12
TRACE_TOL = 1e-9
PURITY_TOL = 1e-9
EIGENVALUE_TOL = 1e-8

STOP_RULES = ("certified", "first-feasible", "exhaustive")


@dataclass(frozen=True)
class SearchConfig:
    feasibility_tol: float = 1e-10
    rank_rtol: float = 1e-10
    certificate_tol: float = 1e-9
    tie_tol: float = 1e-9
    budget: int = 1_000_000
    stop_rule: str = "certified"
    chunk_size: int = 4096
    workers: int = 1
    record_trace: bool = True
    seed_gap_tol: float = 1e-4
    seed_iterations: int = 50000

    def __post_init__( self ):
        if self.stop_rule not in STOP_RULES:
            raise InvalidParameter(f"unknown stop rule {self.stop_rule!r}; expected one of {', '.join(STOP_RULES)}")
        if self.budget < 1:
            raise InvalidParameter("support budget must be positive")
        if self.chunk_size < 1 or self.workers < 1:
            raise InvalidParameter("chunk size and worker count must be positive")
        if self.seed_gap_tol <= 0 or self.seed_iterations < 1:
            raise InvalidParameter("seed gap tolerance and iteration count must be positive")

    @staticmethod
    def from_env( environ=None, **overrides ):
        """Defaults, then APPROX_BUDGET from the environment, then explicit overrides."""
        environ = os.environ if environ is None else environ
        config = SearchConfig()
        raw = environ.get("APPROX_BUDGET")
        if raw is not None and raw.strip() != "":
            try:
                budget = int(raw)
            except ValueError:
                raise InvalidParameter(f"APPROX_BUDGET must be an integer, got {raw!r}") from None
            config = replace(config, budget=budget)
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(config, **overrides)
