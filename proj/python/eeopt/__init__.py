"""Energy-efficient power allocation for wireless links."""

from ._core import (
    Allocation,
    ConfigError,
    DomainError,
    ErgodicSolution,
    Error,
    InfeasibleError,
    MmseSolution,
    MmseTable,
    NestedSolution,
    NumericalError,
    StaticSolution,
    build_table,
    eval_F_rayleigh,
    exp_int,
    flat_fading_closed_form,
    generic_mu,
    lambert_w0,
    mmse_of,
    run_config,
    solve_ergodic_rayleigh,
    solve_mimo,
    solve_mmse_ee,
    solve_nested,
    solve_parallel_fading,
    solve_static,
    tradeoff_config,
    validate_config,
    waterfill_allocate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
