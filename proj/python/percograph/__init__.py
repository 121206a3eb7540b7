"""Bond percolation with Erdos-Renyi long-range edges."""

from ._percograph import (
    ClusterSizeDistribution,
    ConfigError,
    DomainError,
    beta_derivative_at_cr,
    c_critical,
    census,
    classify,
    estimate_survival,
    merge,
    origin_cluster_size,
    p_critical_d1,
    rho_of_type,
    solve_A_z,
    solve_alpha,
    solve_beta,
    sweep_csv,
    theory_point,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterSizeDistribution",
    "ConfigError",
    "DomainError",
    "beta_derivative_at_cr",
    "c_critical",
    "census",
    "classify",
    "estimate_survival",
    "merge",
    "origin_cluster_size",
    "p_critical_d1",
    "rho_of_type",
    "solve_A_z",
    "solve_alpha",
    "solve_beta",
    "sweep_csv",
    "theory_point",
]
