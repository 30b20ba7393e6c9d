"""Asymptotic iteration for linear second-order ODEs and Schrodinger spectra."""

from aimsolve.jet import (
    Jet,
    JetError,
    jet_add,
    jet_const,
    jet_derive,
    jet_eval,
    jet_mul,
    jet_power,
    jet_scale,
    jet_variable,
)
from aimsolve.engine import (
    AimEngine,
    AimState,
    DegenerateRatioError,
    IterationRecord,
    IterationOverflow,
    RunResult,
    alpha_ratio,
    delta,
    delta_jet,
    run,
)
from aimsolve.problems import (
    PotentialExpression,
    ProblemSpec,
    asymptotic_factor,
    build_coefficients,
    parse_potential,
)
from aimsolve.eigensolver import (
    EigenvalueResult,
    SolverConfig,
    refine,
    scan,
    solve_spectrum,
    x0_potential_min,
    x0_s0_zero,
)
from aimsolve.closed_form import (
    ReconstructionResult,
    constant_coeff_alpha,
    exact_energy,
    gk_wavefunction,
    hermite_f,
    kummer_1f1,
    reconstruct_solution,
)
from aimsolve.oracle import GridEigenProblem, fd_eigenvalues, fd_spectrum

__version__ = "0.1.0"
