"""Steady states and synchronization diagnostics of the driven quantum van der Pol oscillator."""

from .analytic import (AnalyticSteadyState, analytic_steady_state, analytic_tomogram, coherence,
                       coherence_gradient, critical_drive, limit_cycle, mean_excitation)
from .errors import (ConfigError, DomainError, InvalidDimensionError, NormalizationError, QvdpError,
                     ShapeError, SolverError, StepSizeError)
from .fock import (DiagnosticsReport, FockSpace, annihilation, creation, expectation, make_space, number,
                   squared_annihilation, validate_density)
from .liouvillian import (Superoperator, SystemParams, build_element_form, build_operator_form, evolve,
                          residual, solve, steady_state)
from .metrics import MetricsRecord, RegimeLabel, all_metrics, classify_regime, g2_zero, numeric_coherence
from .sweep import SweepConfig, SweepRecord, arnold_map, convergence_check, plan, run
from .tomography import (QuadratureGrid, Tomogram, WignerMap, nonclassical_area, quadrature_std,
                         quadrature_wavefunction, tomogram, wigner)

__version__ = "0.1.0"
