"""Extended B-spline MPM engine for penalty-based frictional contact."""

from .errors import (ConfigurationError, ContractViolationError,
                     ElementInversionError, EngineError, GeometryError,
                     OutOfDomainError, ScenarioValidationError)
from .grid import (BasisClass, CellClass, EulerianGrid, classify_bases,
                   classify_cells, evaluate_ebs, evaluate_obs,
                   extrapolation_weights)
from .materials import (LinearElastic, NeoHookean, lame_from_young,
                        linear_stress_update, neo_hookean_update,
                        young_from_lame)
from .contact import (ContactPair, ContactPairConfig, detect_pairs,
                      detect_pairs_1d, gap_and_slip, penalty_forces,
                      project_on_segment)
from .solver import (BodyForceLoad, DirichletSpec, Engine, FieldLoads, Region,
                     SpringSupport, StepConfig, TractionLoad, critical_dt,
                     penalty_defaults)
from .state import (Annulus, BoundaryChain, DemiDisk, DiscreteField, Disk,
                    ParticleState, Rectangle, Segment1D, Union, seed_field,
                    total_energies)
from .scenario import PRESETS, Scenario, parse_scenario, preset_scenario

__version__ = "0.1.0"
