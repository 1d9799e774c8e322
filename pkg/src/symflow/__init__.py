"""Suspension flows over subshifts of finite type with rational roofs.

Exact symbolic dynamics (shifts, roof cocycles, flows, orbit spectra),
the Bowen-Walters metric, thermodynamic formalism on block graphs, closed
orbit counting and the constant-roof recoding of lattice flows.
"""
from types import ModuleType as _ModuleType

from .bowen_walters import (
    BwConstants,
    BwInterval,
    check_bw_lemma,
    d1_interval,
    dr_interval,
    lower_bound,
)
from .counting import gurevich_count, growth_csv, growth_table, s_of_t, upsilon
from .dichotomy import (
    cycle_lattice,
    recode_constant,
    solve_transfer,
    verify_cycle_map,
    verify_spectrum,
)
from .errors import (
    ConsistencyFailure,
    EpsilonTooLarge,
    HeightMismatch,
    NeverReturns,
    NotOnOrbit,
    NotPeriodic,
    NotTransitive,
    ParseError,
    SymflowError,
    ValidationError,
)
from .flow import (
    ClosedOrbit,
    FlowPoint,
    closed_orbits,
    length_spectrum,
    orbit_multiplicity,
    orbit_of_cycle,
)
from .model import Model, load_model, model_to_dict, parse_model
from .roof import BlockFunction, RoofFunction, birkhoff, edge_form, evaluate, induced_system
from .shift import (
    CycleClass,
    Cylinder,
    Graph,
    SeqPoint,
    base_distance,
    higher_block,
    is_regular,
    is_transitive,
    periodic_points,
    primitive_cycles,
    sliding_code,
    validate_graph,
)
from .thermo import (
    MarkovMeasure,
    Potential,
    entropy,
    equilibrium,
    integrate,
    markov_measure,
    mme_flow,
    pressure,
)

__version__ = "0.1.0"

__all__ = sorted(
    name for name, obj in globals().items()
    if not name.startswith("_") and not isinstance(obj, _ModuleType)
)
