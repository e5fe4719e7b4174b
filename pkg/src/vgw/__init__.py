"""vgw: exact wall-crossing for linear torus actions with varying polarization.

The package computes, over the rationals and without floating point:

* the finite wall structure a straight path of polarizations crosses,
* classical wall-crossing terms and pairings by iterated residues,
* their quantum (degree-indexed) counterparts via projectivized section
  spaces, together with crepancy tests and Novikov-window classification,
* a small problem-file format and a command line front end (``vgw``).
"""

from .ring import (
    CohClass,
    ContextError,
    DenominatorError,
    EMPTY_SPEC,
    IntegrationError,
    LinForm,
    NilpotentSpec,
    Param,
    Rat,
    ResidueError,
    SubstitutionError,
    VgwError,
    const,
    from_linform,
    from_terms,
    integrate_fiber,
    integrate_top,
    iterated_residue,
    make_class,
    omega,
    rat,
    render,
    residue_at_zero,
    substitute,
    theta,
    var,
    xi,
)
from .geometry import (
    DegenerateWallError,
    DescentData,
    FullConeError,
    PolPath,
    TorusAction,
    Wall,
    cone_contains,
    enumerate_walls,
    find_empty_chamber,
    is_semistable_support,
    quotient_nonempty,
    residual_action,
)
from .crossing import (
    FixedPointDatum,
    Insertion,
    KalkmanReport,
    NoncompactFixedModuliError,
    abstract_localization,
    abstract_wall_term,
    c1,
    chern,
    chern_total,
    classical_pairing,
    kalkman_verify,
    wall_term,
)
from .quantum import (
    Degree,
    NegativeMultiplicityError,
    NovikovWindow,
    QuantumKalkmanReport,
    WindowError,
    classify_distribution,
    crepant_check,
    index_weights,
    novikov_window,
    picard_ratio,
    quantum_kalkman_verify,
    quantum_pairing,
    quantum_wall_term,
    section_action,
)
from .problems import (
    ProblemDoc,
    ProblemError,
    parse_problem,
    render_problem,
)
from .reports import render_machine, render_report, render_text
from .repro import repro_ids, run_repro
from .cli import main, run_command

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
