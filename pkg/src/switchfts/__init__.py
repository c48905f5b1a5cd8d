"""Fixed-time and arbitrarily fast stabilization of discrete-time switched linear systems.

Exact rational arithmetic throughout; see :mod:`switchfts.linalg`.
"""

from importlib import resources

from .ladder import Ladder, LadderStep, compute_ladder, fixed_point_dim, md_ladder, mi_ladder
from .linalg import Matrix, Subspace
from .normalform import NormalForm, decompose, extract_xi, verify_normal_form
from .rate import (
    arbitrarily_fast,
    decay_certificate,
    lower_bound_rate_mi,
    one_step_annihilation,
    scalar_min_rate_md,
    scalar_min_rate_mi,
    scale_system,
)
from .simulate import adversarial_decay, exhaustive_fts_check, simulate, step
from .synthesis import (
    GainSet,
    certify_gains,
    decide_fts,
    reduce_inputs,
    synthesize_md,
    synthesize_mi,
)
from .system import ModeKind, SwitchedSystem

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled data file (e.g. ``"worked_example.json"``)."""
    return resources.files(__package__) / "data" / name


def worked_example() -> SwitchedSystem:
    """The bundled three-state, two-mode example system."""
    from .formats import parse_system

    return parse_system(data_path("worked_example.json"))
