"""Effective collective spins for atoms with inhomogeneous light coupling."""

__version__ = "0.1.0"

from .coupling import (  # noqa: E402
    AtomCloud,
    CouplingVector,
    EffectiveParams,
    ModeProfile,
    effective_params,
    overlap_J,
    required_temperature,
    sample_couplings,
    thermal_overlap,
)
from .ladder import PureState, SpinLadder, dicke, heralded_cat, squeezed  # noqa: E402
from .metrology import fig3_dataset, gain, gain_bound  # noqa: E402
from .mismatch import DensityMatrix, apply_mismatch, expand_dicke  # noqa: E402
from .wigner import GridSpec, wigner_grid, wigner_point  # noqa: E402
