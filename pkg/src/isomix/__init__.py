"""Isoperimetric profiles and mixing-time bounds for finite Markov chains."""

__version__ = "0.1.0"

from .chain_core import (
    MarkovChain,
    StateSet,
    build_chain,
    chi2_distance,
    ergodic_flow,
    lazify,
    load_chain,
    save_chain,
    time_reversal,
    tv_distance,
)
from .enumeration import enumerate_subsets
from .errors import IsomixError
from .gradients import beta_plus, gaussian_iso, h_p, sandwich, talagrand_bound, tensor_bound
from .isoperimetry import (
    conductance,
    flow_profile,
    profile,
    psi_big,
    psi_evo,
    spread_gl,
    spread_minus,
    spread_mod,
    spread_plus,
    spread_record,
)
from .spectral_mixing import (
    bound_blocking_tau,
    bound_chi2_evolving,
    bound_chi2_spread,
    bound_spectral_sandwich,
    bound_tau_lower,
    exact_mixing,
    mixing_report,
    spectral_gap,
)
from .verify import verify_chain

__all__ = [name for name in dir() if not name.startswith("_")]
