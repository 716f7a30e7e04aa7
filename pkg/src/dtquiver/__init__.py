"""Exact wall-crossing of BPS spectra on quiver charge lattices."""
from ._backend import BACKEND
from .engine import (Convention, EngineError, NonHamiltonianResidual, TruncationTooSmall,
                     WallCrossing, factorize, ordered_product, wall_cross, wall_cross_full)
from .lattice import (DTBAR, OMEGA, Lattice, LatticeError, LatticeMap, PairingForm, Spectrum,
                      dtbar_to_omega, omega_to_dtbar, pushforward)
from .quiver import Quiver, build_bps_quiver, build_standard, export_dot
from .stability import CentralCharge, NonGenericStability, validate_generic

__version__ = "0.1.0"
