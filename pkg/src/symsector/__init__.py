"""Generic entanglement of Haar-random states in permutation and translation symmetry sectors."""

__version__ = "0.1.0"

from .errors import (ConfigError, EigensolverError, FitError, RegimeError, SampleFileError,
                     SectorNonexistentError, SizeCapError, SymsectorError)
from .qudit import (DensityOperator, PureState, QuditGeometry, apply_site_permutation,
                    apply_translation, decode_index, encode_index, hermitian_spectrum,
                    partial_trace, rotate_string)
from .sectors import (OrbitClass, SectorKind, SectorSpec, SubspaceBasis, antisymmetric_basis,
                      enumerate_orbits, momentum_basis, projector, sector_basis,
                      sector_dimension, symmetric_basis)
from .sampling import SeedSpec, sample_sector_state
from .entanglement import EntanglementRecord, renyi_entropy, rescaled_s, von_neumann_entropy
