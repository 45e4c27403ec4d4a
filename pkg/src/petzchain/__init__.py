"""Reconstruction of thermal spin-chain states from subsystem marginals via
the Petz recovery map, with conditional-mutual-information diagnostics,
recovery bounds, band-matrix perturbation theory, and chaos level statistics.
"""

from .bounds import (
    QuantumChannel,
    apply_channel,
    check_lemma1,
    check_lemma2,
    check_lemma3,
    check_lemma4,
    depolarizing_channel,
    unitary_channel,
)
from .hilbert import (
    DensityMatrix,
    Partition,
    embed,
    partial_trace,
    partial_trace_matrix,
    permute_sites,
)
from .linops import Spectrum, eigh, norm, root_fidelity, spectral_function
from .petz import (
    DEFAULT_BLOCKS,
    PERMUTE_ORDER,
    PERMUTED_BLOCKS,
    RecoveryReport,
    petz_recover,
    recovery_report,
)
from .rbm import BandModel, perturbative_cmi, perturbation_convergence, sample_band_matrix
from .spectral import SpectrumSample, spacing_ratios, unfolded_spacings, wigner_surmise
from .spinchain import ChainParams, build_hamiltonian, parity_blocks, parity_operator
from .thermal import GibbsSpec, cmi, entropy, gibbs_state

__version__ = "0.1.0"
