"""Trial wave functions with analytic value, gradient, Laplacian and local energy."""

from .base import (
    Evaluation,
    NodeError,
    WaveFunction,
    evaluate,
    evaluate_batch,
    gradient_and_laplacian,
    is_zero,
    local_energy,
    local_quantities,
    potential_energy,
)
from .builders import (
    build_be_hf,
    build_be_phi2,
    build_be_two_config,
    build_hydrogenic,
    build_li_rhf,
    orbital_1s,
    orbital_2s,
)
from .determinant import CIWaveFunction, DeterminantProduct
from .factorized import RadialPairFactor, node_guide
from .hylleraas import (
    DistanceExpansion,
    HylleraasWaveFunction,
    build_he_triplet_hylleraas,
    build_li_hylleraas,
    he_triplet_terms,
    li_hylleraas_terms,
    project_2S,
)
from .jastrow import JastrowFactor, ProductWaveFunction, with_jastrow
from .orbitals import SlaterOrbital
from .wffile import (
    WaveFunctionFileError,
    dump_wavefunction,
    load_shipped,
    load_wavefunction,
    parse_wavefunction,
    shipped_path,
)
