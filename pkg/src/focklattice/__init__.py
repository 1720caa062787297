"""Multi-photon propagation in coupled waveguide arrays, in the pseudo-energy representation."""

__version__ = "0.1.0"

from .errors import CapacityError, ComputationError, FockLatticeError, ValidationError
from .fock import (
    DEFAULT_CAP,
    Basis,
    ExchangeEnergy,
    decode,
    dimension,
    encode,
    enumerate_basis,
    exchange_energy,
)
from .lattice import (
    EffectiveHamiltonian,
    LatticeSpec,
    TermDiagram,
    allowed_transitions,
    build_hamiltonian,
    matrix_element,
    term_diagram,
)
from .spectral import (
    BenchmarkReport,
    MultiPhotonEigensystem,
    SingleParticleEigensystem,
    benchmark_eigensystems,
    direct_diagonalize,
    expand_product,
    multi_photon_eigensystem,
    single_particle_eigensystem,
)
from .evolution import (
    DARK_STATE_SPEC,
    ProbabilityTrace,
    SectorMixture,
    StateVector,
    dark_state,
    dark_state_trace,
    evolve,
    parallel_walk,
    probability_trace,
    sector_mixture,
)
from .graph import (
    FockGraph,
    IsomorphismReport,
    StateBijection,
    build_graph,
    chain_graph,
    conjugate_bijection,
    export_graph,
    graph_distance,
    verify_isomorphism,
)

__all__ = [
    "CapacityError",
    "ComputationError",
    "FockLatticeError",
    "ValidationError",
    "DEFAULT_CAP",
    "Basis",
    "ExchangeEnergy",
    "decode",
    "dimension",
    "encode",
    "enumerate_basis",
    "exchange_energy",
    "EffectiveHamiltonian",
    "LatticeSpec",
    "TermDiagram",
    "allowed_transitions",
    "build_hamiltonian",
    "matrix_element",
    "term_diagram",
    "BenchmarkReport",
    "MultiPhotonEigensystem",
    "SingleParticleEigensystem",
    "benchmark_eigensystems",
    "direct_diagonalize",
    "expand_product",
    "multi_photon_eigensystem",
    "single_particle_eigensystem",
    "DARK_STATE_SPEC",
    "ProbabilityTrace",
    "SectorMixture",
    "StateVector",
    "dark_state",
    "dark_state_trace",
    "evolve",
    "parallel_walk",
    "probability_trace",
    "sector_mixture",
    "FockGraph",
    "IsomorphismReport",
    "StateBijection",
    "build_graph",
    "chain_graph",
    "conjugate_bijection",
    "export_graph",
    "graph_distance",
    "verify_isomorphism",
]
