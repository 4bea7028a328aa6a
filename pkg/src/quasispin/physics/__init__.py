"""Physics layer for quasispin.

This module contains:
- Shared types and the exception hierarchy
- Bipartite chain and its exact Dirac operators
- Lattice Foldy-Wouthuysen transform and band projectors
- Splitter synthesis (I-integrals, block series, geometric truncation, sign gauge)
- Wave packets, propagation and scattering observables
- Triangle-block level inversion and the dimer hexamer
"""

from quasispin.physics.base import (
    AliasingError,
    Boundary,
    ConfigError,
    DimensionError,
    DynamicsError,
    EdgeContaminationError,
    FitError,
    GaugeError,
    LatticeError,
    NotHermitianError,
    OperatorMatrix,
    PacketError,
    QuadratureError,
    QuasispinError,
    SeparationError,
    SplitterError,
    TraceError,
    WavePacket,
)
from quasispin.physics.dimers import (
    HexamerCouplings,
    HexamerSweep,
    TriangleBlock,
    block_unitary,
    c3_permutation,
    degeneracy_pattern,
    exponential_overlap_curve,
    hexamer_hamiltonian,
    level_table_csv,
    spectrum_sweep,
    symmetry_sectors,
    triangle_spectrum,
)
from quasispin.physics.dynamics import (
    CollisionEstimate,
    PacketMode,
    Propagator,
    ScatteringResult,
    ScatteringScenario,
    WavePacketSpec,
    band_resolved_densities,
    calibrate_gate_height,
    collision_time,
    group_velocity,
    kappa_sweep,
    make_packet,
    position_expectation,
    position_operator,
    propagate,
    rho_sweep,
    scatter,
    scattering_run,
)
from quasispin.physics.fw import (
    BandProjectors,
    FwDirection,
    FwOperators,
    apply_fw,
    band_projectors,
    build_fw,
    projectors_from_fw,
    spectral_projectors,
)
from quasispin.physics.lattice import (
    BlochBand,
    DiracOperators,
    LatticeSpec,
    bloch_state,
    build_dirac_operators,
    build_hamiltonian,
    conical_expansion_check,
    dispersion,
    k_grid,
    sublattice_potential,
    translation_operator,
)
from quasispin.physics.splitter import (
    AsymptoticRegime,
    FwGateProfile,
    GateVariant,
    IIntegralTable,
    SplitterMatrix,
    SplitterMode,
    assemble_scattering_hamiltonian,
    asymptotic_i_integral,
    bloch_kernel,
    export_csv,
    geometric_truncate,
    i_integral,
    i_integral_table,
    locality_profile,
    potential_blocks,
    sign_gauge,
    synthesize_splitter,
    uniform_gate,
)

__all__ = [
    # Base types and errors
    "AliasingError",
    "Boundary",
    "ConfigError",
    "DimensionError",
    "DynamicsError",
    "EdgeContaminationError",
    "FitError",
    "GaugeError",
    "LatticeError",
    "NotHermitianError",
    "OperatorMatrix",
    "PacketError",
    "QuadratureError",
    "QuasispinError",
    "SeparationError",
    "SplitterError",
    "TraceError",
    "WavePacket",
    # Lattice
    "BlochBand",
    "DiracOperators",
    "LatticeSpec",
    "bloch_state",
    "build_dirac_operators",
    "build_hamiltonian",
    "conical_expansion_check",
    "dispersion",
    "k_grid",
    "sublattice_potential",
    "translation_operator",
    # FW transform
    "BandProjectors",
    "FwDirection",
    "FwOperators",
    "apply_fw",
    "band_projectors",
    "build_fw",
    "projectors_from_fw",
    "spectral_projectors",
    # Splitter
    "AsymptoticRegime",
    "FwGateProfile",
    "GateVariant",
    "IIntegralTable",
    "SplitterMatrix",
    "SplitterMode",
    "assemble_scattering_hamiltonian",
    "asymptotic_i_integral",
    "bloch_kernel",
    "export_csv",
    "geometric_truncate",
    "i_integral",
    "i_integral_table",
    "locality_profile",
    "potential_blocks",
    "sign_gauge",
    "synthesize_splitter",
    "uniform_gate",
    # Dynamics
    "CollisionEstimate",
    "PacketMode",
    "Propagator",
    "ScatteringResult",
    "ScatteringScenario",
    "WavePacketSpec",
    "band_resolved_densities",
    "calibrate_gate_height",
    "collision_time",
    "group_velocity",
    "kappa_sweep",
    "make_packet",
    "position_expectation",
    "position_operator",
    "propagate",
    "rho_sweep",
    "scatter",
    "scattering_run",
    # Dimers
    "HexamerCouplings",
    "HexamerSweep",
    "TriangleBlock",
    "block_unitary",
    "c3_permutation",
    "degeneracy_pattern",
    "exponential_overlap_curve",
    "hexamer_hamiltonian",
    "level_table_csv",
    "spectrum_sweep",
    "symmetry_sectors",
    "triangle_spectrum",
]
