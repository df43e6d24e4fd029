"""Exact kernel for Weil algebras, formal Cartesian spaces, jets, and factorization witnesses."""

from .errors import JetKernelError
from .factorization import (
    EquivalenceChain,
    FactorizationPair,
    NotEquivalent,
    RelationStep,
    WitnessSpan,
    composite,
    decide_equivalence,
    embed_factorization,
    equal_composites,
    lift_plot,
    witness_d1,
    witness_general,
    witness_point,
)
from .formal import FormalMorphism, FormalSpace, compose, identity
from .hadamard import hadamard_expand, vanishing_quotient
from .jets import (
    JetPoint,
    JetSpace,
    TruncatedProPlot,
    cone_to_plot,
    disk_section_to_jet,
    jet_to_disk_section,
    lift_jet_plot,
    plot_to_cone,
    project,
    prolong,
)
from .polyring import GroebnerBasis, Polynomial, buchberger, divide
from .weil import WeilAlgebra, WeilElement, disk, ideal_decompose, make_weil, normal_form, weil_tensor

__version__ = "0.1.0"

__all__ = [
    "JetKernelError",
    "EquivalenceChain",
    "FactorizationPair",
    "NotEquivalent",
    "RelationStep",
    "WitnessSpan",
    "composite",
    "decide_equivalence",
    "embed_factorization",
    "equal_composites",
    "lift_plot",
    "witness_d1",
    "witness_general",
    "witness_point",
    "FormalMorphism",
    "FormalSpace",
    "compose",
    "identity",
    "hadamard_expand",
    "vanishing_quotient",
    "JetPoint",
    "JetSpace",
    "TruncatedProPlot",
    "cone_to_plot",
    "disk_section_to_jet",
    "jet_to_disk_section",
    "lift_jet_plot",
    "plot_to_cone",
    "project",
    "prolong",
    "GroebnerBasis",
    "Polynomial",
    "buchberger",
    "divide",
    "WeilAlgebra",
    "WeilElement",
    "disk",
    "ideal_decompose",
    "make_weil",
    "normal_form",
    "weil_tensor",
]
