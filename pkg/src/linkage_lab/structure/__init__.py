"""Structural verifiers and searchers: butterfly minors, weak immersions,
ear anonymity, identifying sequences, and the wall-to-grid transformation."""

from .ears import (  # noqa: F401
    IdentifyingSequence,
    build_identifying_sequence_reduced,
    ear_anonymity,
    ear_anonymity_of_ear,
    enumerate_maximal_ears,
    is_identifying_sequence,
    lift_identifying_sequence_edge,
    spine_of,
)
from .models import (  # noqa: F401
    STATUS_FOUND,
    STATUS_NONE,
    STATUS_TIMEOUT,
    ButterflyModel,
    ImmersionModel,
    ImmersionSearchResult,
    MinorSearchResult,
    SearchStats,
    compute_center,
    find_butterfly_minor,
    find_weak_immersion,
    identity_butterfly_model,
    identity_immersion_model,
    validate_butterfly_model,
    validate_weak_immersion,
)
from .walls import (  # noqa: F401
    CanonicalWallImmersion,
    canonical_wall_immersion,
    validated_wall_to_grid_minor,
    wall_to_grid_minor,
)
