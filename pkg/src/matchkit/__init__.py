"""matchkit: streaming matching algorithms with exact verification.

The package implements four small-memory matching algorithms — three for
maximum cardinality matching (a randomized preemptive scheme over four
matchings, a randomized incremental scheme over three, and a deterministic
incremental scheme with a support matching) and two single-pass schemes for
maximum weight matching — together with the machinery needed to check them:
exact optimum oracles, dual certificates with exact rational arithmetic,
structural validators, seeded instance generators, and a CLI harness.

Hot kernels live in a compiled extension when available; a pure-Python twin
with identical observable behavior is selected automatically as a fallback
(or forced via MATCHKIT_PURE=1).  ``matchkit.backend.BACKEND`` names the one
in use.
"""

from matchkit.backend import BACKEND
from matchkit.certify import (
    DualCertificate,
    assign_duals_deg3,
    assign_duals_tree,
    check_all_roots,
    check_certificate,
    weak_duality_ratio,
)
from matchkit.errors import (
    CertificateError,
    CyclicGraphError,
    InputError,
    InstanceFormatError,
    InvariantError,
    MatchkitError,
    OracleCapError,
)
from matchkit.generators import GENERATORS, GenSpec, SplitMix64, generate
from matchkit.graphcore import (
    ArrivalSequence,
    Edge,
    Matching,
    MultiMatchingState,
    conflicts,
    format_instance,
    parse_instance,
    read_instance,
    replay_events,
    write_instance,
)
from matchkit.incremental_mcm import DeterministicIncrementalMCM, IncrementalMCM
from matchkit.oracle import (
    EXACT_EDGE_CAP,
    OptResult,
    opt_matching,
    opt_matching_exact,
    opt_matching_forest,
    opt_matching_forest_prefixes,
)
from matchkit.preemptive_mcm import (
    PreemptiveMCM,
    check_lemma_internal,
    check_m4bad,
    classify_edges,
)
from matchkit.preemptive_mwm import ThresholdMWM, TwoThresholdMWM, theorem5_bound

__version__ = "0.1.0"

__all__ = [
    "ArrivalSequence",
    "BACKEND",
    "CertificateError",
    "CyclicGraphError",
    "DeterministicIncrementalMCM",
    "DualCertificate",
    "EXACT_EDGE_CAP",
    "Edge",
    "GENERATORS",
    "GenSpec",
    "IncrementalMCM",
    "InputError",
    "InstanceFormatError",
    "InvariantError",
    "Matching",
    "MatchkitError",
    "MultiMatchingState",
    "OptResult",
    "OracleCapError",
    "PreemptiveMCM",
    "SplitMix64",
    "ThresholdMWM",
    "TwoThresholdMWM",
    "assign_duals_deg3",
    "assign_duals_tree",
    "check_all_roots",
    "check_certificate",
    "check_lemma_internal",
    "check_m4bad",
    "classify_edges",
    "conflicts",
    "format_instance",
    "generate",
    "opt_matching",
    "opt_matching_exact",
    "opt_matching_forest",
    "opt_matching_forest_prefixes",
    "parse_instance",
    "read_instance",
    "replay_events",
    "theorem5_bound",
    "weak_duality_ratio",
    "write_instance",
]
