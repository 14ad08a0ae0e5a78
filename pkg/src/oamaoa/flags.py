"""Diagnostic flags attached to intermediate and final estimates."""

import enum


class Flag(str, enum.Enum):
    GAMMA_DEGENERATE = "GammaDegenerate"
    RADICAND_OVERFLOW = "RadicandOverflow"
    NULL_SAMPLE = "NullSample"
    SIGN_INDETERMINATE = "SignIndeterminate"
    NO_CONVERGENCE = "NoConvergence"
    DEGENERATE_SPECTRUM = "DegenerateSpectrum"
    ZERO_SUBVECTOR = "ZeroSubvector"
    NO_USABLE_ROWS = "NoUsableRows"
    NO_USABLE_COLUMNS = "NoUsableColumns"
    NO_USABLE_REFERENCE = "NoUsableReference"
    INCONSISTENT_INTERMEDIATES = "InconsistentIntermediates"

    def __str__(self):
        return self.value


# An estimate carrying any of these has no numeric AoA.
FAILURE_FLAGS = frozenset(
    {
        Flag.GAMMA_DEGENERATE,
        Flag.NO_USABLE_ROWS,
        Flag.NO_USABLE_COLUMNS,
        Flag.NO_USABLE_REFERENCE,
    }
)


def format_flags(flags):
    return ";".join(sorted(str(f) for f in flags))
