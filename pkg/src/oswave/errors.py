"""Error signals raised by the library.

Each class carries a short ``signal`` name; the CLI prints it on failure.
"""


class OSWaveError(Exception):
    signal = "error"


class ParameterError(OSWaveError, ValueError):
    signal = "parameter-domain"


class UnknownProfileError(ParameterError):
    signal = "unknown-name"


class AiryOverflowError(OSWaveError, OverflowError):
    signal = "overflow"


class PoleError(OSWaveError, ZeroDivisionError):
    signal = "pole"


class NoConvergenceError(OSWaveError):
    signal = "no-convergence"

    def __init__(self, message, last=None, trace=None):
        super().__init__(message)
        self.last = last
        self.trace = list(trace or [])


class HypothesisError(OSWaveError):
    signal = "hypothesis-violation"


class PathSingularityError(OSWaveError):
    signal = "path-through-singularity"


class BranchAmbiguityError(OSWaveError):
    signal = "branch-ambiguity"


class BranchJumpError(OSWaveError):
    signal = "branch-jump"


class BranchLossError(OSWaveError):
    signal = "branch-loss"


class WronskianDegeneracyError(OSWaveError):
    signal = "wronskian-degeneracy"


class SplitFailureError(OSWaveError):
    signal = "split-failure"


class DegeneratePairingError(OSWaveError):
    signal = "degenerate-pairing"


class ResonanceError(OSWaveError):
    signal = "resonance"


class EigensolverError(OSWaveError):
    signal = "eigensolver-failure"


class IllPosedError(OSWaveError):
    signal = "ill-posed"
