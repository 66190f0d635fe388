"""Exception hierarchy. Every error carries a short machine-readable code."""


class TransducerError(Exception):
    code = "transducer_error"

    def to_dict(self):
        return {"error": self.code, "message": str(self)}


class CriticalCoupling(TransducerError):
    code = "critical_coupling"


class UnknownPreset(TransducerError):
    code = "unknown_preset"


class InvalidParameter(TransducerError):
    code = "invalid_parameter"


class GridTooCoarse(TransducerError):
    code = "grid_too_coarse"


class GridMismatch(TransducerError):
    code = "grid_mismatch"


class NumericalBranch(TransducerError):
    code = "numerical_branch"


class UnstableStep(TransducerError):
    code = "unstable_step"


class TooFewSegments(TransducerError):
    code = "too_few_segments"
