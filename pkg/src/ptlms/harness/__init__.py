from .experiment import (
    ALGORITHMS,
    ExperimentSpec,
    FixedFloatComparison,
    LearningCurve,
    ThresholdNotReached,
    first_crossing,
    fixed_vs_float,
    m_sweep,
    run,
    speedup,
)

__all__ = [
    "ALGORITHMS",
    "ExperimentSpec",
    "FixedFloatComparison",
    "LearningCurve",
    "ThresholdNotReached",
    "first_crossing",
    "fixed_vs_float",
    "m_sweep",
    "run",
    "speedup",
]
