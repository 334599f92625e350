"""Entity/milieu system models with an adaptation loop over their update rules.

Importing the package registers the two shipped model families,
elementary cellular automata (``"ca"``) and single-layer perceptrons
(``"ann"``).
"""

from metasim.metamodel import (
    AdaptationSpec,
    Configuration,
    MilieuTopology,
    ModelError,
    ModelFamily,
    StateAlphabet,
    SystemModel,
    build_system_model,
    register_family,
    validate,
)
from metasim.engine import Trace, run_actual, step
from metasim.adaptation import (
    AdaptationHistory,
    IterationRecord,
    Outcome,
    Termination,
    adapt_loop,
    classify,
    mse_loss,
)
from metasim import ann, ca  # noqa: F401  (registers the families)

__all__ = [
    "AdaptationHistory",
    "AdaptationSpec",
    "Configuration",
    "IterationRecord",
    "MilieuTopology",
    "ModelError",
    "ModelFamily",
    "Outcome",
    "StateAlphabet",
    "SystemModel",
    "Termination",
    "Trace",
    "adapt_loop",
    "build_system_model",
    "classify",
    "mse_loss",
    "register_family",
    "run_actual",
    "step",
    "validate",
]
