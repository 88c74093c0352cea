"""Per-observation surprise/accuracy indices for categorical forecasts.

Three indices, each mapping (forecast distribution, observed state) to a scalar:

* Weaver's surprise index: E(p) / p_observed.  Values increasingly above 1
  mean increasingly surprising observations.
* Good's logarithmic score with an entropy penalty b over baseline marginals:
  log(b * p) when the designated (modal) prediction occurs, log(b * (1 - p))
  when it does not.  Natural logarithm throughout; lower values mean worse
  forecasts under the modal-state reading used here.
* Ranked probability score: order-sensitive accuracy in [0, 1] with a linear
  distance penalty; 1 is the best possible prediction, 0 the poorest.
"""

from __future__ import annotations

import enum
import math
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateBaselineError,
    LogOfZeroError,
    SingleStateError,
    ZeroProbabilityObservedError,
)


class ScoreKind(str, enum.Enum):
    WEAVER_SURPRISE = "weaver"
    GOOD_LOG = "goodlog"
    RANKED_PROBABILITY = "rps"


def _probs(p) -> np.ndarray:
    arr = getattr(p, "probabilities", p)
    return np.asarray(arr, dtype=float)


def weaver_surprise(p, observed: int) -> float:
    """Expected probability divided by the probability of the observed state."""
    probs = _probs(p)
    po = probs[observed]
    if po <= 0.0:
        raise ZeroProbabilityObservedError(f"observed state {observed} has probability 0")
    return float(np.sum(probs**2) / po)


def entropy_penalty(x) -> float:
    """Penalty b = -sum x_j ln x_j over the baseline marginals, with 0 ln 0 = 0."""
    xs = _probs(x)
    nz = xs[xs > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def good_log_score(p, observed: int, x) -> float:
    """Log score against the modal prediction, penalized by baseline entropy.

    The designated prediction is the modal state of p (lowest index on ties).
    Returns ln(b * p_modal) on a hit and ln(b * (1 - p_modal)) on a miss.
    """
    probs = _probs(p)
    b = entropy_penalty(x)
    if b <= 0.0:
        raise DegenerateBaselineError("baseline marginals are a point mass")
    modal = int(np.argmax(probs))
    pm = float(probs[modal])
    arg = b * pm if observed == modal else b * (1.0 - pm)
    if arg <= 0.0:
        raise LogOfZeroError("logarithm argument is zero")
    return math.log(arg)


def ranked_probability_score(p, observed: int) -> float:
    """Order-sensitive accuracy in [0, 1]; 1 only for a point mass on the outcome."""
    probs = _probs(p)
    k = probs.shape[0]
    if k < 2:
        raise SingleStateError("ranked probability score needs >= 2 states")
    cum = np.cumsum(probs)[:-1]
    split = float(np.sum(cum**2 + (1.0 - cum) ** 2))
    dist = float(np.sum(np.abs(np.arange(1, k + 1) - (observed + 1)) * probs))
    return 1.5 - split / (2.0 * (k - 1)) - dist / (k - 1)
