"""Method names to statistic procedures.

Grammar: ``t<0-3>s<1-3>`` for AGTIC (optionally prefixed ``agtic-``),
``pagtic-t<0-3>s<1-3>`` for the percentile variant, and the baseline
names ``dcor``, ``rdmcor``, ``r2``, ``hsic``.
"""

import re

from .baselines import BASELINES, BaselineStatistic
from .statistic import AgticConfig, AgticStatistic, DcorStatistic

_AGTIC_RE = re.compile(r"^(?:(p?agtic)-)?(t[0-3])(s[1-3])$")

BASELINE_NAMES = ("dcor", "rdmcor", "r2", "hsic")


def parse_agtic_name(name):
    """Return ``(transform, stat, mode)`` for an AGTIC method name, else None."""
    match = _AGTIC_RE.match(name.strip().lower())
    if not match:
        return None
    prefix, transform, stat = match.groups()
    mode = "percentile" if prefix == "pagtic" else "scale"
    return transform, stat, mode


def is_method_name(name):
    return name in BASELINE_NAMES or parse_agtic_name(name) is not None


def make_statistic(name, k=5, seed=0):
    """Build the statistic procedure named ``name``."""
    key = name.strip().lower()
    if key == "dcor":
        return DcorStatistic()
    if key in BASELINES:
        return BaselineStatistic(key, BASELINES[key])
    parsed = parse_agtic_name(key)
    if parsed is None:
        raise ValueError(f"unknown method {name!r}")
    transform, stat, mode = parsed
    return AgticStatistic(AgticConfig(transform=transform, mode=mode, k=k,
                                      stat=stat, seed=seed))
