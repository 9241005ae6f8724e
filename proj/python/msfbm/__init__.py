"""Mixed sub-fractional Brownian motion: covariance kernels, exact sampling,
sample-path diagnostics and qualitative classification."""

import json as _json

from ._msfbm import *  # noqa: F401,F403
from ._msfbm import verify_json as _verify_json

__version__ = "0.1.0"


def verify(suite="all", spec=None, seed=None, draws=None, reps=None, threads=0):
    """Run a property suite and return the report as a dict."""
    kwargs = {"suite": suite, "spec": spec, "threads": threads}
    if seed is not None:
        kwargs["seed"] = seed
    if draws is not None:
        kwargs["draws"] = draws
    if reps is not None:
        kwargs["reps"] = reps
    return _json.loads(_verify_json(**kwargs))
