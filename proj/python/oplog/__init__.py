"""Contour-integral operator logarithms and generator recovery for evolution families."""

import json

from ._oplog import (
    Family,
    OplogError,
    cole_hopf_report,
    cole_hopf_transform,
    eigen_log,
    families,
    formal_log,
    generator,
    generator_report,
    heat_evolve,
    heat_front,
    mat_exp,
    nu_from_eta,
    op_log,
    op_log_split,
    resolvent_approx,
    select_eta,
    select_nu,
    strip_double_log,
)
from ._oplog import _run_command


def run(command, **kwargs):
    """Runs a CLI command in-process and returns its report as a dict."""
    return json.loads(_run_command(command, **kwargs))


__all__ = [
    "Family",
    "OplogError",
    "cole_hopf_report",
    "cole_hopf_transform",
    "eigen_log",
    "families",
    "formal_log",
    "generator",
    "generator_report",
    "heat_evolve",
    "heat_front",
    "mat_exp",
    "nu_from_eta",
    "op_log",
    "op_log_split",
    "resolvent_approx",
    "run",
    "select_eta",
    "select_nu",
    "strip_double_log",
]
