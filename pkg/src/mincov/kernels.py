"""Kernel backend selection.

The per-node hot loops (dominator fixpoint, tree numbering, reachability,
topological ordering, plan evaluation) live in the compiled extension
``mincov._speedups`` when it was built; ``mincov._speedups_py`` is a
behaviour-identical pure-Python fallback.  Set ``MINCOV_PURE_PYTHON=1`` to
force the fallback, or switch at runtime with `use_backend` / `backend`.
"""

from __future__ import annotations

import contextlib
import os

from mincov import _speedups_py

try:
    from mincov import _speedups  # type: ignore[attr-defined]
except ImportError:
    _speedups = None

_BACKENDS = {"python": _speedups_py}
if _speedups is not None:
    _BACKENDS["compiled"] = _speedups


def _initial_backend() -> str:
    if os.environ.get("MINCOV_PURE_PYTHON", "") not in ("", "0"):
        return "python"
    return "compiled" if "compiled" in _BACKENDS else "python"


_active = _initial_backend()


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def active_backend() -> str:
    return _active


def use_backend(name: str) -> None:
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active = name


@contextlib.contextmanager
def backend(name: str):
    """Temporarily switch kernel backends (used by benchmarks and tests)."""
    previous = _active
    use_backend(name)
    try:
        yield
    finally:
        use_backend(previous)


def reachable_mask(indptr, targets, root):
    return _BACKENDS[_active].reachable_mask(indptr, targets, root)


def dominators(succ_indptr, succ, pred_indptr, pred, root):
    return _BACKENDS[_active].dominators(succ_indptr, succ, pred_indptr, pred, root)


def tree_intervals(child_indptr, children, root):
    return _BACKENDS[_active].tree_intervals(child_indptr, children, root)


def toposort(dep_indptr, dependents, dep_count):
    return _BACKENDS[_active].toposort(dep_indptr, dependents, dep_count)


def eval_steps(kinds, probe_vals, src_indptr, src_step):
    return _BACKENDS[_active].eval_steps(kinds, probe_vals, src_indptr, src_step)
