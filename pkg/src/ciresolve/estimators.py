"""Estimator-style wrappers for batch use alongside scikit-learn tooling.

The estimators are thin: ``fit`` runs the exact constructions and stores them,
``transform`` and ``predict`` read off Betti numbers and labels.  Nothing is
learned from data; the API exists so that batches of rings and modules can be
pushed through ``get_params``/``set_params`` style configuration.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .construct import OperatorFamily, iterate_tower, spliced_resolution
from .growth import classify_ring
from .io import Problem, parse_problem
from .resolution import ModulePresentation
from .ring import RingTower

__all__ = ["SpliceResolver", "RingClassifier", "check_towers", "check_problems"]


def _check_bounds(N, D) -> None:
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ValueError(f"max_homological must be a positive integer, got {N!r}")
    if D is not None and (isinstance(D, bool) or not isinstance(D, int) or D < 1):
        raise ValueError(f"max_degree must be a positive integer or None, got {D!r}")


def check_problems(X: Iterable) -> list[tuple[RingTower, ModulePresentation]]:
    """Normalize a batch to ``(tower, module)`` pairs.

    Items may be parsed JSON descriptions (dicts), :class:`Problem` objects,
    bare towers (the residue field is used) or ``(tower, module)`` pairs.
    """
    out = []
    for k, item in enumerate(X):
        if isinstance(item, dict):
            item = parse_problem(item)
        if isinstance(item, Problem):
            out.append((item.tower, item.module))
        elif isinstance(item, RingTower):
            out.append((item, ModulePresentation.residue_field(item)))
        elif isinstance(item, (tuple, list)) and len(item) == 2 and isinstance(item[0], RingTower):
            tower, module = item
            if not isinstance(module, ModulePresentation) or module.tower is not tower:
                raise ValueError(f"item {k}: module must be a presentation over the given tower")
            out.append((tower, module))
        else:
            raise TypeError(f"item {k}: expected a description, a tower or a (tower, module) pair")
    if not out:
        raise ValueError("empty batch")
    return out


def check_towers(X: Iterable) -> list[RingTower]:
    return [tower for tower, _ in check_problems(X)]


class SpliceResolver(BaseEstimator):
    """Resolve each module over the deepest level of its tower by splicing.

    After ``fit``: ``resolutions_`` (minimized, exact through index
    ``max_homological``) and ``operators_`` (the ``chi`` family on the
    unminimized splice).  ``transform`` returns total Betti numbers, one row
    per input.
    """

    def __init__(self, max_homological: int = 12, max_degree: int | None = None):
        self.max_homological = max_homological
        self.max_degree = max_degree

    def fit(self, X, y=None):
        _check_bounds(self.max_homological, self.max_degree)
        pairs = check_problems(X)
        self.resolutions_ = []
        self.operators_: list[OperatorFamily] = []
        for tower, module in pairs:
            self.resolutions_.append(spliced_resolution(tower, module, self.max_homological, self.max_degree))
            result = iterate_tower(tower, module, self.max_homological, self.max_degree, certify=False)
            self.operators_.append(result.operators)
        self.n_features_out_ = self.max_homological + 1
        return self

    def transform(self, X=None) -> np.ndarray:
        """Total Betti numbers of ``X`` (of the fitted batch when ``X`` is None)."""
        check_is_fitted(self, "resolutions_")
        if X is None:
            resolutions = self.resolutions_
        else:
            resolutions = [
                spliced_resolution(t, m, self.max_homological, self.max_degree) for t, m in check_problems(X)
            ]
        rows = []
        for res in resolutions:
            betti = res.total_betti()
            rows.append(betti + [0] * (self.n_features_out_ - len(betti)))
        return np.array(rows, dtype=np.int64)

    def fit_transform(self, X, y=None, **fit_params) -> np.ndarray:
        return self.fit(X, y).transform()


class RingClassifier(BaseEstimator):
    """Label each tower regular, hypersurface or complete-intersection by Betti growth."""

    def __init__(self, max_homological: int = 12, max_degree: int | None = None, oracle: bool = True):
        self.max_homological = max_homological
        self.max_degree = max_degree
        self.oracle = oracle

    def fit(self, X, y=None):
        _check_bounds(self.max_homological, self.max_degree)
        towers = check_towers(X)
        self.reports_ = [classify_ring(t, self.max_homological, self.max_degree, self.oracle) for t in towers]
        return self

    def predict(self, X=None) -> np.ndarray:
        """Labels for ``X`` (for the fitted batch when ``X`` is None)."""
        check_is_fitted(self, "reports_")
        if X is None:
            reports = self.reports_
        else:
            reports = [classify_ring(t, self.max_homological, self.max_degree, self.oracle) for t in check_towers(X)]
        return np.array([r.label for r in reports], dtype=object)

    def codimensions(self) -> np.ndarray:
        check_is_fitted(self, "reports_")
        return np.array([r.codimension for r in self.reports_], dtype=np.int64)

    def score(self, X, y: Sequence[str]) -> float:
        """Fraction of towers whose label matches ``y``."""
        labels = self.predict(X)
        return float(np.mean([a == b for a, b in zip(labels, y)]))
