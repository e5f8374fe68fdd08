"""Exhaustive and sampled verification suites behind ``qvote verify``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .attacks import theorem_check
from .ballots import apply_swaps, diff_sets, enumerate_weight_class, swap_pairing, weight
from .protocol import pvm_projector

PVM_TOL = 1e-10


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checked": self.checked,
                "failures": self.failures, **self.details}


def verify_lemma(max_n: int = 8) -> SuiteResult:
    """Every ordered pair of equal-weight strings is connected by its swap pairing."""
    res = SuiteResult("lemma", details={"max_n": max_n})
    for n in range(1, max_n + 1):
        for s in range(n + 1):
            strings = enumerate_weight_class(n, s).strings
            for a, m in enumerate(strings, start=1):
                for b, mp in enumerate(strings, start=1):
                    res.checked += 1
                    w0, w1 = diff_sets(m, mp)
                    out = apply_swaps(m, swap_pairing(m, mp))
                    if out != mp or len(w0) != len(w1) or weight(out) != s:
                        res.failures.append({"n": n, "s": s, "pi": a, "pi_prime": b,
                                             "got": out, "want": mp})
    return res


def verify_pvm(max_n: int = 6, tol: float = PVM_TOL) -> SuiteResult:
    """Yes-count projectors resolve the identity and are mutually orthogonal."""
    res = SuiteResult("pvm", details={"max_n": max_n, "max_deviation": 0.0})
    worst = 0.0
    for n in range(1, max_n + 1):
        projs = [pvm_projector(n, s) for s in range(n + 1)]
        res.checked += 1
        dev = float(np.max(np.abs(sum(projs) - np.eye(2 ** n))))
        worst = max(worst, dev)
        if dev > tol:
            res.failures.append({"n": n, "check": "completeness", "deviation": dev})
        for s, p in enumerate(projs):
            for t, q in enumerate(projs):
                res.checked += 1
                want = p if s == t else 0
                dev = float(np.max(np.abs(p @ q - want)))
                worst = max(worst, dev)
                if dev > tol:
                    res.failures.append({"n": n, "check": "orthogonality", "s": s, "s_prime": t,
                                         "deviation": dev})
    res.details["max_deviation"] = worst
    return res


def verify_theorem(n: int = 3, s: int = 1, trials: int = 100, seed: int = 1) -> SuiteResult:
    """Sampled apparatus specs are all detected; the identity never is."""
    r = theorem_check(n, s, trials, seed)
    res = SuiteResult("theorem", checked=r.trials - r.skipped,
                      details={"n": n, "s": s, "trials": r.trials, "seed": seed,
                               "skipped": r.skipped,
                               "min_max_detection": r.min_detection if r.skipped < r.trials else None,
                               "identity_max_detection": r.identity_max})
    if r.failures:
        res.failures.append({"undetected_specs": r.failures})
    if not r.passed and not r.failures:
        res.failures.append({"identity_detected": r.identity_max})
    return res
