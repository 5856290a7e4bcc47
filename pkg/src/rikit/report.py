"""Check records, scenario reports and their serialisations."""
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

FORMATS = ("json", "csv", "plotdata")
CSV_COLUMNS = ["name", "description", "expected", "actual", "window", "witness", "passed"]


def _num(x):
    """JSON-safe scalar: floats stay floats, non-finite become strings."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


@dataclass
class Check:
    description: str
    expected: object
    actual: object
    window: object
    witness: object = None
    passed: bool = False

    def as_dict(self):
        return {"description": self.description, "expected": _num(self.expected),
                "actual": _num(self.actual), "window": _num(self.window),
                "witness": _num(self.witness), "passed": bool(self.passed)}


@dataclass
class ScenarioReport:
    name: str
    checks: list = field(default_factory=list)
    runtime_ms: float = 0.0
    curves: dict = field(default_factory=dict)

    @property
    def status(self):
        return "pass" if self.checks and all(c.passed for c in self.checks) else "fail"

    @property
    def passed(self):
        return self.status == "pass"

    def add(self, description, expected, actual, window, passed, witness=None):
        self.checks.append(Check(description, expected, actual, window, witness, bool(passed)))
        return passed

    # common check shapes

    def ratio_in(self, description, actual, reference, lo, hi, witness=None):
        r = actual / reference if reference else math.inf
        ok = bool(np.isfinite(r) and lo <= r <= hi)
        return self.add(description, reference, actual, f"ratio in [{lo:g}, {hi:g}]", ok, witness)

    def close(self, description, actual, expected, rtol, witness=None):
        err = abs(actual - expected) / max(abs(expected), 1e-300)
        return self.add(description, expected, actual, f"rel {rtol:g}", bool(err <= rtol), witness)

    def at_most(self, description, actual, bound, witness=None):
        return self.add(description, bound, actual, "<=", bool(actual <= bound), witness)

    def at_least(self, description, actual, bound, witness=None):
        return self.add(description, bound, actual, ">=", bool(actual >= bound), witness)

    def holds(self, description, ok, actual=None, witness=None):
        return self.add(description, True, actual if actual is not None else bool(ok), "true",
                        bool(ok), witness)

    def equivalent(self, description, rep, expect=True):
        return self.add(description, f"equivalent={expect}",
                        rep.ratio_high / rep.ratio_low if rep.ratio_low > 0 else math.inf,
                        f"spread <= {rep.window:g}", rep.equivalent == expect, rep.witness_high)

    def raises(self, description, exc_type, func):
        try:
            func()
        except exc_type as exc:
            return self.add(description, exc_type.__name__, type(exc).__name__, "raises", True)
        except Exception as exc:  # wrong error type is a failed check
            return self.add(description, exc_type.__name__, type(exc).__name__, "raises", False)
        return self.add(description, exc_type.__name__, "no error", "raises", False)

    def as_dict(self):
        return {"name": self.name, "status": self.status,
                "runtime_ms": round(float(self.runtime_ms), 3),
                "checks": [c.as_dict() for c in self.checks]}


def _json(reports):
    data = [r.as_dict() for r in reports]
    return json.dumps(data[0] if len(data) == 1 else data, indent=2) + "\n"


def _csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        for c in r.checks:
            d = c.as_dict()
            w.writerow([r.name] + [d[k] for k in CSV_COLUMNS[1:]])
    return buf.getvalue()


def _plotdata(reports):
    blocks = []
    curves = [(name, tv) for r in reports for name, tv in r.curves.items()]
    for name, (t, v) in curves:
        order = np.argsort(t)
        lines = [] if len(curves) == 1 else [f"# {name}"]
        lines.append("t,value")
        lines += [f"{float(a)!r},{float(b)!r}" for a, b in zip(np.asarray(t)[order], np.asarray(v)[order])]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def emit_report(report, fmt="json"):
    """Serialise one report or a list of them."""
    reports = report if isinstance(report, (list, tuple)) else [report]
    if fmt == "json":
        return _json(reports)
    if fmt == "csv":
        return _csv(reports)
    if fmt == "plotdata":
        return _plotdata(reports)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
