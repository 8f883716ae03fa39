"""Exception hierarchy shared by all iscore modules."""

from __future__ import annotations


class IscoreError(Exception):
    """Base class for all errors raised by this package."""

    code = "Error"

    def payload(self) -> dict:
        """Machine-readable form used by the CLI's stderr error objects."""
        return {"code": self.code, "message": str(self)}


class ScoreValidationError(IscoreError):
    """A score failed Def-level validation; carries the full report."""

    code = "InvalidScore"

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(str(v) for v in report.violations))

    def payload(self) -> dict:
        return {
            "code": self.code,
            "message": str(self),
            "violations": [v.as_dict() for v in self.report.violations],
        }


class UnknownPoint(IscoreError):
    """A relation references a point that no object of the score owns."""

    code = "UnknownPoint"


class ConflictsUnsupported(IscoreError):
    """Event structures with a nonempty conflict relation are out of scope."""

    code = "ConflictsUnsupported"


class ZeroCycleContradiction(IscoreError):
    """A zero-distance class is over-constrained: merging produced a
    self-delay whose duration set excludes 0."""

    code = "ZeroCycleContradiction"


class PartialTrace(IscoreError):
    """A trace does not assign a time to every event of the structure."""

    code = "PartialTrace"


class NonContiguousDuration(IscoreError):
    """A duration set with holes reached the STP translation; the caller
    must fall back to the general finite-domain path."""

    code = "NonContiguousDuration"

    def __init__(self, message, constraint=None):
        super().__init__(message)
        self.constraint = constraint


class Inconsistent(IscoreError):
    """The distance graph contains a negative cycle (no valid trace)."""

    code = "Inconsistent"

    def __init__(self, message, cycle=None):
        super().__init__(message)
        self.cycle = list(cycle) if cycle is not None else []

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "cycle": self.cycle}


class ExplosionGuard(IscoreError):
    """Search or enumeration exceeded its configured budget."""

    code = "ExplosionGuard"


class UnboundedDurations(IscoreError):
    """An enumeration-based query needs every duration set to be finite."""

    code = "UnboundedDurations"


class Unplayable(IscoreError):
    """A query that requires a playable score was given an unplayable one."""

    code = "Unplayable"


class InstanceRejected(IscoreError):
    """A generator input violates its invariants (e.g. subset-sum W = 0)."""

    code = "InstanceRejected"


class ParseError(IscoreError):
    """A score document is syntactically or structurally malformed."""

    code = "ParseError"

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column

    def payload(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        return out


class NotEnabled(IscoreError):
    """An event was fired while a strict predecessor was still pending."""

    code = "NotEnabled"


class OutsideWindow(IscoreError):
    """An event was fired outside its live window [lb, ub]."""

    code = "OutsideWindow"

    def __init__(self, lb, ub):
        self.lb = lb
        self.ub = ub
        super().__init__(f"firing time outside window [{lb}, {'inf' if ub is None else ub}]")

    def payload(self) -> dict:
        return {"code": self.code, "message": str(self), "lb": self.lb, "ub": self.ub}


class AlreadyExecuted(IscoreError):
    """An event was fired twice."""

    code = "AlreadyExecuted"
