from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

IN = "In"
NOT_IN = "NotIn"
UNKNOWN = "Unknown"


@dataclass
class Verdict:
    """Three-valued answer with evidence.

    ``In``/``NotIn`` carry a certificate (or concrete counterexample data);
    ``Unknown`` records the bound that was exhausted.  ``bounded`` marks an
    ``In`` that was only verified on a finite range (tight-closure evidence).
    """

    status: str
    certificate: Optional[dict] = None
    provenance: str = ""
    bound: Optional[dict] = None
    bounded: bool = False
    data: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.status not in (IN, NOT_IN, UNKNOWN):
            raise ValueError(f"bad verdict status {self.status!r}")

    @property
    def is_in(self) -> bool:
        return self.status == IN

    @property
    def is_not_in(self) -> bool:
        return self.status == NOT_IN

    @property
    def is_unknown(self) -> bool:
        return self.status == UNKNOWN

    def to_dict(self) -> dict:
        d = {"status": self.status, "provenance": self.provenance}
        if self.bounded:
            d["bounded"] = True
        if self.bound is not None:
            d["bound"] = self.bound
        if self.certificate is not None:
            d["certificate"] = self.certificate
        return d
