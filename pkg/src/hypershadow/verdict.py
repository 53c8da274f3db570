from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Verdict:
    """Outcome of a property check: truth value plus a witness or certificate.

    Witness values use point indices and :class:`~hypershadow.space.CompactSet`;
    the CLI translates them to labels.
    """

    holds: bool
    witness: dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.holds
