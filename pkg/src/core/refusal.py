from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional


@dataclass(frozen=True)
class RefusalError(Exception):
    """
    Raise this when the protocol must REFUSE an input or a state transition.
    It is not a bug; it is a refusal, and the ledger state stays untouched.
    """
    code: str
    user_message: str
    why: str
    missing: Optional[List[str]] = None
    details: Optional[Dict[str, Any]] = None

    def __str__(self) -> str:
        return f"{self.code}: {self.user_message}"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": "refusal",
            "code": self.code,
            "user_message": self.user_message,
            "why": self.why,
            "missing": list(self.missing) if self.missing else [],
            "details": dict(self.details) if self.details else {},
        }
