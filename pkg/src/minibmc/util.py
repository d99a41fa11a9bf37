"""Small shared utilities."""

from __future__ import annotations

import time


class VerificationTimeout(Exception):
    pass


class Deadline:
    """Wall-clock budget checked cooperatively in the hot loops."""

    def __init__(self, seconds: float | None):
        self.expires_at = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.expires_at is not None and time.monotonic() > self.expires_at:
            raise VerificationTimeout("verification timed out")


NO_DEADLINE = Deadline(None)
