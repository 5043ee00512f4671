"""Token-bucket limiter gating request dispatch."""
import asyncio
from typing import Optional


class RateLimiter:
    """Allows at most ``requests_per_minute`` dispatches per rolling minute.

    The bucket holds up to one minute's worth of tokens and refills
    continuously. ``None`` disables limiting.
    """

    def __init__(self, requests_per_minute: Optional[float] = None):
        self.rate = requests_per_minute / 60.0 if requests_per_minute else None
        self.capacity = max(1.0, requests_per_minute or 0.0)
        self._tokens = self.capacity
        self._updated: Optional[float] = None
        self._lock = asyncio.Lock()

    async def acquire(self) -> None:
        """Wait until a token is available and take it."""
        if self.rate is None:
            return
        async with self._lock:
            loop = asyncio.get_running_loop()
            while True:
                now = loop.time()
                if self._updated is not None:
                    elapsed = now - self._updated
                    self._tokens = min(self.capacity, self._tokens + elapsed * self.rate)
                self._updated = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                await asyncio.sleep((1.0 - self._tokens) / self.rate)
