"""Synchronous reward-service client.

Each request is a plain dict in the service's /v1 schema: either
``{"response": ..., "truth": ...}`` or ``{"program": ..., "params": ...,
"truth": ...}``, optionally with an ``"id"``.  Replies are the service's
JSON bodies, unchanged.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import httpx


class TransportError(Exception):
    """The service could not be reached after all retries."""


class ServiceError(Exception):
    """The service answered with a non-success HTTP status."""

    def __init__(self, status_code: int, detail: str):
        super().__init__(f"HTTP {status_code}: {detail}")
        self.status_code = status_code
        self.detail = detail


@dataclass(frozen=True)
class ClientConfig:
    base_url: str
    timeout_ms: float = 5000.0
    max_retries: int = 2
    batch_cap: int = 1024

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.batch_cap < 1:
            raise ValueError("batch_cap must be at least 1")


class RewardClient:
    """Blocking client; safe to share across threads.

    Verification is idempotent server-side, so transport failures are
    retried without risk of duplicated effect.
    """

    def __init__(self, config: ClientConfig, max_workers: int = 8):
        self._config = config
        self._http = httpx.Client(
            base_url=config.base_url,
            timeout=config.timeout_ms / 1000.0,
        )
        self._pool = ThreadPoolExecutor(max_workers=max_workers)

    def close(self) -> None:
        self._pool.shutdown(wait=True)
        self._http.close()

    def __enter__(self) -> "RewardClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _post(self, path: str, payload) -> httpx.Response:
        last_error: Optional[Exception] = None
        for _ in range(self._config.max_retries + 1):
            try:
                return self._http.post(path, json=payload)
            except httpx.TransportError as exc:
                last_error = exc
        raise TransportError(
            f"POST {path} failed after {self._config.max_retries + 1} attempts: "
            f"{last_error}"
        ) from last_error

    @staticmethod
    def _body(reply: httpx.Response):
        if reply.status_code >= 300:
            raise ServiceError(reply.status_code, reply.text)
        return reply.json()

    def health(self) -> Dict:
        try:
            reply = self._http.get("/healthz")
        except httpx.TransportError as exc:
            raise TransportError(str(exc)) from exc
        return self._body(reply)

    def verify_one(self, request: Dict) -> Dict:
        """Score one item via /v1/verify."""
        return self._body(self._post("/v1/verify", request))

    def verify_batch(self, requests: Sequence[Dict]) -> List[Dict]:
        """Score many items, chunked at the configured cap.

        Chunks are dispatched in parallel; the reply list preserves the
        request order across chunk boundaries.
        """
        requests = list(requests)
        if not requests:
            return []
        cap = self._config.batch_cap
        chunks = [requests[i:i + cap] for i in range(0, len(requests), cap)]
        replies: List[Dict] = []
        for chunk_reply in self._pool.map(self._verify_chunk, chunks):
            replies.extend(chunk_reply)
        return replies

    def _verify_chunk(self, chunk: List[Dict]) -> List[Dict]:
        return self._body(self._post("/v1/verify_batch", chunk))
