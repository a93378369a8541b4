"""Thin client for the HTTP reward verification service.

Lets RL and synthesis pipelines score rollout batches over the service's
/v1 JSON interface, with retries, timeouts, and order-preserving chunked
batch dispatch.
"""

from .client import ClientConfig, RewardClient, ServiceError, TransportError

__version__ = "0.1.0"

__all__ = ["ClientConfig", "RewardClient", "ServiceError", "TransportError"]
