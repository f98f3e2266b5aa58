"""Reward kernel for multi-object visual perception rollouts."""

from ._visrl import (
    InvalidEncodingError,
    api_version,
    batch_score,
    group_advantages,
    score_rollout,
)

__all__ = [
    "InvalidEncodingError",
    "api_version",
    "batch_score",
    "group_advantages",
    "score_rollout",
]
__version__ = api_version()
