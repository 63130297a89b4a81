"""Moderation review service: HTTP facade, decision store, configuration."""

from .app import (
    QUEUE_FILTERS,
    RetrainJob,
    ServingBundle,
    build_bundle,
    create_app,
    default_trainer,
)
from .config import ConfigError, ServiceConfig, load_config
from .store import (
    DECISION_KINDS,
    UNDECIDED,
    DecisionStore,
    ReviewDecision,
    StoreError,
    read_label_file,
)

__all__ = [
    "QUEUE_FILTERS",
    "RetrainJob",
    "ServingBundle",
    "build_bundle",
    "create_app",
    "default_trainer",
    "ConfigError",
    "ServiceConfig",
    "load_config",
    "DECISION_KINDS",
    "UNDECIDED",
    "DecisionStore",
    "ReviewDecision",
    "StoreError",
    "read_label_file",
]
