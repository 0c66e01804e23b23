"""
Key Distribution Center.

The KDC produces a fresh session key every time the group needs one. Keys
are opaque random tokens drawn from a seeded generator so that simulations
are reproducible; no cipher is attached to them.
"""

import logging
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config import DEFAULT_SEED, KEY_MATERIAL_BYTES

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


class SessionKey(BaseModel):
    """A versioned group key."""
    model_config = ConfigDict(frozen=True)

    version: int = Field(ge=1)
    key_material: bytes = Field(min_length=KEY_MATERIAL_BYTES, max_length=KEY_MATERIAL_BYTES)

    @property
    def fingerprint(self) -> str:
        """Short hex prefix, safe to log."""
        return self.key_material.hex()[:8]


class KeyDistributionCenter:
    """
    Issues session keys with strictly increasing versions.

    Two instances created with the same seed produce identical key streams.
    """

    def __init__(self, seed: SeedLike = DEFAULT_SEED):
        """
        Initialize the KDC.

        Args:
            seed: Integer seed or numpy SeedSequence for the key generator
        """
        self._rng = np.random.default_rng(seed)
        self.version = 0
        self.current_key: Optional[SessionKey] = None

    def generate_key(self) -> SessionKey:
        """
        Generate the next session key.

        Returns:
            SessionKey whose version is the previous version + 1
        """
        self.version += 1
        key = SessionKey(version=self.version, key_material=self._rng.bytes(KEY_MATERIAL_BYTES))
        self.current_key = key
        logger.debug(f"KDC issued key v{key.version} ({key.fingerprint})")
        return key
