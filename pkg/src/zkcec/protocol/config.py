"""Session configuration shared by both parties (compared via its digest)."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields

from ..encoding import HASH_ID, W_LIT
from ..field import MODULUS_ID

CONFIG_ENV = "ZKCEC_CONFIG"
ROM_MODES = ("onehot",)


@dataclass
class Config:
    modulus: str = MODULUS_ID
    hash_id: str = HASH_ID
    w_lit: int = W_LIT
    rom_mode: str = "onehot"
    compress: bool = False
    dealer_seed: str = "zkcec-dealer"
    prover_seed: int = None       # key sampling / local randomness; None = OS entropy
    verifier_seed: int = None     # challenges; None = OS entropy
    solver_budget: int = 500_000
    timeout: float = 600.0

    def __post_init__(self):
        if self.rom_mode not in ROM_MODES:
            raise ValueError(f"rom_mode must be one of {ROM_MODES}")
        if self.w_lit != W_LIT:
            raise ValueError("only w_lit = 64 is supported")

    def digest(self) -> bytes:
        """Digest over the parameters both sides must agree on."""
        shared = {k: getattr(self, k) for k in ("modulus", "hash_id", "w_lit", "rom_mode",
                                                "compress")}
        return hashlib.blake2b(json.dumps(shared, sort_keys=True).encode(),
                               digest_size=16).digest()

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def load_config(path=None, **overrides) -> Config:
    """Read a JSON config (path, or $ZKCEC_CONFIG if set) and apply overrides."""
    data = {}
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(Config)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**data)
