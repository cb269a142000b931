"""On-disk cache of Eisenstein bases.

Entries are keyed by (kind, N, k, prec, format version), carry a sha256 checksum of
their payload and are written under an advisory lock, so concurrent readers never see
half-written files.  Corrupt or stale entries are rebuilt.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from pathlib import Path

import numpy as np
from filelock import FileLock

from ..cyclotomic import CycNumber
from ..expansion_engine import (
    Basis,
    EisDecomposition,
    build_basis,
    build_gamma1_basis,
    clear_basis_cache,
    use_basis_store,
)
from ..qseries import QExpansion

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
ENV_VAR = "CUSPFIELDS_CACHE_DIR"

__all__ = ["BasisCache", "default_cache_dir", "FORMAT_VERSION", "ENV_VAR"]


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "cuspfields"


def _pack_expansion(e: QExpansion) -> dict:
    return {"w": e.width, "M": e.modulus, "den": str(e.den), "radical": e.radical,
            "shape": list(e.num.shape), "num": " ".join(str(int(x)) for x in e.num.flat)}


def _unpack_expansion(d: dict) -> QExpansion:
    num = np.array([int(x) for x in d["num"].split()], dtype=object).reshape(d["shape"])
    return QExpansion(d["w"], d["M"], num, int(d["den"]), d["radical"])


def _serialize(basis: Basis) -> dict:
    dec = EisDecomposition(basis.N, basis.k, [(el, CycNumber.rational(1)) for el in basis.elements])
    return {
        "kind": basis.kind,
        "N": basis.N,
        "k": basis.k,
        "prec": basis.prec,
        "dimension": basis.dimension,
        "modulus": basis.modulus,
        "pivots": list(basis.pivots),
        "keys": [list(map(list, k)) for k in basis.keys] if basis.keys is not None else None,
        "elements": dec.to_text(),
        "expansions": [_pack_expansion(e) for e in basis.expansions],
    }


def _deserialize(d: dict) -> Basis:
    dec = EisDecomposition.from_text(d["elements"])
    keys = [tuple(tuple(x) for x in k) for k in d["keys"]] if d["keys"] is not None else None
    return Basis(
        d["N"], d["k"], d["prec"], d["kind"],
        [p for p, _ in dec.terms],
        [_unpack_expansion(t) for t in d["expansions"]],
        list(d["pivots"]),
        d["dimension"],
        d["modulus"],
        keys,
    )


def _checksum(payload: str) -> str:
    return hashlib.sha256(payload.encode()).hexdigest()


class BasisCache:
    def __init__(self, directory=None):
        self.dir = Path(directory) if directory is not None else default_cache_dir()

    def path(self, kind: str, N: int, k: int, prec: int) -> Path:
        return self.dir / f"{kind}-N{N}-k{k}-p{prec}-v{FORMAT_VERSION}.json"

    def _lock(self) -> FileLock:
        self.dir.mkdir(parents=True, exist_ok=True)
        return FileLock(str(self.dir / ".lock"))

    def load(self, kind: str, N: int, k: int, prec: int) -> Basis | None:
        p = self.path(kind, N, k, prec)
        if not p.exists():
            return None
        with self._lock():
            try:
                doc = json.loads(p.read_text())
                payload = doc["payload"]
                if doc.get("version") != FORMAT_VERSION or _checksum(payload) != doc.get("sha256"):
                    raise ValueError("checksum or version mismatch")
                return _deserialize(json.loads(payload))
            except (ValueError, KeyError, TypeError) as exc:
                log.warning("discarding cache entry %s: %s", p.name, exc)
                p.unlink(missing_ok=True)
                return None

    def save(self, basis: Basis) -> Path:
        p = self.path(basis.kind, basis.N, basis.k, basis.prec)
        payload = json.dumps(_serialize(basis), sort_keys=True)
        doc = {"version": FORMAT_VERSION, "sha256": _checksum(payload), "payload": payload}
        with self._lock():
            tmp = p.with_suffix(".tmp")
            tmp.write_text(json.dumps(doc))
            os.replace(tmp, p)
        return p

    def build(self, kind: str, N: int, k: int, prec: int) -> tuple[Basis, bool, float]:
        """Return (basis, was_cached, seconds)."""
        t = time.perf_counter()
        b = self.load(kind, N, k, prec)
        hit = b is not None
        if b is None:
            b = build_basis(N, k, prec) if kind == "Gamma" else build_gamma1_basis(N, k, prec)
            self.save(b)
        dt = time.perf_counter() - t
        log.info("basis %s N=%d k=%d prec=%d: %s in %.3fs", kind, N, k, prec, "hit" if hit else "built", dt)
        return b, hit, dt

    def entries(self) -> list[Path]:
        if not self.dir.exists():
            return []
        return sorted(self.dir.glob("*.json"))

    def inspect(self) -> list[dict]:
        out = []
        for p in self.entries():
            try:
                doc = json.loads(p.read_text())
                ok = _checksum(doc["payload"]) == doc.get("sha256") and doc.get("version") == FORMAT_VERSION
                meta = json.loads(doc["payload"])
                out.append({"file": p.name, "kind": meta["kind"], "N": meta["N"], "k": meta["k"],
                            "prec": meta["prec"], "rank": len(meta["expansions"]), "valid": ok})
            except (ValueError, KeyError):
                out.append({"file": p.name, "valid": False})
        return out

    def purge(self) -> int:
        n = 0
        with self._lock():
            for p in self.entries():
                p.unlink()
                n += 1
        clear_basis_cache()
        return n

    def install(self) -> None:
        """Route the engine's basis lookups through this cache."""
        use_basis_store(self)
