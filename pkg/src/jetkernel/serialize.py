"""JSON codecs for algebras, spaces, morphisms, pairs, chains, and the workspace file."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

from .errors import ParseError, ShapeError
from .factorization import (
    EquivalenceChain,
    FactorizationPair,
    NotEquivalent,
    RelationStep,
    WitnessSpan,
)
from .formal import FormalMorphism, FormalSpace
from .jets import TruncatedProPlot
from .polyring import Polynomial
from .weil import DEFAULT_K_MAX, POINT, WeilAlgebra, make_weil


def algebra_to_json(A: WeilAlgebra) -> dict:
    return {"d": A.d, "vars": list(A.vars), "generators": [str(g) for g in A.generators],
            "name": A.name}


def algebra_from_json(data: dict, k_max: int = DEFAULT_K_MAX) -> WeilAlgebra:
    try:
        d = int(data["d"])
        gens = [Polynomial.parse(g, data.get("vars")) for g in data.get("generators", [])]
    except KeyError as e:
        raise ParseError(f"algebra record lacks field {e}") from None
    return make_weil(d, gens, k_max=k_max, vars=data.get("vars"), name=data.get("name", ""))


def space_to_json(S: FormalSpace) -> dict:
    out = {"params": list(S.params), "name": S.name}
    if not S.is_cartesian():
        out["thickening"] = algebra_to_json(S.thickening)
    return out


def morphism_to_json(f: FormalMorphism) -> dict:
    return {"source": space_to_json(f.source), "target": space_to_json(f.target),
            "components": [str(c) for c in f.components]}


def pair_to_json(p: FactorizationPair) -> dict:
    return {"iota": morphism_to_json(p.iota), "f": morphism_to_json(p.f)}


def step_to_json(s: RelationStep) -> dict:
    return {"kind": s.kind, "direction": s.direction,
            "from": pair_to_json(s.from_pair), "to": pair_to_json(s.to_pair),
            "connecting": morphism_to_json(s.connecting), "verification": s.verify()}


def span_to_json(span: WitnessSpan) -> dict:
    return {
        "W": space_to_json(span.W),
        "alpha": morphism_to_json(span.alpha),
        "alpha_prime": morphism_to_json(span.alpha_prime),
        "phi": morphism_to_json(span.phi),
        "delta": [str(d) for d in span.delta],
        "mu": [[str(m) for m in row] for row in span.mu],
        "h": [str(h) for h in span.h],
        "verification": dict(span.verification),
    }


def decision_to_json(result) -> dict:
    if isinstance(result, NotEquivalent):
        return {"equivalent": False,
                "first_differing_component": result.first_differing_component}
    assert isinstance(result, EquivalenceChain)
    out = {"equivalent": True, "length": len(result.steps),
           "steps": [step_to_json(s) for s in result.steps]}
    if result.span is not None:
        out["span"] = span_to_json(result.span)
    return out


def family_to_json(F: TruncatedProPlot) -> dict:
    return {"source": space_to_json(F.source), "levels": [morphism_to_json(m) for m in F.levels]}


@dataclass
class Workspace:
    """Named objects plus run configuration, persisted as one JSON document."""

    algebras: dict = field(default_factory=dict)
    spaces: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    pairs: dict = field(default_factory=dict)
    config: dict = field(default_factory=lambda: {"k_max": DEFAULT_K_MAX, "K": 8})

    KINDS = ("algebras", "spaces", "morphisms", "pairs")

    def _kind_of(self, name: str):
        for kind in self.KINDS:
            if name in getattr(self, kind):
                return kind
        return None

    def add(self, kind: str, name: str, obj, replace: bool = False) -> None:
        other = self._kind_of(name)
        if other is not None and not (replace and other == kind):
            raise ShapeError(f"name {name!r} is already used by an entry of {other}")
        getattr(self, kind)[name] = obj

    def get(self, kind: str, name: str):
        try:
            return getattr(self, kind)[name]
        except KeyError:
            raise ShapeError(f"no entry {name!r} among {kind}") from None

    # -- decoding with references by name --

    def _algebra(self, ref):
        if ref is None:
            return POINT
        if isinstance(ref, str):
            return self.get("algebras", ref)
        return algebra_from_json(ref, self.config.get("k_max", DEFAULT_K_MAX))

    def _space(self, ref) -> FormalSpace:
        if isinstance(ref, str):
            return self.get("spaces", ref)
        try:
            return FormalSpace(tuple(ref["params"]), self._algebra(ref.get("thickening")),
                               ref.get("name", ""))
        except KeyError as e:
            raise ParseError(f"space record lacks field {e}") from None

    def _morphism(self, ref) -> FormalMorphism:
        if isinstance(ref, str):
            return self.get("morphisms", ref)
        try:
            src, tgt = self._space(ref["source"]), self._space(ref["target"])
            comps = tuple(Polynomial.parse(c, src.coords) if isinstance(c, str) else c
                          for c in ref["components"])
        except KeyError as e:
            raise ParseError(f"morphism record lacks field {e}") from None
        return FormalMorphism(src, tgt, comps)

    def _pair(self, ref) -> FactorizationPair:
        if isinstance(ref, str):
            return self.get("pairs", ref)
        try:
            return FactorizationPair(self._morphism(ref["iota"]), self._morphism(ref["f"]))
        except KeyError as e:
            raise ParseError(f"pair record lacks field {e}") from None

    @classmethod
    def from_json(cls, data: dict) -> "Workspace":
        ws = cls()
        ws.config.update(data.get("config", {}))
        for kind, decode in (("algebras", ws._algebra), ("spaces", ws._space),
                             ("morphisms", ws._morphism), ("pairs", ws._pair)):
            for name, rec in sorted(data.get(kind, {}).items()):
                ws.add(kind, name, decode(rec))
        return ws

    def to_json(self) -> dict:
        return {
            "config": dict(self.config),
            "algebras": {k: algebra_to_json(v) for k, v in self.algebras.items()},
            "spaces": {k: space_to_json(v) for k, v in self.spaces.items()},
            "morphisms": {k: morphism_to_json(v) for k, v in self.morphisms.items()},
            "pairs": {k: pair_to_json(v) for k, v in self.pairs.items()},
        }

    def decode(self, kind: str, record):
        return {"algebras": self._algebra, "spaces": self._space,
                "morphisms": self._morphism, "pairs": self._pair}[kind](record)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e})") from None


def load_workspace(path: str) -> Workspace:
    if not os.path.exists(path):
        return Workspace()
    return Workspace.from_json(load_json(path))


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the same directory so failures leave no partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".jetkernel-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
