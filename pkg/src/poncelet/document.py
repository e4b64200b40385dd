"""Scene documents: JSON serialization of scenes, traces and configurations.

One versioned JSON format covers every CLI artifact.  Complex numbers are
stored as [re, im] pairs; homogeneous vectors as length-3 lists of pairs;
conics as their 6 packed symmetric entries.  Floats round-trip exactly
(shortest-repr JSON), so serialize -> parse is lossless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .chains import PonceletScene
from .configurations import IncidenceConfiguration, incidence_configuration
from .constructions import ConstructionTrace
from .errors import DocumentError
from .projective import Conic, ProjLine, ProjMap, ProjPoint
from .settings import DEFAULT, check_precision

FORMAT = "poncelet-scene"
VERSION = 1


def _cplx(z: complex) -> list[float]:
    # +0.0 canonicalizes negative zeros, which would not survive a
    # parse -> normalize -> serialize cycle byte-identically
    return [z.real + 0.0, z.imag + 0.0]

def _to_cplx(v) -> complex:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise DocumentError(f"expected [re, im] pair, got {v!r}")
    return complex(v[0], v[1])


def _vec(coords) -> list[list[float]]:
    return [_cplx(z) for z in coords]


def _point(p: ProjPoint) -> list[list[float]]:
    return _vec(p.coords)


def _conic(c: Conic) -> list[list[float]]:
    return _vec(c.entries)


def _element_to_json(el) -> dict[str, Any]:
    if isinstance(el, ProjPoint):
        return {"kind": "point", "coords": _vec(el.coords)}
    if isinstance(el, ProjLine):
        return {"kind": "line", "coords": _vec(el.coords)}
    if isinstance(el, Conic):
        return {"kind": "conic", "entries": _vec(el.entries)}
    if isinstance(el, ProjMap):
        return {"kind": "map", "rows": [_vec(r) for r in el.rows]}
    raise DocumentError(f"unserializable trace element {type(el).__name__}")


def _element_from_json(d) -> Any:
    kind = d.get("kind")
    if kind == "point":
        return ProjPoint(tuple(_to_cplx(v) for v in d["coords"]))
    if kind == "line":
        return ProjLine(tuple(_to_cplx(v) for v in d["coords"]))
    if kind == "conic":
        return Conic(tuple(_to_cplx(v) for v in d["entries"]))
    if kind == "map":
        return ProjMap(tuple(tuple(_to_cplx(v) for v in row) for row in d["rows"]))
    raise DocumentError(f"unknown trace element kind {kind!r}")


@dataclass
class SceneDocument:
    """Everything one CLI invocation produced, in serializable form."""

    kind: str
    n: int | None = None
    seed: int | None = None
    command: str = ""
    precision: str = "double"
    tolerance: float = DEFAULT.rel
    scene: PonceletScene | None = None
    trace: ConstructionTrace | None = None
    residuals: dict[str, float] = field(default_factory=dict)
    configuration: IncidenceConfiguration | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "format": FORMAT,
            "version": VERSION,
            "kind": self.kind,
            "precision": self.precision,
            "tolerance": self.tolerance,
            "command": self.command,
        }
        if self.n is not None:
            out["n"] = self.n
        if self.seed is not None:
            out["seed"] = self.seed
        if self.scene is not None:
            out["scene"] = {
                "outer": _conic(self.scene.outer),
                "inner": _conic(self.scene.inner),
                "vertices": [_point(p) for p in self.scene.vertices],
                "touch_points": [_point(p) for p in self.scene.touch_points],
                "n": self.scene.n,
            }
        if self.trace is not None:
            out["trace"] = {
                "elements": {
                    k: _element_to_json(v) for k, v in sorted(self.trace.elements.items())
                },
                "branches": [[s, i] for s, i in self.trace.branches],
                "incidences": [list(t) for t in self.trace.incidences],
                "notes": list(self.trace.notes),
            }
        if self.residuals:
            out["residuals"] = dict(sorted(self.residuals.items()))
        if self.configuration is not None:
            cfg = self.configuration
            out["configuration"] = {
                "points": [_point(p) for p in cfg.points],
                "lines": [_vec(l.coords) for l in cfg.lines],
                "point_labels": cfg.point_labels,
                "line_labels": cfg.line_labels,
                "threshold": cfg.threshold,
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SceneDocument":
        if not isinstance(d, dict):
            raise DocumentError("document root must be an object")
        if d.get("format") != FORMAT:
            raise DocumentError(f"not a {FORMAT} document")
        if d.get("version") != VERSION:
            raise DocumentError(f"unsupported document version {d.get('version')!r}")
        doc = cls(
            kind=d.get("kind", ""),
            n=d.get("n"),
            seed=d.get("seed"),
            command=d.get("command", ""),
            precision=check_precision(d.get("precision", "double")),
            tolerance=float(d.get("tolerance", DEFAULT.rel)),
        )
        try:
            if "scene" in d:
                s = d["scene"]
                doc.scene = PonceletScene(
                    Conic(tuple(_to_cplx(v) for v in s["outer"])),
                    Conic(tuple(_to_cplx(v) for v in s["inner"])),
                    tuple(
                        ProjPoint(tuple(_to_cplx(v) for v in p)) for p in s["vertices"]
                    ),
                    tuple(
                        ProjPoint(tuple(_to_cplx(v) for v in p))
                        for p in s["touch_points"]
                    ),
                    s.get("n"),
                )
            if "trace" in d:
                t = d["trace"]
                tr = ConstructionTrace()
                for k, v in t.get("elements", {}).items():
                    tr.elements[k] = _element_from_json(v)
                tr.branches = [(s, int(i)) for s, i in t.get("branches", [])]
                tr.incidences = [tuple(x) for x in t.get("incidences", [])]
                tr.notes = list(t.get("notes", []))
                doc.trace = tr
            if "residuals" in d:
                doc.residuals = {k: float(v) for k, v in d["residuals"].items()}
            if "configuration" in d:
                c = d["configuration"]
                points = [ProjPoint(tuple(_to_cplx(v) for v in p)) for p in c["points"]]
                lines = [ProjLine(tuple(_to_cplx(v) for v in l)) for l in c["lines"]]
                doc.configuration = incidence_configuration(
                    points,
                    lines,
                    float(c.get("threshold", DEFAULT.incidence)),
                    c.get("point_labels"),
                    c.get("line_labels"),
                )
        except DocumentError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"malformed document: {exc}") from exc
        return doc

    @classmethod
    def from_json(cls, text: str) -> "SceneDocument":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(f"invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
        return cls.from_dict(data)
