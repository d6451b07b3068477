"""JSON spec documents: named objects plus per-command task sections.

Objects can be referenced by name (a string key of the matching section) or
given inline.  Pullbacks come either in the structured
``{"coordinate", "terms": [{"alpha", "poly"}]}`` layout or compactly as
objects keyed by comma-separated exponent strings (``""`` is the empty
monomial, Berezin keys read ``"alpha|beta"``).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .atlas import Chart, Transition, make_glued_manifold
from .domains import BerezinVector, Box, Domain, DomainMorphism
from .errors import SpecError
from .galgebra import AlgebraMorphism, GrassmannAlgebra, make_algebra
from .points import LambdaPoint, TangentVector
from .polynomials import BasePolynomial, RationalFunction

SECTIONS = ("algebras", "domains", "morphisms", "berezin", "algebra_morphisms", "points", "tangents",
            "manifolds")


def _index(text: str, size: int) -> tuple:
    text = text.strip()
    if not text:
        return (0,) * size
    try:
        out = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise SpecError(f"bad multi-index {text!r}") from None
    if len(out) != size:
        raise SpecError(f"multi-index {text!r} needs {size} entries")
    return out


def _box(bounds):
    if bounds is None:
        return None
    return Box(tuple((Fraction(str(lo)), Fraction(str(hi))) for lo, hi in bounds))


def _coefficient(value, nvars):
    if isinstance(value, dict):
        if set(value) != {"num", "den"}:
            raise SpecError("rational coefficients need exactly 'num' and 'den'")
        return RationalFunction(
            BasePolynomial.parse(str(value["num"]), nvars), BasePolynomial.parse(str(value["den"]), nvars)
        )
    if isinstance(value, str):
        return BasePolynomial.parse(value, nvars)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return BasePolynomial.constant(nvars, Fraction(str(value)))
    raise SpecError(f"bad coefficient {value!r}")


class SpecDocument:
    def __init__(self, data: dict, truncation: int = 6):
        if not isinstance(data, dict):
            raise SpecError("spec document must be a JSON object")
        self.data = data
        self.version = str(data.get("version", "1"))
        self.truncation = truncation
        self._cache: dict = {}
        for name in SECTIONS:
            section = data.get(name, {})
            if not isinstance(section, dict):
                raise SpecError(f"section {name!r} must be an object of named entries")

    @classmethod
    def load(cls, path, truncation: int = 6) -> SpecDocument:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise SpecError(f"cannot read {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path} is not valid JSON: {exc}") from None
        return cls(data, truncation)

    def section(self, name):
        return self.data.get(name)

    # -- resolution ---------------------------------------------------------

    def _resolve(self, kind, ref, build):
        if isinstance(ref, str):
            key = (kind, ref)
            if key not in self._cache:
                entries = self.data.get(kind, {})
                if ref not in entries:
                    raise SpecError(f"unknown {kind[:-1]} {ref!r}")
                self._cache[key] = build(entries[ref])
            return self._cache[key]
        if isinstance(ref, dict):
            return build(ref)
        raise SpecError(f"bad {kind[:-1]} reference {ref!r}")

    def _need(self, obj, *keys):
        missing = [k for k in keys if k not in obj]
        if missing:
            raise SpecError(f"missing field(s) {missing} in {obj}")

    def algebra(self, ref) -> GrassmannAlgebra:
        def build(obj):
            self._need(obj, "n", "q")
            return make_algebra(int(obj["n"]), obj["q"], int(obj.get("K", self.truncation)))

        return self._resolve("algebras", ref, build)

    def domain(self, ref) -> Domain:
        def build(obj):
            self._need(obj, "p", "q")
            return Domain(int(obj["p"]), tuple(obj["q"]), _box(obj.get("box")))

        return self._resolve("domains", ref, build)

    def _families(self, source: Domain, target: Domain, fams, berezin=False):
        """Per-coordinate coefficient families in either accepted layout.

        Compact: a list of ``{"alpha" or "alpha|beta": coefficient}`` objects
        in coordinate order.  Structured: ``{"coordinate": "y1", "terms":
        [{"alpha": [...], "beta": [...], "poly": ...}]}`` entries in any order.
        """
        if not isinstance(fams, list):
            raise SpecError("pullbacks must be a list")
        names = target.coordinate_names()
        out = [dict() for _ in names]
        for pos, fam in enumerate(fams):
            if not isinstance(fam, dict):
                raise SpecError("each pullback entry must be an object")
            if "terms" in fam:
                name = fam.get("coordinate", names[pos] if pos < len(names) else None)
                if name not in names:
                    raise SpecError(f"unknown target coordinate {name!r}; have {names}")
                slot = out[names.index(name)]
                for term in fam["terms"]:
                    self._need(term, "poly")
                    alpha = tuple(int(v) for v in term.get("alpha", [0] * source.nformal))
                    coef = _coefficient(term["poly"], source.p)
                    if berezin:
                        beta = tuple(int(v) for v in term.get("beta", [0] * source.p))
                        slot[(alpha, beta)] = coef
                    else:
                        slot[alpha] = coef
                continue
            if pos >= len(names):
                raise SpecError(f"too many pullbacks: target has {len(names)} coordinates")
            for key, value in fam.items():
                if berezin:
                    if "|" not in key:
                        raise SpecError(f"Berezin key {key!r} must look like 'alpha|beta'")
                    a, b = key.split("|", 1)
                    out[pos][(_index(a, source.nformal), _index(b, source.p))] = _coefficient(value, source.p)
                else:
                    out[pos][_index(key, source.nformal)] = _coefficient(value, source.p)
        return out

    def morphism(self, ref) -> DomainMorphism:
        def build(obj):
            self._need(obj, "source", "target", "pullbacks")
            src, tgt = self.domain(obj["source"]), self.domain(obj["target"])
            return DomainMorphism(
                src, tgt, self._families(src, tgt, obj["pullbacks"]),
                int(obj.get("truncation", self.truncation)),
            )

        return self._resolve("morphisms", ref, build)

    def berezin(self, ref) -> BerezinVector:
        def build(obj):
            self._need(obj, "source", "target", "coefficients")
            src, tgt = self.domain(obj["source"]), self.domain(obj["target"])
            return BerezinVector(
                src, tgt, self._families(src, tgt, obj["coefficients"], berezin=True),
                int(obj.get("truncation", self.truncation)),
            )

        return self._resolve("berezin", ref, build)

    def algebra_morphism(self, ref) -> AlgebraMorphism:
        def build(obj):
            self._need(obj, "source", "target", "images")
            return AlgebraMorphism(self.algebra(obj["source"]), self.algebra(obj["target"]),
                                   [str(v) for v in obj["images"]])

        return self._resolve("algebra_morphisms", ref, build)

    def _coordinates(self, kind, ref, cls):
        def build(obj):
            self._need(obj, "domain", "algebra", "base")
            dom, alg = self.domain(obj["domain"]), self.algebra(obj["algebra"])
            souls = obj.get("even_souls", ["0"] * dom.p)
            formal = obj.get("formal", ["0"] * dom.nformal)
            base = [Fraction(str(v)) for v in obj["base"]]
            return cls(dom, alg, base, [str(s) for s in souls], [str(s) for s in formal])

        return self._resolve(kind, ref, build)

    def point(self, ref) -> LambdaPoint:
        return self._coordinates("points", ref, LambdaPoint)

    def tangent(self, ref) -> TangentVector:
        return self._coordinates("tangents", ref, TangentVector)

    def manifold(self, ref):
        def build(obj):
            self._need(obj, "charts", "transitions")
            charts = []
            for c in obj["charts"]:
                self._need(c, "index", "p", "q", "box")
                charts.append(Chart(int(c["index"]), Domain(int(c["p"]), tuple(c["q"]), _box(c["box"]))))
            by_index = {c.index: c for c in charts}
            transitions = []
            for t in obj["transitions"]:
                self._need(t, "from", "to", "overlap", "pullbacks")
                a, b = by_index.get(t["from"]), by_index.get(t["to"])
                if a is None or b is None:
                    raise SpecError(f"transition refers to an unknown chart: {t['from']}->{t['to']}")
                src = a.domain.restrict(_box(t["overlap"]))
                tgt = b.domain.restrict(_box(t.get("overlap_target", t["overlap"])))
                morph = DomainMorphism(src, tgt, self._families(src, tgt, t["pullbacks"]),
                                       int(t.get("truncation", self.truncation)))
                transitions.append(Transition(a.index, b.index, morph))
            return make_glued_manifold(charts, transitions, self.truncation)

        return self._resolve("manifolds", ref, build)
