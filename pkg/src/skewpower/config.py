"""Ring-tower configuration: a small line-oriented section format.

    # comment
    [base]
    family = truncpoly
    p = 2
    m = 4

    [layer]              # repeatable; each adds one skew power series variable
    var = y
    N = 3
    tau.x = x + x^2      # generator images; generators not listed are fixed
    delta = tau-minus-id # zero | tau-minus-id | per-generator delta.<gen> = ...
    q = 1                # optional commutation scalar (expression)

    [suite]
    run = ring-axioms, theta

    [budget]
    elements = 4096
    samples = 200
    validation = 10000
    seed = 0
    max_order = 64

Every error carries the offending line number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .builders import (
    QuantumMatrixReport,
    QuantumMatrixSpec,
    build_delta_tau_minus_id,
    build_quantum_matrices,
    build_quantum_plane,
    build_swap_product,
    skew_from_images,
)
from .expr import ExpressionError
from .filtered import FilteredRing, RingError, SkewData, SkewDataError, TruncPoly, ZMod, validate_skew_data
from .series import SeriesRing


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        prefix = "" if line is None else f"line {line}: "
        super().__init__(prefix + message)
        self.line = line


FAMILIES = {
    "zmod": {"p", "m"},
    "truncpoly": {"p", "m", "var"},
    "product": {"p", "t"},
    "quantum-plane": {"p", "q", "N"},
    "quantum-matrices": {"n", "lambda", "p", "N", "relation_form"},
}
LAYER_KEYS = {"var", "N", "tau", "delta", "q"}
BUDGET_KEYS = {"elements": 4096, "samples": 200, "validation": 10_000, "seed": 0, "max_order": 64}


@dataclass
class Section:
    name: str
    line: int
    entries: dict = field(default_factory=dict)  # key -> (value, line)

    def get(self, key, default=None):
        return self.entries[key][0] if key in self.entries else default

    def line_of(self, key) -> int:
        return self.entries[key][1] if key in self.entries else self.line

    def integer(self, key, default=None) -> int:
        if key not in self.entries:
            if default is None:
                raise ConfigError(f"[{self.name}] needs {key}", self.line)
            return default
        value, line = self.entries[key]
        try:
            return int(value, 0)
        except ValueError:
            raise ConfigError(f"malformed integer {value!r} for {key}", line) from None


@dataclass
class RingTowerConfig:
    base: Section
    layers: list[Section]
    suites: list[str]
    budget: dict
    suite_line: int | None = None


_SECTION = re.compile(r"^\[([A-Za-z_-]+)\]$")
_ENTRY = re.compile(r"^([A-Za-z_][\w.]*)\s*=\s*(.*)$")


def parse_config(text: str) -> RingTowerConfig:
    sections: list[Section] = []
    current: Section | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            name = m.group(1)
            if name not in ("base", "layer", "suite", "budget"):
                raise ConfigError(f"unknown section [{name}]", lineno)
            if name != "layer" and any(s.name == name for s in sections):
                raise ConfigError(f"duplicate section [{name}]", lineno)
            current = Section(name, lineno)
            sections.append(current)
            continue
        m = _ENTRY.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if current is None:
            raise ConfigError("entry outside any section", lineno)
        key, value = m.group(1), m.group(2).strip()
        if key in current.entries:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        current.entries[key] = (value, lineno)

    bases = [s for s in sections if s.name == "base"]
    if not bases:
        raise ConfigError("missing [base] section")
    base = bases[0]
    family = base.get("family")
    if family is None:
        raise ConfigError("[base] needs family", base.line)
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}", base.line_of("family"))
    for key in base.entries:
        if key == "family" or key in FAMILIES[family]:
            continue
        if family == "quantum-matrices" and re.fullmatch(r"p\.\d\d", key):
            continue
        raise ConfigError(f"unknown key {key!r} for family {family}", base.line_of(key))
    for key in base.entries:
        if key not in ("family", "var", "relation_form"):
            base.integer(key)

    layers = [s for s in sections if s.name == "layer"]
    for layer in layers:
        for key in layer.entries:
            head = key.split(".", 1)[0]
            if head not in LAYER_KEYS:
                raise ConfigError(f"unknown layer key {key!r}", layer.line_of(key))

    budget = dict(BUDGET_KEYS)
    suites: list[str] = []
    suite_line = None
    for s in sections:
        if s.name == "budget":
            for key in s.entries:
                if key not in BUDGET_KEYS:
                    raise ConfigError(f"unknown budget key {key!r}", s.line_of(key))
                budget[key] = s.integer(key)
                if budget[key] < 0:
                    raise ConfigError(f"budget {key} must be nonnegative", s.line_of(key))
        if s.name == "suite":
            suite_line = s.line
            for key in s.entries:
                if key != "run":
                    raise ConfigError(f"unknown suite key {key!r}", s.line_of(key))
            suites = [x.strip() for x in s.get("run", "").split(",") if x.strip()]

    cfg = RingTowerConfig(base, layers, suites, budget, suite_line)
    precision_sections = layers + ([base] if "N" in FAMILIES[family] else [])
    for layer in precision_sections:
        N = layer.integer("N")
        if N < 1:
            raise ConfigError("layer precision N must be >= 1", layer.line_of("N"))
        if N > budget["max_order"]:
            raise ConfigError(
                f"precision overflow: N = {N} exceeds max_order = {budget['max_order']}", layer.line_of("N")
            )
    return cfg


# ---------------------------------------------------------------------------


@dataclass
class Tower:
    """A built ring tower: the base ring, its series layers, and side data."""

    family: str
    base: FilteredRing
    layers: list[SeriesRing]
    budget: dict
    alpha: object = None
    quantum: QuantumMatrixReport | None = None
    plane_q: int | None = None

    @property
    def top(self) -> FilteredRing:
        return self.layers[-1] if self.layers else self.base


def build_base(base: Section, budget: dict) -> Tower:
    family = base.get("family")
    try:
        if family == "zmod":
            R = ZMod(base.integer("p"), base.integer("m"))
            return Tower(family, R, [], budget)
        if family == "truncpoly":
            R = TruncPoly(base.integer("p"), base.integer("m"), base.get("var", "x"))
            return Tower(family, R, [], budget)
        if family == "product":
            R, alpha = build_swap_product(base.integer("p"), base.integer("t"))
            return Tower(family, R, [], budget, alpha=alpha)
        if family == "quantum-plane":
            N = base.integer("N")
            if N > budget["max_order"]:
                raise ConfigError(f"precision overflow: N = {N}", base.line_of("N"))
            q = base.integer("q")
            T = build_quantum_plane(base.integer("p"), q, N, budget=budget["validation"])
            return Tower(family, T.base.base, [T.base, T], budget, plane_q=q)
        if family == "quantum-matrices":
            params = {}
            for key in base.entries:
                if key.startswith("p."):
                    i, j = int(key[2]), int(key[3])
                    params[(i, j)] = base.integer(key)
            N = base.integer("N")
            if N > budget["max_order"]:
                raise ConfigError(f"precision overflow: N = {N}", base.line_of("N"))
            spec = QuantumMatrixSpec(
                base.integer("n"),
                base.integer("lambda"),
                base.integer("p"),
                N,
                params,
                base.get("relation_form", "standard"),
            )
            top, report = build_quantum_matrices(spec, budget=min(budget["validation"], 200), seed=budget["seed"])
            layers = []
            ring = top
            while isinstance(ring, SeriesRing):
                layers.append(ring)
                ring = ring.base
            return Tower(family, ring, layers[::-1], budget, quantum=report)
    except (RingError, SkewDataError) as exc:
        raise ConfigError(str(exc), base.line) from None
    raise ConfigError(f"unknown family {family!r}", base.line)


def _parse_element(R: FilteredRing, text: str, section: Section, key: str):
    try:
        return R.parse(text)
    except (ExpressionError, RingError) as exc:
        raise ConfigError(f"cannot read {key} = {text!r}: {exc}", section.line_of(key)) from None


def build_layer(R: FilteredRing, layer: Section, budget: dict) -> SeriesRing:
    N = layer.integer("N")
    var = layer.get("var", "y")
    if var in R.generators():
        raise ConfigError(f"variable {var!r} already used", layer.line_of("var"))
    gens = R.generators()
    tau_keys = {k for k in layer.entries if k.startswith("tau.")}
    delta_keys = {k for k in layer.entries if k.startswith("delta.")}
    for k in tau_keys | delta_keys:
        if k.split(".", 1)[1] not in gens:
            raise ConfigError(f"{k}: no generator {k.split('.', 1)[1]!r}", layer.line_of(k))
    if layer.get("tau", "id") != "id":
        raise ConfigError("tau must be 'id' or given per generator as tau.<gen>", layer.line_of("tau"))
    delta_mode = layer.get("delta", "zero")
    if delta_mode not in ("zero", "tau-minus-id"):
        raise ConfigError(f"unknown delta {delta_mode!r}", layer.line_of("delta"))
    if delta_keys and "delta" in layer.entries:
        raise ConfigError("give either delta = ... or delta.<gen> images, not both", layer.line_of("delta"))
    q = _parse_element(R, layer.get("q"), layer, "q") if "q" in layer.entries else None

    try:
        if not tau_keys and not delta_keys and delta_mode in ("zero", "tau-minus-id"):
            skew = SkewData.trivial(R, max_order=budget["max_order"])
            if q is not None and q != R.one:
                skew = SkewData(R, skew.tau, skew.tau_inverse, skew.delta, q=q, max_order=budget["max_order"])
        else:
            tau_imgs = [
                _parse_element(R, layer.get(f"tau.{g}"), layer, f"tau.{g}") if f"tau.{g}" in layer.entries else v
                for g, v in gens.items()
            ]
            if delta_mode == "tau-minus-id":
                base = skew_from_images(R, tau_imgs)
                skew = build_delta_tau_minus_id(R, base.tau, base.tau_inverse, budget=budget["validation"])
            else:
                delta_imgs = None
                if delta_keys:
                    delta_imgs = [
                        _parse_element(R, layer.get(f"delta.{g}"), layer, f"delta.{g}")
                        if f"delta.{g}" in layer.entries
                        else R.zero
                        for g in gens
                    ]
                if q is None and delta_imgs is None:
                    q = R.one
                skew = skew_from_images(R, tau_imgs, delta_imgs, q=q, label="configured")
        skew = SkewData(
            R, skew.tau, skew.tau_inverse, skew.delta, q=skew.q if q is None else q,
            label=skew.label, max_order=budget["max_order"],
        )
        report = validate_skew_data(R, skew, budget=budget["validation"], seed=budget["seed"])
    except (RingError, SkewDataError, NotImplementedError) as exc:
        raise ConfigError(f"layer {var}: {exc}", layer.line) from None
    if not report.ok:
        failed = ", ".join(c.law for c in report.failures())
        raise ConfigError(f"layer {var}: skew data fails {failed}", layer.line)
    return SeriesRing(skew, N, var)


def build_tower(cfg: RingTowerConfig) -> Tower:
    tower = build_base(cfg.base, cfg.budget)
    ring = tower.top
    for layer in cfg.layers:
        ring = build_layer(ring, layer, cfg.budget)
        tower.layers.append(ring)
    return tower
