"""INI-style simulation configuration.

Sections and keys (all optional; defaults in brackets)::

    [grid]       xmin [0]  xmax [1]  ymin [0]  ymax [1]
                 resolution [40]        cells per unit length (``1/40`` also accepted)
                 closure [pml]          pml | periodic
                 resolutions [20,40,80,160]   convergence-study levels
                 reference [640]        convergence-study reference level
    [solver]     theta [0.8]  cfl [1]  t_end [0]  scheme [bfecc]
                 cfl_list [0.1,0.2,0.4,0.64,0.8,1]   t_list [3.8,6.8,9.8,12.8]
    [pec]        type [none]            none | disk | wedge | union
                 center [0.5,0.5]  radius [0.2]  bisector [pi]
                 members                union only: ``disk(cx, cy, r); wedge(cx, cy, r[, bisector])``
    [wave]       type [none]            none | gaussian | plane
                 sigma [0.1]  gamma [-0.1]  omega [2*pi/0.3]  window [causal]
    [pml]        thickness [10]  order [3]  r0 [1e-6]
    [extension]  ratio [0.2]  iterations [300]  tol [1e-12]
    [output]     fields [Ez,Hx,Hy]  heatmaps [true]  range [auto]  collar [0.1]

Comments start with ``#``. A ``section.key = value`` line may appear anywhere.

Numeric values may be arithmetic expressions in ``pi`` (``2*pi/0.3``).
"""

import ast
import math
import operator
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .boundary import GaussianPulse, NoWave, PlaneSine, PmlParams
from .errors import ConfigError
from .extension import ExtensionParams
from .grid import unit_grid
from .levelset import Disk, NoShape, Union, Wedge

SECTIONS = ("grid", "solver", "pec", "wave", "pml", "extension", "output")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_number(text):
    """Evaluate a numeric literal or a small arithmetic expression in ``pi``."""

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValueError(f"not a number: {text!r}")

    try:
        value = ev(ast.parse(text.strip(), mode="eval").body)
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"not a number: {text!r}") from exc
    return float(value)


def _number_list(text):
    return [parse_number(p) for p in text.split(",") if p.strip()]


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _resolution(text):
    frac = Fraction(text.strip())
    if frac <= 0:
        raise ValueError("resolution must be positive")
    n = 1 / frac if frac < 1 else frac
    if n.denominator != 1:
        raise ValueError(f"resolution must be 1/n or n for an integer n, got {text!r}")
    return int(n)


def _resolution_list(text):
    return [_resolution(p) for p in text.split(",") if p.strip()]


def _shape_member(text):
    m = re.fullmatch(r"\s*(disk|wedge)\s*\(([^)]*)\)\s*", text)
    if not m:
        raise ValueError(f"bad union member {text!r}; expected disk(cx, cy, r) or wedge(cx, cy, r[, bisector])")
    args = _number_list(m.group(2))
    if m.group(1) == "disk":
        if len(args) != 3:
            raise ValueError("disk member takes cx, cy, r")
        return Disk((args[0], args[1]), args[2])
    if len(args) not in (3, 4):
        raise ValueError("wedge member takes cx, cy, r[, bisector]")
    return Wedge((args[0], args[1]), args[2], *args[3:])


# key -> converter, default
_SCHEMA = {
    "grid": {
        "xmin": (parse_number, 0.0), "xmax": (parse_number, 1.0),
        "ymin": (parse_number, 0.0), "ymax": (parse_number, 1.0),
        "resolution": (_resolution, 40), "closure": (str, "pml"),
        "resolutions": (_resolution_list, [20, 40, 80, 160]), "reference": (_resolution, 640),
    },
    "solver": {
        "theta": (parse_number, 0.8), "cfl": (parse_number, 1.0), "t_end": (parse_number, 0.0),
        "scheme": (str, "bfecc"),
        "cfl_list": (_number_list, [0.1, 0.2, 0.4, 0.64, 0.8, 1.0]),
        "t_list": (_number_list, [3.8, 6.8, 9.8, 12.8]),
    },
    "pec": {
        "type": (str, "none"), "center": (_number_list, [0.5, 0.5]), "radius": (parse_number, 0.2),
        "bisector": (parse_number, math.pi), "members": (str, ""),
    },
    "wave": {
        "type": (str, "none"), "sigma": (parse_number, 0.1), "gamma": (parse_number, -0.1),
        "omega": (parse_number, 2 * math.pi / 0.3), "window": (str, "causal"),
    },
    "pml": {"thickness": (int, 10), "order": (int, 3), "r0": (parse_number, 1e-6)},
    "extension": {"ratio": (parse_number, 0.2), "iterations": (int, 300), "tol": (parse_number, 1e-12)},
    "output": {
        "fields": (lambda s: [f.strip() for f in s.split(",") if f.strip()], ["Ez", "Hx", "Hy"]),
        "heatmaps": (_bool, True), "range": (str, "auto"), "collar": (parse_number, 0.1),
    },
}


@dataclass
class SimConfig:
    domain: tuple = (0.0, 1.0, 0.0, 1.0)
    resolution: int = 40
    closure: str = "pml"
    resolutions: list = field(default_factory=lambda: [20, 40, 80, 160])
    reference: int = 640
    theta: float = 0.8
    cfl: float = 1.0
    t_end: float = 0.0
    scheme: str = "bfecc"
    cfl_list: list = field(default_factory=lambda: [0.1, 0.2, 0.4, 0.64, 0.8, 1.0])
    t_list: list = field(default_factory=lambda: [3.8, 6.8, 9.8, 12.8])
    shape: object = field(default_factory=NoShape)
    wave: object = field(default_factory=NoWave)
    pml: PmlParams = field(default_factory=PmlParams)
    extension: ExtensionParams = field(default_factory=ExtensionParams)
    output_fields: list = field(default_factory=lambda: ["Ez", "Hx", "Hy"])
    heatmaps: bool = True
    heatmap_range: object = None
    collar: float = 0.1

    def with_(self, **kw):
        return replace(self, **kw)

    @property
    def dx(self):
        return 1.0 / self.resolution

    def grid(self, resolution=None):
        n = resolution if resolution is not None else self.resolution
        xmin, xmax, ymin, ymax = self.domain
        if self.closure == "periodic":
            return unit_grid(n, xmin, xmax, ymin, ymax, periodic=True)
        return unit_grid(n, xmin, xmax, ymin, ymax, pad=self.pml.thickness)

    def domain_slices(self, grid):
        """Index slices selecting the physical rectangle inside a padded grid."""
        if self.closure == "periodic":
            return slice(None), slice(None)
        p = self.pml.thickness
        return slice(p, grid.nx - p), slice(p, grid.ny - p)

    def build_solver(self, resolution=None):
        from .emcore import Solver

        grid = self.grid(resolution)
        domain = None if self.closure == "periodic" else self.domain
        return Solver(grid, self.shape, self.wave, self.closure, self.pml, self.extension, domain)

    def solver_params(self, resolution=None, cfl=None, t_end=None):
        from .emcore import SolverParams

        n = resolution if resolution is not None else self.resolution
        return SolverParams.from_cfl(1.0 / n, self.cfl if cfl is None else cfl,
                                     self.t_end if t_end is None else t_end, self.theta)


# --------------------------------------------------------------------------
# parsing


def _split_lines(text):
    """Yield ``(line_no, section, key, value)`` from INI text."""
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[\s*([A-Za-z_]+)\s*\]", line)
        if m:
            section = m.group(1).lower()
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}]", line=no)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=no)
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.lower()
        if "." in key:
            section_, key = key.split(".", 1)
            yield no, section_, key, value
            continue
        if section is None:
            raise ConfigError("key outside any section", key=key, line=no)
        yield no, section, key, value


def parse_config(text, overrides=()):
    """Parse INI text plus ``section.key=value`` overrides into a validated config."""
    raw = {s: {} for s in SECTIONS}
    entries = list(_split_lines(text))
    for ov in overrides:
        if "=" not in ov or "." not in ov.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {ov!r}")
        k, v = ov.split("=", 1)
        s, k = k.strip().lower().split(".", 1)
        entries.append(("from --override", s, k, v.strip()))

    for no, section, key, value in entries:
        dotted = f"{section}.{key}"
        if section not in _SCHEMA:
            raise ConfigError("unknown section", key=dotted, line=no)
        if key not in _SCHEMA[section]:
            raise ConfigError("unknown key", key=dotted, line=no)
        conv = _SCHEMA[section][key][0]
        try:
            raw[section][key] = (conv(value), no)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse {value!r}: {exc}", key=dotted, line=no) from None

    def get(section, key):
        entry = raw[section].get(key)
        if entry is None:
            return _SCHEMA[section][key][1], None
        return entry

    def check(cond, section, key, message):
        if not cond:
            raise ConfigError(message, key=f"{section}.{key}", line=get(section, key)[1])

    cfg = SimConfig()
    xmin, _ = get("grid", "xmin")
    xmax, _ = get("grid", "xmax")
    ymin, _ = get("grid", "ymin")
    ymax, _ = get("grid", "ymax")
    check(xmax > xmin, "grid", "xmax", "xmax must exceed xmin")
    check(ymax > ymin, "grid", "ymax", "ymax must exceed ymin")
    cfg.domain = (xmin, xmax, ymin, ymax)
    cfg.resolution = get("grid", "resolution")[0]
    closure = get("grid", "closure")[0].lower()
    check(closure in ("pml", "periodic"), "grid", "closure", "closure must be pml or periodic")
    cfg.closure = closure
    cfg.resolutions = get("grid", "resolutions")[0]
    cfg.reference = get("grid", "reference")[0]
    check(len(cfg.resolutions) > 0, "grid", "resolutions", "need at least one resolution")
    check(all(cfg.reference % n == 0 for n in cfg.resolutions), "grid", "reference",
          "reference resolution must be an integer multiple of every study resolution")
    for n in [cfg.resolution] + cfg.resolutions:
        nodes = min(round((xmax - xmin) * n), round((ymax - ymin) * n))
        check(nodes >= 4, "grid", "resolution", "grid needs at least 5 nodes per axis")

    cfg.theta = get("solver", "theta")[0]
    check(0.0 <= cfg.theta <= 1.0, "solver", "theta", "theta must lie in [0, 1]")
    cfg.cfl = get("solver", "cfl")[0]
    check(cfg.cfl > 0, "solver", "cfl", "CFL > 0 required")
    cfg.t_end = get("solver", "t_end")[0]
    check(cfg.t_end >= 0, "solver", "t_end", "terminal time must be >= 0")
    cfg.scheme = get("solver", "scheme")[0].lower()
    check(cfg.scheme in ("bfecc", "forward"), "solver", "scheme", "scheme must be bfecc or forward")
    cfg.cfl_list = get("solver", "cfl_list")[0]
    check(all(c > 0 for c in cfg.cfl_list), "solver", "cfl_list", "CFL > 0 required")
    cfg.t_list = get("solver", "t_list")[0]
    check(all(t >= 0 for t in cfg.t_list), "solver", "t_list", "terminal times must be >= 0")

    kind = get("pec", "type")[0].lower()
    center, _ = get("pec", "center")
    radius, _ = get("pec", "radius")
    bisector, _ = get("pec", "bisector")
    check(len(center) == 2, "pec", "center", "center needs two coordinates")
    try:
        if kind == "none":
            cfg.shape = NoShape()
        elif kind == "disk":
            cfg.shape = Disk(tuple(center), radius)
        elif kind == "wedge":
            cfg.shape = Wedge(tuple(center), radius, bisector)
        elif kind == "union":
            members = [m for m in get("pec", "members")[0].split(";") if m.strip()]
            check(len(members) > 0, "pec", "members", "union needs at least one member")
            cfg.shape = Union(tuple(_shape_member(m) for m in members))
        else:
            raise ConfigError("pec type must be none, disk, wedge or union", key="pec.type",
                              line=get("pec", "type")[1])
    except ValueError as exc:
        raise ConfigError(str(exc), key="pec." + ("members" if kind == "union" else "radius"),
                          line=get("pec", "members" if kind == "union" else "radius")[1]) from None

    wkind = get("wave", "type")[0].lower()
    try:
        if wkind == "none":
            cfg.wave = NoWave()
        elif wkind == "gaussian":
            cfg.wave = GaussianPulse(get("wave", "sigma")[0], get("wave", "gamma")[0])
        elif wkind == "plane":
            cfg.wave = PlaneSine(get("wave", "omega")[0], get("wave", "window")[0].lower())
        else:
            raise ConfigError("wave type must be none, gaussian or plane", key="wave.type",
                              line=get("wave", "type")[1])
    except ValueError as exc:
        raise ConfigError(str(exc), key="wave." + wkind, line=get("wave", "type")[1]) from None

    try:
        cfg.pml = PmlParams(get("pml", "thickness")[0], get("pml", "order")[0], get("pml", "r0")[0])
    except ValueError as exc:
        raise ConfigError(str(exc), key="pml", line=None) from None
    try:
        cfg.extension = ExtensionParams(get("extension", "ratio")[0], get("extension", "iterations")[0],
                                        get("extension", "tol")[0])
    except ValueError as exc:
        raise ConfigError(str(exc), key="extension", line=None) from None

    cfg.output_fields = get("output", "fields")[0]
    for f in cfg.output_fields:
        check(f in ("Ez", "Hx", "Hy"), "output", "fields", f"unknown field {f!r}")
    cfg.heatmaps = get("output", "heatmaps")[0]
    rng = get("output", "range")[0].strip().lower()
    if rng == "auto":
        cfg.heatmap_range = None
    else:
        try:
            lo, hi = _number_list(rng)
        except ValueError:
            raise ConfigError("range must be 'auto' or 'lo, hi'", key="output.range",
                              line=get("output", "range")[1]) from None
        check(lo < hi, "output", "range", "range needs lo < hi")
        cfg.heatmap_range = (lo, hi)
    cfg.collar = get("output", "collar")[0]
    check(cfg.collar > 0, "output", "collar", "collar width must be positive")

    _validate_geometry(cfg, get)
    return cfg


def _bounding_disk(shape):
    return shape.center, shape.radius


def _validate_geometry(cfg, get):
    shape = cfg.shape
    if isinstance(shape, NoShape):
        return
    line = get("pec", "type")[1]
    box = shape.bbox()
    xmin, xmax, ymin, ymax = cfg.domain
    c = cfg.collar
    if box[0] < xmin + c or box[1] > xmax - c or box[2] < ymin + c or box[3] > ymax - c:
        raise ConfigError("conductor must clear the domain boundary by at least the collar width",
                          key="pec.type", line=line)
    if isinstance(shape, Union):
        ms = shape.members
        for a in range(len(ms)):
            for b in range(a + 1, len(ms)):
                (ca, ra), (cb, rb) = _bounding_disk(ms[a]), _bounding_disk(ms[b])
                if math.dist(ca, cb) <= ra + rb:
                    raise ConfigError("union members must not overlap", key="pec.members",
                                      line=get("pec", "members")[1])


def load_config(path, overrides=()):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


# --------------------------------------------------------------------------
# rendering


def _fmt(x):
    return repr(float(x))


def _fmt_list(xs):
    return ", ".join(_fmt(x) for x in xs)


def _member(shape):
    if isinstance(shape, Disk):
        return f"disk({_fmt(shape.center[0])}, {_fmt(shape.center[1])}, {_fmt(shape.radius)})"
    return (f"wedge({_fmt(shape.center[0])}, {_fmt(shape.center[1])}, {_fmt(shape.radius)}, "
            f"{_fmt(shape.bisector)})")


def render_config(cfg):
    """Canonical INI text; ``parse_config(render_config(c)) == c``."""
    xmin, xmax, ymin, ymax = cfg.domain
    lines = [
        "[grid]",
        f"xmin = {_fmt(xmin)}", f"xmax = {_fmt(xmax)}", f"ymin = {_fmt(ymin)}", f"ymax = {_fmt(ymax)}",
        f"resolution = {cfg.resolution}", f"closure = {cfg.closure}",
        f"resolutions = {', '.join(str(n) for n in cfg.resolutions)}", f"reference = {cfg.reference}",
        "", "[solver]",
        f"theta = {_fmt(cfg.theta)}", f"cfl = {_fmt(cfg.cfl)}", f"t_end = {_fmt(cfg.t_end)}",
        f"scheme = {cfg.scheme}", f"cfl_list = {_fmt_list(cfg.cfl_list)}", f"t_list = {_fmt_list(cfg.t_list)}",
        "", "[pec]",
    ]
    s = cfg.shape
    if isinstance(s, NoShape):
        lines.append("type = none")
    elif isinstance(s, Disk):
        lines += ["type = disk", f"center = {_fmt_list(s.center)}", f"radius = {_fmt(s.radius)}"]
    elif isinstance(s, Wedge):
        lines += ["type = wedge", f"center = {_fmt_list(s.center)}", f"radius = {_fmt(s.radius)}",
                  f"bisector = {_fmt(s.bisector)}"]
    else:
        lines += ["type = union", "members = " + "; ".join(_member(m) for m in s.members)]
    lines += ["", "[wave]"]
    w = cfg.wave
    if isinstance(w, GaussianPulse):
        lines += ["type = gaussian", f"sigma = {_fmt(w.sigma)}", f"gamma = {_fmt(w.gamma)}"]
    elif isinstance(w, PlaneSine):
        lines += ["type = plane", f"omega = {_fmt(w.omega)}", f"window = {w.window}"]
    else:
        lines.append("type = none")
    p, e = cfg.pml, cfg.extension
    rng = "auto" if cfg.heatmap_range is None else _fmt_list(cfg.heatmap_range)
    lines += [
        "", "[pml]", f"thickness = {p.thickness}", f"order = {p.order}", f"r0 = {_fmt(p.r0)}",
        "", "[extension]", f"ratio = {_fmt(e.ratio)}", f"iterations = {e.iterations}", f"tol = {_fmt(e.tol)}",
        "", "[output]", f"fields = {', '.join(cfg.output_fields)}",
        f"heatmaps = {'true' if cfg.heatmaps else 'false'}", f"range = {rng}", f"collar = {_fmt(cfg.collar)}",
    ]
    return "\n".join(lines) + "\n"
