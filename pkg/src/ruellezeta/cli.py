"""Command line front end: config files, dispatch, CSV artifacts.

Configs are flat ``key = value`` lines.  Every produced CSV carries its
full effective configuration in ``#`` header lines, so the file alone
suffices to re-run the job, and reruns are byte identical.
"""

import argparse
import math
import sys
from dataclasses import dataclass, field

from .cycle import CycleError, WeightError, build_cache
from .grids import GridError, RefinementSpec, base_grid, section_grid
from .schottky import (SchottkyError, build_funneled_torus,
                       build_three_funnel, count_closed_words,
                       cyclic_classes, validate_surface)
from .spectra import SpectraError, scan_rectangle
from .symmetry import (SymmetryError, klein_four_three_funnel,
                       klein_four_torus, orbit_representatives,
                       trivial_group, validate_group)
from .weights import WeightSpec

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

SURFACE_TYPES = ("funneled_torus", "three_funnel")
SYMMETRY_MODES = ("trivial", "full")
GRID_MODES = ("full", "level1", "explicit")
WEIGHT_KINDS = ("constant", "gauss_base", "gauss_section")
METRICS = ("cayley_angular", "euclidean")


class ConfigError(ValueError):
    """Config rejection; carries the offending line when there is one."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


@dataclass
class RunConfig:
    """Validated run parameters with every applied default made explicit."""

    surface_type: str = ""
    l1: float = 0.0
    l2: float = 0.0
    l3: float = None
    phi: float = None
    symmetry: str = ""
    nmax: int = 7
    sigma: float = None
    lambda0: complex = None
    resolution: int = 50
    grid_mode: str = "full"
    letters: tuple = None
    bounds_minus: tuple = None
    bounds_plus: tuple = None
    region: tuple = None
    scan_window: tuple = None
    scan_cell: float = 0.1
    weight_kind: str = None
    metric: str = "cayley_angular"
    output: str = None
    defaults_applied: tuple = field(default_factory=tuple)

    def effective_items(self):
        """Flat key/value view of everything a run depends on."""
        items = [("surface.type", self.surface_type),
                 ("surface.l1", self.l1), ("surface.l2", self.l2)]
        if self.l3 is not None:
            items.append(("surface.l3", self.l3))
        if self.phi is not None:
            items.append(("surface.phi", self.phi))
        items += [("symmetry", self.symmetry), ("nmax", self.nmax)]
        if self.sigma is not None:
            items.append(("sigma", self.sigma))
        if self.lambda0 is not None:
            items += [("lambda0.re", self.lambda0.real),
                      ("lambda0.im", self.lambda0.imag)]
        items += [("grid.resolution", self.resolution),
                  ("grid.mode", self.grid_mode)]
        if self.letters is not None:
            items.append(("grid.letters", "%d,%d" % self.letters))
        if self.bounds_minus is not None:
            items.append(("grid.bounds_minus", _fmt_bounds(self.bounds_minus)))
        if self.bounds_plus is not None:
            items.append(("grid.bounds_plus", _fmt_bounds(self.bounds_plus)))
        if self.region is not None:
            for key, val in zip(("xmin", "xmax", "ymin", "ymax"), self.region):
                items.append(("grid.%s" % key, val))
        if self.scan_window is not None:
            for key, val in zip(("re_min", "re_max", "im_min", "im_max"),
                                self.scan_window):
                items.append(("scan.%s" % key, val))
            items.append(("scan.cell", self.scan_cell))
        if self.weight_kind is not None:
            items.append(("weight.kind", self.weight_kind))
        items.append(("metric", self.metric))
        if self.output is not None:
            items.append(("output", self.output))
        return items


def _fmt(value):
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def _fmt_bounds(axis):
    return ";".join("%.17g:%.17g" % pair for pair in axis)


def _parse_bounds(raw):
    pairs = []
    for chunk in raw.split(";"):
        lo, sep, hi = chunk.partition(":")
        if not sep:
            raise ValueError("expected lo:hi")
        pairs.append((float(lo), float(hi)))
    return tuple(pairs)


def _parse_letters(raw):
    parts = raw.split(",")
    if len(parts) != 2:
        raise ValueError("expected two letters")
    return tuple(int(p) for p in parts)


# key -> (parser, validator description).  Validators run per line so the
# error can cite the line number.
_SCHEMA = {
    "surface.type": (str, lambda v: v in SURFACE_TYPES,
                     "one of %s" % (SURFACE_TYPES,)),
    "surface.l1": (float, lambda v: v > 0, "positive"),
    "surface.l2": (float, lambda v: v > 0, "positive"),
    "surface.l3": (float, lambda v: v > 0, "positive"),
    "surface.phi": (float, lambda v: 0 < v < math.pi, "in (0, pi)"),
    "symmetry": (str, lambda v: v in SYMMETRY_MODES,
                 "one of %s" % (SYMMETRY_MODES,)),
    "nmax": (int, lambda v: v >= 1, ">= 1"),
    "sigma": (float, lambda v: v > 0, "positive"),
    "lambda0.re": (float, lambda v: True, ""),
    "lambda0.im": (float, lambda v: True, ""),
    "grid.resolution": (int, lambda v: v >= 2, ">= 2"),
    "grid.mode": (str, lambda v: v in GRID_MODES,
                  "one of %s" % (GRID_MODES,)),
    "grid.letters": (_parse_letters, lambda v: all(k >= 0 for k in v),
                     "non-negative letters"),
    "grid.bounds_minus": (_parse_bounds,
                          lambda v: all(lo < hi for lo, hi in v),
                          "increasing lo:hi pairs"),
    "grid.bounds_plus": (_parse_bounds,
                         lambda v: all(lo < hi for lo, hi in v),
                         "increasing lo:hi pairs"),
    "grid.xmin": (float, lambda v: True, ""),
    "grid.xmax": (float, lambda v: True, ""),
    "grid.ymin": (float, lambda v: v > 0, "positive (upper half-plane)"),
    "grid.ymax": (float, lambda v: v > 0, "positive (upper half-plane)"),
    "scan.re_min": (float, lambda v: True, ""),
    "scan.re_max": (float, lambda v: True, ""),
    "scan.im_min": (float, lambda v: True, ""),
    "scan.im_max": (float, lambda v: True, ""),
    "scan.cell": (float, lambda v: v > 0, "positive"),
    "weight.kind": (str, lambda v: v in WEIGHT_KINDS,
                    "one of %s" % (WEIGHT_KINDS,)),
    "metric": (str, lambda v: v in METRICS, "one of %s" % (METRICS,)),
    "output": (str, lambda v: bool(v), "non-empty"),
}

_REQUIRED = ("surface.type", "surface.l1", "surface.l2")


def parse_config(text):
    """Parse and validate a flat ``key = value`` config."""
    values = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = (part.strip() for part in line.partition("="))
        if not sep or not key:
            raise ConfigError("expected 'key = value'", lineno)
        if key not in _SCHEMA:
            raise ConfigError("unknown key %r" % key, lineno)
        if key in values:
            raise ConfigError("duplicate key %r (first at line %d)"
                              % (key, lines[key]), lineno)
        parser, check, expect = _SCHEMA[key]
        try:
            parsed = parser(val)
        except ValueError as exc:
            raise ConfigError("invalid value for %s: %s" % (key, exc),
                              lineno) from exc
        if not check(parsed):
            raise ConfigError("%s must be %s, got %r" % (key, expect, val),
                              lineno)
        values[key] = parsed
        lines[key] = lineno

    for key in _REQUIRED:
        if key not in values:
            raise ConfigError("missing required key %r" % key)
    return _assemble(values, lines)


def _assemble(values, lines):
    cfg = RunConfig()
    defaults = []
    cfg.surface_type = values["surface.type"]
    cfg.l1 = values["surface.l1"]
    cfg.l2 = values["surface.l2"]
    cfg.l3 = values.get("surface.l3")
    cfg.phi = values.get("surface.phi")
    if cfg.surface_type == "funneled_torus":
        if cfg.phi is None:
            raise ConfigError("funneled_torus requires surface.phi")
        if cfg.l3 is not None:
            raise ConfigError("surface.l3 does not apply to funneled_torus",
                              lines["surface.l3"])
        symmetric = cfg.l1 == cfg.l2
    else:
        if cfg.l3 is None:
            raise ConfigError("three_funnel requires surface.l3")
        if cfg.phi is not None:
            raise ConfigError("surface.phi does not apply to three_funnel",
                              lines["surface.phi"])
        symmetric = cfg.l1 == cfg.l2 == cfg.l3

    if "symmetry" in values:
        cfg.symmetry = values["symmetry"]
        if cfg.symmetry == "full" and not symmetric:
            raise ConfigError("symmetry = full needs equal length parameters",
                              lines["symmetry"])
    else:
        cfg.symmetry = "full" if symmetric else "trivial"
        defaults.append("symmetry=%s" % cfg.symmetry)

    if "nmax" in values:
        cfg.nmax = values["nmax"]
    else:
        defaults.append("nmax=7")
    cfg.sigma = values.get("sigma")

    has_re, has_im = "lambda0.re" in values, "lambda0.im" in values
    if has_re != has_im:
        missing = "lambda0.im" if has_re else "lambda0.re"
        raise ConfigError("missing %s (lambda0 needs both parts)" % missing)
    if has_re:
        cfg.lambda0 = complex(values["lambda0.re"], values["lambda0.im"])

    if "grid.resolution" in values:
        cfg.resolution = values["grid.resolution"]
    else:
        defaults.append("grid.resolution=50")
    if "grid.mode" in values:
        cfg.grid_mode = values["grid.mode"]
    else:
        defaults.append("grid.mode=full")
    cfg.letters = values.get("grid.letters")
    cfg.bounds_minus = values.get("grid.bounds_minus")
    cfg.bounds_plus = values.get("grid.bounds_plus")
    if cfg.grid_mode == "level1" and cfg.letters is None:
        raise ConfigError("grid.mode = level1 requires grid.letters",
                          lines["grid.mode"])
    if cfg.grid_mode == "explicit" and (cfg.bounds_minus is None
                                        or cfg.bounds_plus is None):
        raise ConfigError("grid.mode = explicit requires grid.bounds_minus "
                          "and grid.bounds_plus", lines["grid.mode"])

    region_keys = ("grid.xmin", "grid.xmax", "grid.ymin", "grid.ymax")
    present = [k for k in region_keys if k in values]
    if present and len(present) != 4:
        raise ConfigError("base region needs all of %s" % (region_keys,),
                          lines[present[0]])
    if present:
        region = tuple(values[k] for k in region_keys)
        if not (region[0] < region[1] and region[2] < region[3]):
            raise ConfigError("degenerate base region", lines[present[0]])
        cfg.region = region

    scan_keys = ("scan.re_min", "scan.re_max", "scan.im_min", "scan.im_max")
    present = [k for k in scan_keys if k in values]
    if present and len(present) != 4:
        raise ConfigError("scan window needs all of %s" % (scan_keys,),
                          lines[present[0]])
    if present:
        window = tuple(values[k] for k in scan_keys)
        if not (window[0] < window[1] and window[2] <= window[3]):
            raise ConfigError("degenerate scan window", lines[present[0]])
        cfg.scan_window = window
    if "scan.cell" in values:
        cfg.scan_cell = values["scan.cell"]
    elif cfg.scan_window is not None:
        defaults.append("scan.cell=0.1")

    cfg.weight_kind = values.get("weight.kind")
    if "metric" in values:
        cfg.metric = values["metric"]
    else:
        defaults.append("metric=cayley_angular")
    cfg.output = values.get("output")
    cfg.defaults_applied = tuple(defaults)
    return cfg


# ---------------------------------------------------------------------------
# model construction

def build_surface(cfg):
    if cfg.surface_type == "funneled_torus":
        return build_funneled_torus(cfg.l1, cfg.l2, cfg.phi)
    return build_three_funnel(cfg.l1, cfg.l2, cfg.l3)


def build_group(cfg, surface):
    if cfg.symmetry == "trivial":
        return trivial_group(surface.rank)
    if cfg.surface_type == "funneled_torus":
        return klein_four_torus(surface)
    return klein_four_three_funnel(surface)


def _refinement(cfg):
    if cfg.grid_mode == "level1":
        return RefinementSpec(mode="level1", letters=cfg.letters)
    if cfg.grid_mode == "explicit":
        return RefinementSpec(mode="explicit",
                              bounds=(cfg.bounds_minus, cfg.bounds_plus))
    return RefinementSpec()


def _require(cfg, command, **keys):
    for key, value in keys.items():
        if value is None:
            raise ConfigError("%s requires the %r config key"
                              % (command, key))


# ---------------------------------------------------------------------------
# CSV output

def write_csv(path, command, cfg, metadata, header, rows):
    """One self-describing artifact; rerunning the header reproduces it."""
    out = ["# command=%s" % command]
    out += ["# config.%s=%s" % (key, _fmt(val))
            for key, val in cfg.effective_items()]
    out += ["# %s=%s" % (key, _fmt(val)) for key, val in metadata.items()]
    out.append(header)
    out.extend(rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def _grid_rows(grid, section):
    rows = []
    if section:
        for (xm, xp), val, ok in zip(grid.coords, grid.values, grid.mask):
            rows.append("%.17g,%.17g,%.17g,%.17g,%d"
                        % (xm, xp, val.real, val.imag, int(ok)))
    else:
        for z, val, ok in zip(grid.coords, grid.values, grid.mask):
            rows.append("%.17g,%.17g,%.17g,%.17g,%d"
                        % (z.real, z.imag, val.real, val.imag, int(ok)))
    return rows


# ---------------------------------------------------------------------------
# commands

def cmd_surface_validate(cfg, stdout):
    surface = build_surface(cfg)
    validate_surface(surface)
    stdout.write("surface %s: valid Schottky data\n" % surface.describe())
    group = build_group(cfg, surface)
    if group.size > 1:
        validate_group(surface, group)
        stdout.write("symmetry group: %d elements, %d characters, "
                     "relations hold\n" % (group.size, len(group.characters)))
    else:
        stdout.write("symmetry group: trivial\n")
    return EXIT_OK


def cmd_words_stats(cfg, stdout):
    surface = build_surface(cfg)
    group = build_group(cfg, surface)
    reps = orbit_representatives(surface, group, cfg.nmax)
    stdout.write("n  closed  classes  primitive  orbit_reps\n")
    for n in range(1, cfg.nmax + 1):
        classes = cyclic_classes(surface, n)
        primitive = sum(1 for c in classes if c.primitive)
        n_reps = sum(1 for r in reps if r.n_w == n)
        stdout.write("%-2d %7d %8d %10d %11d\n"
                     % (n, count_closed_words(surface.rank, n),
                        len(classes), primitive, n_reps))
    return EXIT_OK


def cmd_resonances(cfg, stdout):
    _require(cfg, "resonances", output=cfg.output,
             **{"scan.re_min": cfg.scan_window})
    surface = build_surface(cfg)
    group = build_group(cfg, surface)
    if cfg.weight_kind is not None and cfg.weight_kind != "constant":
        raise ConfigError("resonance scans use the constant weight")
    cache = build_cache(surface, group, cfg.nmax, WeightSpec(kind="constant"))
    found = scan_rectangle(cache, cfg.scan_window, cell=cfg.scan_cell)
    rows = ["%.17g,%.17g,%s,%d,%.17g"
            % (r.location.real, r.location.imag, r.character, r.order,
               r.newton_residual) for r in found]
    meta = {"surface": surface.describe(), "symmetry": cfg.symmetry,
            "nmax": cfg.nmax, "zeros": len(rows)}
    write_csv(cfg.output, "resonances", cfg, meta,
              "re,im,character,order,newton_residual", rows)
    stdout.write("wrote %d resonance rows to %s\n" % (len(rows), cfg.output))
    return EXIT_OK


def _distribution_common(cfg, command, expected_kind):
    _require(cfg, command, output=cfg.output, sigma=cfg.sigma,
             **{"lambda0.re": cfg.lambda0})
    if cfg.weight_kind is not None and cfg.weight_kind != expected_kind:
        raise ConfigError("%s uses weight.kind = %s" % (command,
                                                        expected_kind))
    surface = build_surface(cfg)
    return surface, build_group(cfg, surface)


def cmd_distribution_section(cfg, stdout):
    surface, group = _distribution_common(cfg, "distribution-section",
                                          "gauss_section")
    grid = section_grid(surface, group, cfg.lambda0, cfg.sigma,
                        cfg.resolution, _refinement(cfg), n=cfg.nmax,
                        metric=cfg.metric)
    write_csv(cfg.output, "distribution-section", cfg, grid.metadata,
              "x_minus,x_plus,re,im,ok", _grid_rows(grid, section=True))
    stdout.write("wrote %d section rows to %s\n"
                 % (len(grid.coords), cfg.output))
    return EXIT_OK


def cmd_distribution_base(cfg, stdout):
    surface, group = _distribution_common(cfg, "distribution-base",
                                          "gauss_base")
    _require(cfg, "distribution-base", **{"grid.xmin": cfg.region})
    grid = base_grid(surface, group, cfg.lambda0, cfg.sigma, cfg.resolution,
                     cfg.region, n=cfg.nmax)
    write_csv(cfg.output, "distribution-base", cfg, grid.metadata,
              "x,y,re,im,mask", _grid_rows(grid, section=False))
    stdout.write("wrote %d base rows to %s\n" % (len(grid.coords), cfg.output))
    return EXIT_OK


_COMMANDS = {
    "resonances": cmd_resonances,
    "distribution-section": cmd_distribution_section,
    "distribution-base": cmd_distribution_base,
    "words-stats": cmd_words_stats,
    "surface-validate": cmd_surface_validate,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; keep 2 for numerical
    # failures only
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, "%s: error: %s\n" % (self.prog, message))


def main(argv=None):
    parser = _Parser(prog="ruellezeta",
                     description="Resonances and invariant Ruelle "
                                 "distributions of Schottky surfaces")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="path to a key = value config file")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print("cannot read config: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION

    try:
        cfg = parse_config(text)
        return _COMMANDS[args.command](cfg, sys.stdout)
    except (ConfigError, SchottkyError, SymmetryError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except (GridError, CycleError, WeightError, SpectraError) as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        if "no determinant factor vanishes" in str(exc) \
                or "not located" in str(exc):
            print("hint: lambda0 must be a located determinant zero; run "
                  "the resonances command first", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print("i/o failure: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
