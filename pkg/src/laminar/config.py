"""INI experiment configuration with line-aware diagnostics."""

from __future__ import annotations

import configparser
import hashlib
import json
import re
from dataclasses import asdict, dataclass, field

from .errors import ConfigurationError
from .lamination import LeafFamily

DEFAULT_FAMILIES = "product, shear:0.5, exp:0.2, nonlinear:0.05"


def parse_family(desc: str, R: float = 1.0):
    """``product``, ``shear:A``, ``exp:LAM``, ``nonlinear:EPS`` or ``cubic`` (the planar counterexample)."""
    desc = desc.strip()
    name, _, arg = desc.partition(":")
    name = name.strip().lower()
    try:
        if name == "product":
            return LeafFamily.product(R=R)
        if name == "cubic":
            return "cubic"
        val = complex(arg.strip().replace(" ", ""))
        if name == "shear":
            return LeafFamily.shear(val, R=R)
        if name == "exp":
            return LeafFamily.exp(val, R=R)
        if name == "nonlinear":
            if val.imag != 0:
                raise ValueError("eps must be real")
            return LeafFamily.nonlinear(val.real, R=R)
    except ValueError as exc:
        raise ConfigurationError(f"bad family descriptor {desc!r}: {exc}") from None
    raise ConfigurationError(f"unknown family {name!r}")


def _floats(s):
    return [float(x) for x in re.split(r"[,\s]+", s.strip()) if x]


def _ints(s):
    return [int(x) for x in re.split(r"[,\s]+", s.strip()) if x]


def _words(s):
    return [x.strip() for x in s.split(",") if x.strip()]


def _atoms(s):
    """``re:im:weight; re:im:weight``"""
    out = []
    for chunk in s.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 3:
            raise ValueError(f"atom {chunk!r} is not re:im:weight")
        out.append([float(parts[0]), float(parts[1]), float(parts[2])])
    return out


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


@dataclass
class ExperimentConfig:
    seed: int = 42
    out: str = "results"
    jobs: int = 1
    families: list = field(default_factory=lambda: _words(DEFAULT_FAMILIES))
    R: float = 1.0
    N: int = 2
    # estimates
    schwarz_samples: int = 100_000
    two_leaf_samples: int = 10_000
    delta0_samples: int = 20_000
    separation_deltas: list = field(default_factory=lambda: [0.2, 0.1, 0.05])
    # smooth
    delta_list: list = field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    targets: list = field(default_factory=lambda: ["re", "im", "composite"])
    error_samples: int = 4000
    chart_centers: list = field(default_factory=lambda: [0.0])
    # currents
    quad_order: int = 64
    n_currents: int = 10
    atoms_per_current: int = 3
    atoms: list = field(default_factory=list)
    n_forms: int = 10
    defect_tol: float = 1e-8
    control_family: str = "shear:0.5"
    control_threshold: float = 1e-3
    recon_family: str = "shear:0.5"
    recon_atoms: int = 5
    recon_forms: int = 5
    mc_samples: int = 100_000
    bins: int = 64
    recon_tol: float = 0.02
    closedness_tol: float = 1e-4
    tilt: float = 0.8
    # counterexample
    mass_bound: float = 10.0
    eps_list: list = field(default_factory=lambda: [1e-2, 1e-3, 1e-4, 1e-5])
    cubic_deltas: list = field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    mollifier_radii: list = field(default_factory=lambda: [0.01, 0.05, 0.2])
    poly_degrees: list = field(default_factory=lambda: [2, 4, 6, 8, 10])
    tangency_ts: list = field(default_factory=lambda: [-0.8, 0.0, 0.37, 0.9])

    def validate(self):
        for name in ("schwarz_samples", "two_leaf_samples", "delta0_samples", "error_samples", "mc_samples"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.jobs < 1:
            raise ConfigurationError("jobs must be at least 1")
        if self.N < 2:
            raise ConfigurationError("N must be at least 2")
        for name in ("delta_list", "separation_deltas", "cubic_deltas", "eps_list"):
            v = getattr(self, name)
            if not v or any(b >= a for a, b in zip(v, v[1:])) or min(v) <= 0:
                raise ConfigurationError(f"{name} must be positive and strictly decreasing")
        for t in self.targets:
            if t not in ("re", "im", "composite", "kinked"):
                raise ConfigurationError(f"targets: unknown target {t!r}")
        if self.n_currents < 0 or self.atoms_per_current < 0 or self.n_forms < 0:
            raise ConfigurationError("current and form counts must be nonnegative")
        for fam in self.family_objects():
            if fam != "cubic":
                fam.validate()
        return self

    def family_objects(self):
        return [parse_family(f, self.R) for f in self.families]

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        """sha256 of the canonical JSON form; the output directory is excluded."""
        d = self.to_dict()
        d.pop("out")
        d.pop("jobs")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


# key -> (section, parser)
_SCHEMA = {
    "seed": ("general", int), "out": ("general", str), "jobs": ("general", int),
    "families": ("family", _words), "R": ("family", float), "N": ("family", int),
    "schwarz_samples": ("estimates", int), "two_leaf_samples": ("estimates", int),
    "delta0_samples": ("estimates", int), "separation_deltas": ("estimates", _floats),
    "delta_list": ("smooth", _floats), "targets": ("smooth", _words), "error_samples": ("smooth", int),
    "chart_centers": ("smooth", _floats),
    "quad_order": ("currents", int), "n_currents": ("currents", int), "atoms_per_current": ("currents", int),
    "atoms": ("currents", _atoms), "n_forms": ("currents", int), "defect_tol": ("currents", float),
    "control_family": ("currents", str), "control_threshold": ("currents", float),
    "recon_family": ("currents", str), "recon_atoms": ("currents", int), "recon_forms": ("currents", int),
    "mc_samples": ("currents", int), "bins": ("currents", int), "recon_tol": ("currents", float),
    "closedness_tol": ("currents", float), "tilt": ("currents", float),
    "mass_bound": ("counterexample", float), "eps_list": ("counterexample", _floats),
    "cubic_deltas": ("counterexample", _floats), "mollifier_radii": ("counterexample", _floats),
    "poly_degrees": ("counterexample", _ints), "tangency_ts": ("counterexample", _floats),
}


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            current = m.group(1).strip()
            continue
        if current == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return n
    return None


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse INI text; errors name the offending line."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigurationError(f"{source}: {exc}") from None
    known_sections = {s for s, _ in _SCHEMA.values()}
    by_section = {}
    for key, (sec, _) in _SCHEMA.items():
        by_section.setdefault(sec, {})[key.lower()] = key
    kwargs = {}
    for sec in cp.sections():
        if sec not in known_sections:
            raise ConfigurationError(f"{source}:{_line_of_section(text, sec)}: unknown section [{sec}]")
        for raw_key, raw_val in cp.items(sec):
            key = by_section[sec].get(raw_key.lower())
            line = _line_of(text, sec, raw_key)
            if key is None:
                raise ConfigurationError(f"{source}:{line}: unknown key {raw_key!r} in [{sec}]")
            try:
                kwargs[key] = _SCHEMA[key][1](raw_val)
            except ValueError as exc:
                raise ConfigurationError(f"{source}:{line}: bad value for {key}: {exc}") from None
    cfg = ExperimentConfig(**kwargs)
    try:
        return cfg.validate()
    except ConfigurationError as exc:
        msg = str(exc)
        line = None
        for key, (sec, _) in _SCHEMA.items():
            if msg.startswith(key) and key in kwargs:
                line = _line_of(text, sec, key)
                break
        where = f"{source}:{line}" if line else source
        raise ConfigurationError(f"{where}: {msg}") from None


def _line_of_section(text, sec):
    for n, line in enumerate(text.splitlines(), 1):
        if line.strip() == f"[{sec}]":
            return n
    return "?"


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def default_config_text() -> str:
    """A commented INI file with every key at its default."""
    cfg = ExperimentConfig()
    sections = {}
    for key, (sec, _) in _SCHEMA.items():
        v = getattr(cfg, key)
        if key == "atoms":
            s = "; ".join(":".join(str(x) for x in a) for a in v)
        elif isinstance(v, list):
            s = ", ".join(str(x) for x in v)
        else:
            s = str(v)
        sections.setdefault(sec, []).append(f"{key} = {s}")
    return "\n\n".join(f"[{sec}]\n" + "\n".join(lines) for sec, lines in sections.items()) + "\n"
