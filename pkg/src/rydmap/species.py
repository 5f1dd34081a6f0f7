"""Species data: quantum-defect tables loaded from small text files.

A species file is a flat key-value format, one assignment per line:

    # Rubidium 87
    name = Rb87
    mass = 86.909180527
    core_radius = 2.0
    l_max = 3
    defect s1/2 = 3.1311804  0.1784
    defect p3/2 = 2.6416737  0.2950

``defect <term> = delta0 delta2`` gives the Rydberg-Ritz coefficients for one
(l, j) series; the term uses the spectroscopic letter and j as a fraction.
Series not listed (up to l_max) default to zero defect, which makes a file
with no defect lines a hydrogen-like model.  The library never hard-codes
defect values; they always come from a file.

The n-dependent quantum defect is the two-term Rydberg-Ritz expansion

    delta(n) = delta0 + delta2 / (n - delta0)^2.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

SPECTROSCOPIC_LETTERS = "spdfghiklmnoq"


class SpeciesError(ValueError):
    """Malformed or physically inconsistent species file."""


@dataclass(frozen=True)
class DefectSeries:
    """Rydberg-Ritz coefficients for one (l, j) series."""
    delta0: float
    delta2: float = 0.0


@dataclass(frozen=True)
class SpeciesModel:
    """Validated quantum-defect model for one species.

    defects maps (l, 2j) to a DefectSeries; every series with l <= l_max is
    present (zero-filled when the file omits it).  core_radius (a0) bounds
    radial integration from below; mass (amu) is carried for provenance and
    is not used by the solver.
    """
    name: str
    mass: float
    core_radius: float
    l_max: int
    defects: dict[tuple[int, int], DefectSeries] = field(default_factory=dict)

    def defect_series(self, l: int, j: float) -> DefectSeries:
        key = (l, round(2 * j))
        if key in self.defects:
            return self.defects[key]
        if l > self.l_max:
            warnings.warn(
                f"{self.name}: no defect data for l={l} > l_max={self.l_max}, "
                "using zero defect",
                stacklevel=3,
            )
        return DefectSeries(0.0, 0.0)


def quantum_defect(model: SpeciesModel, n: int, l: int, j: float) -> float:
    """n-dependent quantum defect delta0 + delta2/(n - delta0)^2."""
    if n <= l:
        raise ValueError(f"require n > l, got n={n}, l={l}")
    series = model.defect_series(l, j)
    if series.delta0 == 0.0 and series.delta2 == 0.0:
        return 0.0
    return series.delta0 + series.delta2 / (n - series.delta0) ** 2


def _parse_term(term: str) -> tuple[int, int]:
    """'s1/2' -> (l=0, 2j=1); 'd3/2' -> (2, 3)."""
    letter = term[0].lower()
    if letter not in SPECTROSCOPIC_LETTERS:
        raise SpeciesError(f"unknown orbital letter in term {term!r}")
    l = SPECTROSCOPIC_LETTERS.index(letter)
    try:
        j = Fraction(term[1:])
    except (ValueError, ZeroDivisionError) as exc:
        raise SpeciesError(f"cannot parse j in term {term!r}") from exc
    two_j = j * 2
    if two_j.denominator != 1 or two_j.numerator % 2 == 0:
        raise SpeciesError(f"j must be half-integer in term {term!r}")
    two_j = int(two_j)
    if not abs(2 * l - 1) <= two_j <= 2 * l + 1:
        raise SpeciesError(f"j inconsistent with l in term {term!r}")
    return l, two_j


def _format_term(l: int, two_j: int) -> str:
    return f"{SPECTROSCOPIC_LETTERS[l]}{two_j}/2"


def _validate(model: SpeciesModel) -> SpeciesModel:
    if model.core_radius <= 0:
        raise SpeciesError("core_radius must be positive")
    if model.mass <= 0:
        raise SpeciesError("mass must be positive")
    if model.l_max < 3:
        raise SpeciesError("l_max must be at least 3 (f series needed for "
                           "d-state channels)")
    for (l, two_j), series in model.defects.items():
        if l > model.l_max:
            raise SpeciesError(f"defect entry {_format_term(l, two_j)} exceeds "
                               f"l_max={model.l_max}")
        for v in (series.delta0, series.delta2):
            if v != v or abs(v) == float("inf"):
                raise SpeciesError("defect coefficients must be finite")
    # Physical ordering: quantum defects shrink as l grows.  Zero-defect
    # (hydrogenic) entries are exempt so an all-zero file stays valid.
    by_l: dict[int, list[float]] = {}
    for (l, _), series in model.defects.items():
        by_l.setdefault(l, []).append(series.delta0)
    present = sorted(l for l, vals in by_l.items() if any(v != 0 for v in vals))
    for l_low, l_high in zip(present, present[1:]):
        if min(by_l[l_low]) < max(by_l[l_high]):
            raise SpeciesError(
                f"delta0 must decrease with l: l={l_low} has "
                f"{min(by_l[l_low])}, l={l_high} has {max(by_l[l_high])}"
            )
    return model


def load_species(path: str | Path) -> SpeciesModel:
    """Parse and validate a species file."""
    path = Path(path)
    if not path.exists():
        raise SpeciesError(f"species file not found: {path}")
    scalars: dict[str, str] = {}
    defects: dict[tuple[int, int], DefectSeries] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpeciesError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key.startswith("defect"):
            term = key[len("defect"):].strip()
            parts = value.split()
            if len(parts) not in (1, 2):
                raise SpeciesError(f"{path}:{lineno}: defect wants 'delta0 "
                                   "[delta2]'")
            try:
                delta0 = float(parts[0])
                delta2 = float(parts[1]) if len(parts) == 2 else 0.0
            except ValueError as exc:
                raise SpeciesError(f"{path}:{lineno}: bad defect number") from exc
            lk = _parse_term(term)
            if lk in defects:
                raise SpeciesError(f"{path}:{lineno}: duplicate defect entry "
                                   f"{term}")
            defects[lk] = DefectSeries(delta0, delta2)
        else:
            if key in scalars:
                raise SpeciesError(f"{path}:{lineno}: duplicate key {key}")
            scalars[key] = value
    try:
        name = scalars["name"]
        mass = float(scalars["mass"])
        core_radius = float(scalars["core_radius"])
        l_max = int(scalars.get("l_max", "3"))
    except KeyError as exc:
        raise SpeciesError(f"{path}: missing required key {exc}") from exc
    except ValueError as exc:
        raise SpeciesError(f"{path}: bad scalar value ({exc})") from exc
    # fill every series up to l_max so lookups below l_max never warn
    for l in range(l_max + 1):
        for two_j in ({1} if l == 0 else {2 * l - 1, 2 * l + 1}):
            defects.setdefault((l, two_j), DefectSeries(0.0, 0.0))
    return _validate(SpeciesModel(name=name, mass=mass, core_radius=core_radius,
                                  l_max=l_max, defects=defects))


def save_species(model: SpeciesModel, path: str | Path) -> None:
    """Serialize a model back to the file format (round-trips exactly)."""
    lines = [
        f"name = {model.name}",
        f"mass = {model.mass!r}",
        f"core_radius = {model.core_radius!r}",
        f"l_max = {model.l_max}",
    ]
    for (l, two_j) in sorted(model.defects):
        series = model.defects[(l, two_j)]
        lines.append(f"defect {_format_term(l, two_j)} = "
                     f"{series.delta0!r} {series.delta2!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def bundled_species_path(name: str) -> Path:
    """Path of a species file shipped with the package (e.g. 'rb87')."""
    here = Path(__file__).parent / "data" / f"{name.lower()}.species"
    if not here.exists():
        raise SpeciesError(f"no bundled species file named {name!r}")
    return here
