"""Named material presets and config-file loading/saving.

Canonical internal units are meV for energies, nm for lengths and
dimensionless lattice wavevectors; every conversion (e.g. ueV -> meV)
happens exactly once, at construction. The config format is a flat
``key = value`` text file with ``#`` comments and explicit unit suffixes
on every numeric key; unknown keys are errors, not warnings, because
silent unit mistakes are the dominant failure mode in this domain.

Built-in presets:

* ``Cr2O3`` - uniaxial antiferromagnet. J = 15 meV, S = 3/2, K = 0.03 meV,
  a = 0.49607 nm, giving hbar_omega0 = 77.942... meV and a gap parameter
  delta = 2.0003e-3. The exact formula value of delta is stored; quoting
  it as "2e-3" is a rounding.
* ``YIG`` - ferrimagnetic insulator thin film. D/a^2 = 3.37645 meV with
  a = 1.2376 nm, H0 = 8.10373 ueV, hbar_omegaM = 20.3369 ueV,
  gaps 2.13191 / 41.98072 meV. Defaults D_z = D and l = 2.0; both are
  scan parameters and can be overridden.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union

from .dispersion import AfmParams, FerriParams
from .errors import InvariantViolation, ParseError, UnknownField, UnknownPreset

__all__ = [
    "MaterialPreset",
    "preset",
    "preset_names",
    "register_preset",
    "load_params",
    "save_params",
    "dumps_preset",
    "override_params",
]


@dataclass(frozen=True)
class MaterialPreset:
    """A named, unit-checked parameter bundle."""

    name: str
    kind: str  # "AFM" or "Ferrimagnet"
    params: Union[AfmParams, FerriParams]
    provenance: str = ""

    def __post_init__(self):
        if self.kind not in ("AFM", "Ferrimagnet"):
            raise InvariantViolation(f"kind must be AFM or Ferrimagnet, got {self.kind!r}")
        want = AfmParams if self.kind == "AFM" else FerriParams
        if not isinstance(self.params, want):
            raise InvariantViolation(
                f"kind {self.kind} requires {want.__name__} params"
            )


def _builtin_cr2o3() -> MaterialPreset:
    return MaterialPreset(
        name="Cr2O3",
        kind="AFM",
        params=AfmParams.from_couplings(J=15.0, S=1.5, K=0.03, a=0.49607),
        provenance="uniaxial antiferromagnet, nearest-neighbor Heisenberg estimate",
    )


def _builtin_yig() -> MaterialPreset:
    return MaterialPreset(
        name="YIG",
        kind="Ferrimagnet",
        params=FerriParams(
            H0=8.10373e-3,          # 8.10373 ueV
            delta_plus=2.13191,
            delta_minus=41.98072,
            D_over_a2=3.37645,
            Dz_over_a2=3.37645,     # default D_z = D
            l_exponent=2.0,         # default bulk-limit exponent
            hbar_omegaM=2.03369e-2,  # 20.3369 ueV
            a=1.2376,
        ),
        provenance="yttrium iron garnet thin film, block-spin estimate",
    )


_BUILTINS = {"Cr2O3": _builtin_cr2o3, "YIG": _builtin_yig}
_REGISTRY: Dict[str, MaterialPreset] = {}


def preset(name: str) -> MaterialPreset:
    """Return a built-in or user-registered preset by name."""
    if name in _BUILTINS:
        return _BUILTINS[name]()
    if name in _REGISTRY:
        return _REGISTRY[name]
    raise UnknownPreset(
        f"unknown preset {name!r}; available: {', '.join(preset_names())}"
    )


def preset_names():
    return sorted(set(_BUILTINS) | set(_REGISTRY))


def register_preset(p: MaterialPreset) -> None:
    """Register a preset under its name (overwrites a previous registration)."""
    if p.name in _BUILTINS:
        raise InvariantViolation(f"cannot shadow built-in preset {p.name!r}")
    _REGISTRY[p.name] = p


def override_params(p: MaterialPreset, *, delta=None, l=None, dz_ratio=None,
                    dz_over_a2=None, h0=None) -> MaterialPreset:
    """Return a copy of the preset with scan parameters replaced.

    ``delta`` applies to AFM presets (dropping the anisotropy provenance K,
    which would otherwise contradict it); ``l``, ``dz_ratio`` /
    ``dz_over_a2`` and ``h0`` apply to ferrimagnet presets.
    """
    params = p.params
    if isinstance(params, AfmParams):
        if any(v is not None for v in (l, dz_ratio, dz_over_a2, h0)):
            raise InvariantViolation("l/D_z/H0 overrides apply to ferrimagnets only")
        if delta is not None:
            params = dataclasses.replace(params, delta=float(delta), K=None)
    else:
        if delta is not None:
            raise InvariantViolation("delta override applies to AFM presets only")
        if dz_ratio is not None and dz_over_a2 is not None:
            raise InvariantViolation("give dz_ratio or dz_over_a2, not both")
        kw = {}
        if l is not None:
            kw["l_exponent"] = float(l)
        if dz_ratio is not None:
            kw["Dz_over_a2"] = float(dz_ratio) * params.D_over_a2
        if dz_over_a2 is not None:
            kw["Dz_over_a2"] = float(dz_over_a2)
        if h0 is not None:
            kw["H0"] = float(h0)
        if kw:
            params = dataclasses.replace(params, **kw)
    return dataclasses.replace(p, params=params)


# ---------------------------------------------------------------------------
# config file format
# ---------------------------------------------------------------------------

_COMMON_KEYS = {"name", "kind", "provenance"}
_AFM_KEYS = {"J_meV", "S", "K_meV", "a_nm", "delta", "hbar_omega0_meV"}
_FERRI_KEYS = {
    "H0_meV", "H0_ueV", "hbar_omegaM_meV", "hbar_omegaM_ueV",
    "delta_plus_meV", "delta_minus_meV", "D_over_a2_meV", "Dz_over_a2_meV",
    "l", "a_nm",
}


def _parse_lines(text: str):
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        if key in entries:
            raise ParseError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)
    return entries


def _take_float(entries, key):
    value, lineno = entries.pop(key)
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"line {lineno}: key {key!r} is not a number: {value!r}") from None


def _energy_key(entries, base, required=True):
    """Fetch `base`_meV or `base`_ueV (converting once); both present is an error."""
    has_mev = f"{base}_meV" in entries
    has_uev = f"{base}_ueV" in entries
    if has_mev and has_uev:
        raise ParseError(f"both {base}_meV and {base}_ueV given")
    if has_mev:
        return _take_float(entries, f"{base}_meV")
    if has_uev:
        return _take_float(entries, f"{base}_ueV") / 1000.0
    if required:
        raise ParseError(f"missing required key {base}_meV (or {base}_ueV)")
    return None


def load_params(path) -> MaterialPreset:
    """Load a preset from a config file, validating every invariant.

    Raises ParseError for malformed files, UnknownField for unrecognized
    keys, InvariantViolation (naming the offending field) for values that
    violate a construction invariant.
    """
    path = Path(path)
    entries = _parse_lines(path.read_text(encoding="utf-8"))

    kind_entry = entries.pop("kind", None)
    if kind_entry is None:
        raise ParseError("missing required key 'kind'")
    kind = kind_entry[0]
    if kind not in ("AFM", "Ferrimagnet"):
        raise ParseError(f"kind must be AFM or Ferrimagnet, got {kind!r}")
    name = entries.pop("name", (path.stem, 0))[0]
    provenance = entries.pop("provenance", ("", 0))[0]

    allowed = _AFM_KEYS if kind == "AFM" else _FERRI_KEYS
    unknown = set(entries) - allowed
    if unknown:
        raise UnknownField(
            f"unknown key(s) for kind {kind}: {', '.join(sorted(unknown))}"
        )

    if kind == "AFM":
        if "a_nm" not in entries:
            raise ParseError("missing required key a_nm")
        a = _take_float(entries, "a_nm")
        J = _take_float(entries, "J_meV") if "J_meV" in entries else None
        S = _take_float(entries, "S") if "S" in entries else None
        K = _take_float(entries, "K_meV") if "K_meV" in entries else None
        if K is not None and K < 0:
            raise InvariantViolation("K must be >= 0")
        if "hbar_omega0_meV" in entries:
            hw0 = _take_float(entries, "hbar_omega0_meV")
        elif J is not None and S is not None:
            hw0 = 2.0 * (3.0 ** 0.5) * J * S
        else:
            raise ParseError("need hbar_omega0_meV or both J_meV and S")
        if "delta" in entries:
            delta = _take_float(entries, "delta")
        elif K is not None and J is not None:
            r = K / (6.0 * J)
            delta = 3.0 * (r * r + 2.0 * r)
        else:
            raise ParseError("need delta or both K_meV and J_meV")
        params = AfmParams(hbar_omega0=hw0, delta=delta, a=a, J=J, S=S, K=K)
    else:
        h0 = _energy_key(entries, "H0")
        omega_m = _energy_key(entries, "hbar_omegaM")
        for key in ("delta_plus_meV", "delta_minus_meV", "D_over_a2_meV", "a_nm"):
            if key not in entries:
                raise ParseError(f"missing required key {key}")
        dplus = _take_float(entries, "delta_plus_meV")
        dminus = _take_float(entries, "delta_minus_meV")
        d = _take_float(entries, "D_over_a2_meV")
        dz = _take_float(entries, "Dz_over_a2_meV") if "Dz_over_a2_meV" in entries else d
        l = _take_float(entries, "l") if "l" in entries else 2.0
        a = _take_float(entries, "a_nm")
        params = FerriParams(
            H0=h0, delta_plus=dplus, delta_minus=dminus, D_over_a2=d,
            Dz_over_a2=dz, l_exponent=l, hbar_omegaM=omega_m, a=a,
        )

    return MaterialPreset(name=name, kind=kind, params=params, provenance=provenance)


def dumps_preset(p: MaterialPreset) -> str:
    """Serialize a preset to config text; floats use shortest round-trip repr.

    Values are written in meV so reading the file back reproduces every
    float bit-exactly (ueV keys are accepted on input only).
    """
    lines = [f"kind = {p.kind}", f"name = {p.name}"]
    if p.provenance:
        lines.append(f"provenance = {p.provenance}")
    prm = p.params
    if isinstance(prm, AfmParams):
        lines.append(f"a_nm = {prm.a!r}")
        lines.append(f"hbar_omega0_meV = {prm.hbar_omega0!r}")
        lines.append(f"delta = {prm.delta!r}")
        if prm.J is not None:
            lines.append(f"J_meV = {prm.J!r}")
        if prm.S is not None:
            lines.append(f"S = {prm.S!r}")
        if prm.K is not None:
            lines.append(f"K_meV = {prm.K!r}")
    else:
        lines.append(f"a_nm = {prm.a!r}")
        lines.append(f"H0_meV = {prm.H0!r}")
        lines.append(f"hbar_omegaM_meV = {prm.hbar_omegaM!r}")
        lines.append(f"delta_plus_meV = {prm.delta_plus!r}")
        lines.append(f"delta_minus_meV = {prm.delta_minus!r}")
        lines.append(f"D_over_a2_meV = {prm.D_over_a2!r}")
        lines.append(f"Dz_over_a2_meV = {prm.Dz_over_a2!r}")
        lines.append(f"l = {prm.l_exponent!r}")
    return "\n".join(lines) + "\n"


def save_params(p: MaterialPreset, path) -> None:
    """Write a preset config file (UTF-8, LF line endings)."""
    Path(path).write_text(dumps_preset(p), encoding="utf-8", newline="\n")
