"""TOML model configurations for the command-line driver.

Operators are written either as Pauli words with coefficients
(``"0.5 * X1 Y3"``, indices 1-based) or as dense matrices given as row lists
of ``"re+imi"`` strings.  Unknown keys are rejected.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import models, qmat
from .lindblad import LindbladGenerator, Semigroup
from .qmat import Array


class ConfigError(ValueError):
    pass


_TOP_KEYS = {"name", "model", "seed", "system", "gates", "bounds", "sweep",
             "hamiltonian", "jumps", "resource", "certificates", "environment"}
_SYSTEM_KEYS = {"qubits", "dims"}
_GATES_KEYS = {"tau", "family"}
_BOUNDS_KEYS = {"alpha", "beta", "epsilon", "delta", "fixed_time_tau", "target_time", "kappa_upper"}
_SWEEP_KEYS = {"t", "t_logspace", "n_values"}
_HAM_KEYS = {"terms", "dense"}
_JUMP_KEYS = {"pauli", "dense"}
_RESOURCE_KEYS = {"members"}
_CERT_KEYS = {"operators"}
_ENV_KEYS = {"ancillas"}
_WORD_RE = re.compile(r"^([IXYZ])(\d+)$")


def _check_keys(table: dict, allowed: set, where: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def parse_entry(text: str) -> complex:
    """Parse one dense-matrix entry written as 're', 'imi', or 're+imi'."""
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError as exc:
        raise ConfigError(f"cannot parse matrix entry {text!r}") from exc


def parse_dense(rows) -> Array:
    mat = np.array([[parse_entry(e) for e in row] for row in rows], dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ConfigError("dense matrices must be square")
    return mat


def parse_pauli_word(text: str, n_qubits: int) -> Array:
    """One term like '0.5 * X1 Y3' (coefficient optional) on n qubits."""
    parts = text.split("*")
    if len(parts) == 2:
        try:
            coeff = complex(parts[0].strip().replace("i", "j"))
        except ValueError as exc:
            raise ConfigError(f"bad coefficient in {text!r}") from exc
        letters = parts[1]
    elif len(parts) == 1:
        coeff = 1.0
        letters = parts[0]
    else:
        raise ConfigError(f"bad Pauli term {text!r}")
    dims = tuple([2] * n_qubits)
    out = coeff * np.eye(2**n_qubits, dtype=complex)
    for token in letters.split():
        m = _WORD_RE.match(token)
        if not m:
            raise ConfigError(f"bad Pauli factor {token!r} in {text!r}")
        letter, idx = m.group(1), int(m.group(2))
        if not 1 <= idx <= n_qubits:
            raise ConfigError(f"qubit index {idx} out of range in {text!r}")
        out = out @ qmat.embed_local(qmat.PAULIS[letter], idx - 1, dims)
    return out


def parse_operator(spec, n_qubits: int) -> Array:
    """An operator given as a Pauli-word string, a list of terms to sum, or a dense table."""
    if isinstance(spec, str):
        return parse_pauli_word(spec, n_qubits)
    if isinstance(spec, list) and spec and isinstance(spec[0], str):
        return sum(parse_pauli_word(term, n_qubits) for term in spec)
    if isinstance(spec, list):
        return parse_dense(spec)
    raise ConfigError(f"cannot interpret operator spec {spec!r}")


@dataclass
class SweepConfig:
    t_values: tuple[float, ...] = ()
    n_values: tuple[int, ...] = ()


@dataclass
class BoundConfig:
    alpha: float = 2.0
    beta: float = 2.0
    epsilon: float | None = None
    delta: float | None = None
    fixed_time_tau: float | None = None
    target_time: float | None = None
    kappa_upper: float | None = None


@dataclass
class ModelConfig:
    name: str
    kind: str
    seed: int
    n_qubits: int
    tau: float
    sweep: SweepConfig
    bounds: BoundConfig
    hamiltonian: Array | None = None
    jumps: tuple[Array, ...] = ()
    resource_members: tuple[Array, ...] = ()
    resource_labels: tuple[str, ...] = ()
    certificates: tuple[Array, ...] = ()
    certificate_labels: tuple[str, ...] = ()
    ancillas: int = 0

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple([2] * self.n_qubits)


def load_config(path) -> ModelConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    _check_keys(data, _TOP_KEYS, "top level")

    name = data.get("name", path.stem)
    kind = data.get("model", "custom")
    if kind not in ("pauli", "amplitude-damping", "custom"):
        raise ConfigError(f"unknown model kind {kind!r}")
    seed = int(data.get("seed", 0))

    system = data.get("system", {})
    _check_keys(system, _SYSTEM_KEYS, "[system]")
    if "qubits" in system:
        n_qubits = int(system["qubits"])
    elif "dims" in system:
        dims = [int(d) for d in system["dims"]]
        if any(d != 2 for d in dims):
            raise ConfigError("only qubit factors (dimension 2) are supported")
        n_qubits = len(dims)
    else:
        raise ConfigError("[system] must give qubits or dims")
    if n_qubits < 1:
        raise ConfigError("need at least one qubit")

    gates = data.get("gates", {})
    _check_keys(gates, _GATES_KEYS, "[gates]")
    tau = float(gates.get("tau", 1.0))

    bounds_tab = data.get("bounds", {})
    _check_keys(bounds_tab, _BOUNDS_KEYS, "[bounds]")
    bounds = BoundConfig(
        alpha=float(bounds_tab.get("alpha", 2.0)),
        beta=float(bounds_tab.get("beta", 2.0)),
        epsilon=float(bounds_tab["epsilon"]) if "epsilon" in bounds_tab else None,
        delta=float(bounds_tab["delta"]) if "delta" in bounds_tab else None,
        fixed_time_tau=float(bounds_tab["fixed_time_tau"]) if "fixed_time_tau" in bounds_tab else None,
        target_time=float(bounds_tab["target_time"]) if "target_time" in bounds_tab else None,
        kappa_upper=float(bounds_tab["kappa_upper"]) if "kappa_upper" in bounds_tab else None,
    )

    sweep_tab = data.get("sweep", {})
    _check_keys(sweep_tab, _SWEEP_KEYS, "[sweep]")
    if "t" in sweep_tab and "t_logspace" in sweep_tab:
        raise ConfigError("[sweep] cannot give both t and t_logspace")
    if "t_logspace" in sweep_tab:
        spec = sweep_tab["t_logspace"]
        _check_keys(spec, {"start", "stop", "points"}, "[sweep.t_logspace]")
        ts = np.logspace(
            math.log10(float(spec["start"])), math.log10(float(spec["stop"])), int(spec["points"])
        )
        t_values = tuple(float(t) for t in ts)
    else:
        t_values = tuple(float(t) for t in sweep_tab.get("t", ()))
    n_values = tuple(int(n) for n in sweep_tab.get("n_values", ()))
    sweep = SweepConfig(t_values=t_values, n_values=n_values)

    env = data.get("environment", {})
    _check_keys(env, _ENV_KEYS, "[environment]")
    ancillas = int(env.get("ancillas", 0))

    custom_sections = [k for k in ("hamiltonian", "jumps", "resource", "certificates") if k in data]
    if kind != "custom" and custom_sections:
        raise ConfigError(f"model {kind!r} generates its own operators; remove {custom_sections}")

    hamiltonian = None
    jumps: list[Array] = []
    members: list[Array] = []
    labels: list[str] = []
    certs: list[Array] = []
    cert_labels: list[str] = []
    if kind == "custom":
        ham_tab = data.get("hamiltonian", {})
        _check_keys(ham_tab, _HAM_KEYS, "[hamiltonian]")
        if "terms" in ham_tab:
            hamiltonian = parse_operator(list(ham_tab["terms"]), n_qubits)
        elif "dense" in ham_tab:
            hamiltonian = parse_dense(ham_tab["dense"])
        for i, jtab in enumerate(data.get("jumps", [])):
            _check_keys(jtab, _JUMP_KEYS, f"[[jumps]] #{i + 1}")
            if "pauli" in jtab:
                jumps.append(parse_operator(jtab["pauli"], n_qubits))
            elif "dense" in jtab:
                jumps.append(parse_dense(jtab["dense"]))
            else:
                raise ConfigError(f"[[jumps]] #{i + 1} needs pauli or dense")
        res_tab = data.get("resource", {})
        _check_keys(res_tab, _RESOURCE_KEYS, "[resource]")
        for word in res_tab.get("members", ()):
            members.append(parse_pauli_word(word, n_qubits))
            labels.append(word)
        cert_tab = data.get("certificates", {})
        _check_keys(cert_tab, _CERT_KEYS, "[certificates]")
        for op_spec in cert_tab.get("operators", ()):
            certs.append(parse_operator(op_spec, n_qubits))
            cert_labels.append(str(op_spec))

    return ModelConfig(
        name=name,
        kind=kind,
        seed=seed,
        n_qubits=n_qubits,
        tau=tau,
        sweep=sweep,
        bounds=bounds,
        hamiltonian=hamiltonian,
        jumps=tuple(jumps),
        resource_members=tuple(members),
        resource_labels=tuple(labels),
        certificates=tuple(certs),
        certificate_labels=tuple(cert_labels),
        ancillas=ancillas,
    )


def build_model(cfg: ModelConfig):
    """Instantiate the model object described by a parsed configuration."""
    if cfg.kind == "pauli":
        return models.PauliNoiseModel(cfg.n_qubits, tau=cfg.tau)
    if cfg.kind == "amplitude-damping":
        return models.AmplitudeDampingModel(cfg.n_qubits, tau=cfg.tau)
    if not cfg.jumps and cfg.hamiltonian is None:
        raise ConfigError("custom model needs [hamiltonian] and/or [[jumps]]")
    generator = LindbladGenerator(cfg.dims, cfg.hamiltonian, cfg.jumps)
    return models.CustomModel(
        name=cfg.name,
        generator=generator,
        tau=cfg.tau,
        resource_members=cfg.resource_members,
        resource_labels=cfg.resource_labels,
        certificates=cfg.certificates,
        certificate_labels=cfg.certificate_labels,
        kappa_upper=cfg.bounds.kappa_upper,
    )
