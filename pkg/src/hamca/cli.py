"""Batch command-line front end.

One command, one concern: run (trajectory CSV), verify (invariant suite),
spectrum, reconstruct, map-qm, convergence.  Configs are JSON documents, all
data outputs are deterministic CSV (byte-identical across runs; integers in
plain decimal, floats via repr); run metadata goes to an optional JSON
sidecar, never into the data files.

Exit codes: 0 success, 2 unreadable/unparsable config, 3 semantic config or
input violation, 4 magnitude budget exceeded, 5 verification failure,
6 bridge precondition (lapse, guard band, float conversion), 7 every mode out
of band.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .automaton import (
    AutomatonSpec,
    BudgetExceededError,
    DEFAULT_BUDGET_DIGITS,
    Slice,
    StatePair,
    Trajectory,
    conservation_residual,
    discrete_variation,
    evolve,
    hamiltonian_doubled,
    leibniz_residual,
    step_backward,
)
from .continuum import (
    GuardBandError,
    LapseError,
    SampledWave,
    gaussian_to_ndarray,
    sinh_residual,
    spectrum,
    step_eigenphase,
)
from .exactmath import (
    FloatConversionError,
    GaussianMatrix,
    HamiltonianParts,
    ShapeError,
    SymmetryError,
    build_hamiltonian,
)
from .qmbridge import (
    AllModesOutOfBandError,
    PhysicalProblem,
    convergence_study,
    quantize,
    simulate_vs_exact,
)

EXIT_OK = 0
EXIT_SYNTAX = 2
EXIT_SEMANTIC = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5
EXIT_BRIDGE = 6
EXIT_BAND = 7

_JSON_INT_LIMIT = 10**15


class ConfigSyntaxError(ValueError):
    """The config is not valid JSON (or not readable at all)."""


class ConfigFieldError(ValueError):
    """A config field violates its contract; carries the field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def _require_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigFieldError(field, f"expected an integer, got {value!r}")
    return value


def _require_real(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigFieldError(field, f"expected a number, got {value!r}")
    return float(value)


def _require_int_vector(value, field: str, dim: int) -> tuple[int, ...]:
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigFieldError(field, f"expected a list of {dim} integers")
    return tuple(_require_int(v, f"{field}[{i}]") for i, v in enumerate(value))


def _require_int_matrix(value, field: str, dim: int) -> tuple[tuple[int, ...], ...]:
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigFieldError(field, f"expected {dim} rows")
    return tuple(_require_int_vector(row, f"{field}[{i}]", dim) for i, row in enumerate(value))


def _require_real_matrix(value, field: str, dim: int) -> np.ndarray:
    if not isinstance(value, list) or len(value) != dim:
        raise ConfigFieldError(field, f"expected {dim} rows")
    out = np.empty((dim, dim))
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigFieldError(f"{field}[{i}]", f"expected a list of {dim} numbers")
        for j, v in enumerate(row):
            out[i, j] = _require_real(v, f"{field}[{i}][{j}]")
    return out


@dataclass(frozen=True)
class RunConfig:
    """A fully validated automaton run: dynamics, seed pair, outputs."""

    dim: int
    parts: HamiltonianParts
    c: int
    x0: tuple[int, ...]
    p0: tuple[int, ...]
    x1: tuple[int, ...]
    p1: tuple[int, ...]
    tau0: int
    two_pi0: int
    tau1: int
    two_pi1: int
    steps: int
    scale_l: float
    origin: str
    out: str | None

    def spec(self) -> AutomatonSpec:
        return AutomatonSpec(dim=self.dim, parts=self.parts, lapse_c=self.c)

    def seed_pair(self) -> StatePair:
        return StatePair(
            Slice(n=0, x=self.x0, p=self.p0, tau=self.tau0, two_pi=self.two_pi0),
            Slice(n=1, x=self.x1, p=self.p1, tau=self.tau1, two_pi=self.two_pi1),
        )

    def hamiltonian(self) -> GaussianMatrix:
        return build_hamiltonian(self.parts)


_RUN_KEYS = {
    "dim", "S", "A", "c", "x0", "p0", "x1", "p1", "tau0", "two_pi0",
    "tau1", "two_pi1", "steps", "scale_l", "origin", "out",
}


def parse_config(text: str) -> RunConfig:
    """Parse and validate a run config; symmetry is checked at parse time."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigSyntaxError(f"config is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigFieldError("<root>", "config must be a JSON object")
    for key in doc:
        if key not in _RUN_KEYS:
            raise ConfigFieldError(key, "unknown field")
    for key in ("dim", "S", "A", "c", "x0", "p0", "x1", "p1"):
        if key not in doc:
            raise ConfigFieldError(key, "required field is missing")

    dim = _require_int(doc["dim"], "dim")
    if dim < 1:
        raise ConfigFieldError("dim", f"must be positive, got {dim}")
    S = _require_int_matrix(doc["S"], "S", dim)
    A = _require_int_matrix(doc["A"], "A", dim)
    try:
        parts = HamiltonianParts(S, A)
    except SymmetryError as e:
        field = "S" if "S" in str(e).split("[")[0] else "A"
        raise ConfigFieldError(field, str(e)) from e
    c = _require_int(doc["c"], "c")
    x0 = _require_int_vector(doc["x0"], "x0", dim)
    p0 = _require_int_vector(doc["p0"], "p0", dim)
    x1 = _require_int_vector(doc["x1"], "x1", dim)
    p1 = _require_int_vector(doc["p1"], "p1", dim)
    tau0 = _require_int(doc.get("tau0", 0), "tau0")
    two_pi0 = _require_int(doc.get("two_pi0", 0), "two_pi0")
    # tau advances by c per double step; placing the second seed half way
    # keeps tau_n = tau0 + n*c/2 for even c.  The odd subchain constant of
    # two_pi - 2H is aligned with the even one unless overridden.
    tau1 = _require_int(doc.get("tau1", tau0 + c // 2), "tau1")
    if "two_pi1" in doc:
        two_pi1 = _require_int(doc["two_pi1"], "two_pi1")
    else:
        spec = AutomatonSpec(dim=dim, parts=parts, lapse_c=c)
        h0 = hamiltonian_doubled(spec, Slice(0, x0, p0, tau0, two_pi0))
        h1 = hamiltonian_doubled(spec, Slice(1, x1, p1, tau1, 0))
        two_pi1 = two_pi0 + h1 - h0
    steps = _require_int(doc.get("steps", 0), "steps")
    if steps < 0:
        raise ConfigFieldError("steps", f"must be >= 0, got {steps}")
    scale_l = _require_real(doc.get("scale_l", 1.0), "scale_l")
    if not scale_l > 0:
        raise ConfigFieldError("scale_l", f"must be positive, got {scale_l}")
    origin = doc.get("origin", "center")
    if origin not in ("center", "first"):
        raise ConfigFieldError("origin", f'must be "center" or "first", got {origin!r}')
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigFieldError("out", "must be a string path")
    return RunConfig(
        dim=dim, parts=parts, c=c, x0=x0, p0=p0, x1=x1, p1=p1,
        tau0=tau0, two_pi0=two_pi0, tau1=tau1, two_pi1=two_pi1,
        steps=steps, scale_l=scale_l, origin=origin, out=out,
    )


@dataclass(frozen=True)
class ProblemConfig:
    """A validated physical problem for map-qm / convergence."""

    h: np.ndarray
    eps_phys: float
    M: int
    Mprime: int
    psi0: np.ndarray
    Q: int
    steps: int
    m_values: tuple[int, ...]
    out: str | None

    def problem(self) -> PhysicalProblem:
        return PhysicalProblem(
            h=self.h, eps_phys=self.eps_phys, scale_M=self.M,
            time_scale_Mprime=self.Mprime,
        )


_PROBLEM_KEYS = {
    "h_re", "h_im", "eps_phys", "M", "Mprime", "psi0_re", "psi0_im",
    "Q", "steps", "m_values", "out",
}


def parse_problem_config(text: str) -> ProblemConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigSyntaxError(f"config is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ConfigFieldError("<root>", "config must be a JSON object")
    for key in doc:
        if key not in _PROBLEM_KEYS:
            raise ConfigFieldError(key, "unknown field")
    if "h_re" not in doc:
        raise ConfigFieldError("h_re", "required field is missing")
    if not isinstance(doc["h_re"], list) or not doc["h_re"]:
        raise ConfigFieldError("h_re", "expected a non-empty matrix")
    dim = len(doc["h_re"])
    h_re = _require_real_matrix(doc["h_re"], "h_re", dim)
    h_im = (
        _require_real_matrix(doc["h_im"], "h_im", dim)
        if "h_im" in doc
        else np.zeros((dim, dim))
    )
    h = h_re + 1j * h_im
    eps_phys = _require_real(doc.get("eps_phys", 1.0), "eps_phys")
    M = _require_int(doc.get("M", 1), "M")
    Mprime = _require_int(doc.get("Mprime", 16 * M), "Mprime")
    psi0_re = doc.get("psi0_re", [1.0] + [0.0] * (dim - 1))
    psi0_im = doc.get("psi0_im", [0.0] * dim)
    if not isinstance(psi0_re, list) or len(psi0_re) != dim:
        raise ConfigFieldError("psi0_re", f"expected a list of {dim} numbers")
    if not isinstance(psi0_im, list) or len(psi0_im) != dim:
        raise ConfigFieldError("psi0_im", f"expected a list of {dim} numbers")
    psi0 = np.array(
        [_require_real(v, f"psi0_re[{i}]") for i, v in enumerate(psi0_re)]
    ) + 1j * np.array([_require_real(v, f"psi0_im[{i}]") for i, v in enumerate(psi0_im)])
    Q = _require_int(doc.get("Q", 1000), "Q")
    steps = _require_int(doc.get("steps", 40), "steps")
    m_values = doc.get("m_values", [4, 8, 16, 32])
    if not isinstance(m_values, list) or len(m_values) < 3:
        raise ConfigFieldError("m_values", "expected a list of at least 3 integers")
    m_values = tuple(_require_int(v, f"m_values[{i}]") for i, v in enumerate(m_values))
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigFieldError("out", "must be a string path")
    try:
        return ProblemConfig(
            h=h, eps_phys=eps_phys, M=M, Mprime=Mprime, psi0=psi0, Q=Q,
            steps=steps, m_values=m_values, out=out,
        )
    except ValueError as e:
        raise ConfigFieldError("h_re", str(e)) from e


def _fmt_float(x: float) -> str:
    return repr(float(x))


def _write_csv(path: str | None, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def write_trajectory_csv(traj: Trajectory, path: str | None) -> None:
    n = traj.spec.dim
    header = ["n", "tau", "two_pi", "two_H"]
    header += [f"x{i}" for i in range(n)] + [f"p{i}" for i in range(n)]
    rows = []
    for s in traj.slices:
        row = [str(s.n), str(s.tau), str(s.two_pi),
               str(hamiltonian_doubled(traj.spec, s))]
        row += [str(v) for v in s.x] + [str(v) for v in s.p]
        rows.append(row)
    _write_csv(path, header, rows)


def read_trajectory_csv(text: str, spec: AutomatonSpec) -> Trajectory:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ConfigFieldError("<trajectory>", "file has no data rows")
    header = lines[0].split(",")
    n_dim = spec.dim
    expected = ["n", "tau", "two_pi", "two_H"] + [f"x{i}" for i in range(n_dim)] + [
        f"p{i}" for i in range(n_dim)
    ]
    if header != expected:
        raise ConfigFieldError(
            "<trajectory>", f"header {header!r} does not match dim {n_dim}"
        )
    slices = []
    for k, line in enumerate(lines[1:]):
        cells = line.split(",")
        if len(cells) != len(expected):
            raise ConfigFieldError(f"<trajectory> row {k}", "wrong column count")
        try:
            vals = [int(c) for c in cells]
        except ValueError as e:
            raise ConfigFieldError(f"<trajectory> row {k}", str(e)) from e
        slices.append(
            Slice(
                n=vals[0], tau=vals[1], two_pi=vals[2],
                x=tuple(vals[4 : 4 + n_dim]), p=tuple(vals[4 + n_dim :]),
            )
        )
    return Trajectory(spec, tuple(slices))


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigSyntaxError(f"cannot read {path}: {e}") from e


def _write_meta(path: str | None, payload: dict) -> None:
    if path is None:
        return
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _json_int(v: int):
    return v if -_JSON_INT_LIMIT < v < _JSON_INT_LIMIT else str(v)


def _parse_t_grid(spec_text: str, scale_l: float) -> list[float]:
    """t-grid flag: either 'start:stop:count' or a comma list, in units of l."""
    if ":" in spec_text:
        parts = spec_text.split(":")
        if len(parts) != 3:
            raise ConfigFieldError("--t-grid", f"expected start:stop:count, got {spec_text!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise ConfigFieldError("--t-grid", str(e)) from e
        if count < 1:
            raise ConfigFieldError("--t-grid", f"count must be >= 1, got {count}")
        return [t * scale_l for t in np.linspace(start, stop, count)]
    try:
        return [float(v) * scale_l for v in spec_text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigFieldError("--t-grid", str(e)) from e


def cmd_run(args) -> int:
    cfg = parse_config(_read_text(args.config))
    spec = cfg.spec()
    try:
        traj = evolve(spec, cfg.seed_pair(), cfg.steps, budget_digits=args.budget)
    except BudgetExceededError as e:
        try:
            growth = max(
                step_eigenphase(m.epsilon, cfg.c).growth_rate
                for m in spectrum(
                    gaussian_to_ndarray(cfg.hamiltonian()), cfg.scale_l
                ).modes
            )
            diag = f"; fastest mode multiplies by {growth:.6g} per step"
        except FloatConversionError:  # matrix entries beyond float range
            diag = ""
        print(f"error: {e}{diag}", file=sys.stderr)
        return EXIT_BUDGET
    out = args.out or cfg.out
    write_trajectory_csv(traj, out)
    _write_meta(args.meta, {
        "command": "run", "config": str(args.config), "version": __version__,
        "slices": len(traj), "budget_digits": args.budget, "out": out,
    })
    return EXIT_OK


def _verify_trajectory(cfg: RunConfig, traj: Trajectory) -> list[tuple[str, bool, str]]:
    spec = traj.spec
    results = []

    ok = True
    detail = ""
    pair = traj.initial_pair
    fwd = evolve(spec, pair, len(traj) - 2)
    if fwd.slices != traj.slices:
        ok, detail = False, "forward re-evolution diverges from the trajectory"
    back = traj.final_pair
    for k in range(len(traj) - 2, 0, -1):
        back = step_backward(spec, back)
        if back.prev != traj.slices[k - 1]:
            ok, detail = False, f"backward reconstruction differs at slice {k - 1}"
            break
    results.append(("reversibility", ok, detail))

    ok = True
    detail = ""
    deltas = [d for d in range(-3, 4)]
    for k in range(1, len(traj) - 1):
        n = traj.slices[k].n
        sites = [("tau", None), ("pi", None)]
        sites += [(sel, comp) for sel in ("x", "p") for comp in range(spec.dim)]
        for sel, comp in sites:
            for d in deltas:
                if discrete_variation(traj, (n, sel, comp), d) != 0:
                    ok = False
                    detail = f"nonzero variation at n={n} {sel}[{comp}] delta={d}"
                    break
            if not ok:
                break
        if not ok:
            break
    results.append(("stationarity", ok, detail))

    ok = True
    detail = ""
    H = spec.hamiltonian()
    for gi, G in enumerate((GaussianMatrix.identity(spec.dim), H, H @ H)):
        for k in range(1, len(traj) - 1):
            n = traj.slices[k].n
            if conservation_residual(traj, G, n):
                ok = False
                detail = f"nonzero residual for matrix {gi} at n={n}"
                break
        if not ok:
            break
    results.append(("conservation", ok, detail))

    ok = True
    detail = ""
    for a in range(spec.dim):
        xs = [s.x[a] for s in traj.slices]
        ps = [s.p[a] for s in traj.slices]
        for n in range(1, len(traj) - 1):
            if leibniz_residual(xs, ps, n) != 0:
                ok = False
                detail = f"modified product rule fails at component {a}, n={n}"
                break
        if not ok:
            break
    results.append(("leibniz_identity", ok, detail))
    return results


def cmd_verify(args) -> int:
    cfg = parse_config(_read_text(args.config))
    spec = cfg.spec()
    if args.traj:
        traj = read_trajectory_csv(_read_text(args.traj), spec)
    else:
        traj = evolve(spec, cfg.seed_pair(), max(cfg.steps, 1), budget_digits=args.budget)
    results = _verify_trajectory(cfg, traj)
    all_ok = True
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else ""))
        all_ok = all_ok and ok
    return EXIT_OK if all_ok else EXIT_VERIFY


def cmd_spectrum(args) -> int:
    cfg = parse_config(_read_text(args.config))
    spec = spectrum(gaussian_to_ndarray(cfg.hamiltonian()), cfg.scale_l)
    rows = []
    for i, m in enumerate(spec.modes):
        ph = step_eigenphase(m.epsilon, cfg.c)
        energy = "OUT_OF_BAND" if m.energy is None else _fmt_float(m.energy)
        rows.append([str(i), _fmt_float(m.epsilon), energy, ph.stability])
    _write_csv(args.out, ["mode", "epsilon", "energy", "stability"], rows)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = parse_config(_read_text(args.config))
    if cfg.c != 2:
        raise LapseError(f"reconstruction requires lapse c = 2, config has c = {cfg.c}")
    spec = cfg.spec()
    traj = evolve(spec, cfg.seed_pair(), cfg.steps, budget_digits=args.budget)
    wave = SampledWave.from_trajectory(
        traj, cfg.scale_l, recenter=(cfg.origin == "center")
    )
    if args.window is not None:
        lo, hi = wave.window
        mid = (lo + hi) // 2
        a = max(lo, mid - args.window)
        b = min(hi, mid + args.window)
        wave = SampledWave(
            cfg.scale_l, a, wave.values[a - lo : b - lo + 1]
        )
    H = gaussian_to_ndarray(cfg.hamiltonian())
    times = _parse_t_grid(args.t_grid, cfg.scale_l)
    header = ["t"]
    for i in range(cfg.dim):
        header += [f"re{i}", f"im{i}"]
    header.append("sinh_residual")
    rows = []
    for t in times:
        v = wave.value_at(t)
        r = sinh_residual(wave, H, t)
        row = [_fmt_float(t)]
        for i in range(cfg.dim):
            row += [_fmt_float(v[i].real), _fmt_float(v[i].imag)]
        row.append(_fmt_float(r))
        rows.append(row)
    _write_csv(args.out, header, rows)
    return EXIT_OK


def _quantization_payload(rep) -> dict:
    n = rep.H_int.rows
    return {
        "H_int": [
            [[_json_int(rep.H_int.entry(i, j).re), _json_int(rep.H_int.entry(i, j).im)]
             for j in range(n)]
            for i in range(n)
        ],
        "scale_M": rep.scale_M,
        "elem_err": rep.elem_err,
        "spectral_radius": rep.spectral_radius,
        "epsilons": list(rep.epsilons),
        "stabilities": list(rep.stabilities),
        "growth_rates": list(rep.growth_rates),
        "in_band_modes": list(rep.in_band_modes),
        "out_band_modes": list(rep.out_band_modes),
    }


def cmd_mapqm(args) -> int:
    cfg = parse_problem_config(_read_text(args.config))
    problem = cfg.problem()
    rep = quantize(problem)
    cmp_rep = simulate_vs_exact(problem, cfg.psi0, cfg.Q, cfg.steps)
    header = ["t", "deviation", "quantization", "dispersion", "truncation"]
    rows = [
        [_fmt_float(t), _fmt_float(d), _fmt_float(q), _fmt_float(s), _fmt_float(u)]
        for t, d, q, s, u in zip(
            cmp_rep.times, cmp_rep.deviation, cmp_rep.quantization,
            cmp_rep.dispersion, cmp_rep.truncation,
        )
    ]
    _write_csv(args.out or cfg.out, header, rows)
    print(
        f"modes in band: {len(rep.in_band_modes)}/{len(rep.epsilons)}; "
        f"elem_err={rep.elem_err!r}; discarded weight={cmp_rep.discarded_weight!r}"
    )
    if args.report:
        payload = _quantization_payload(rep)
        payload["discarded_weight"] = cmp_rep.discarded_weight
        payload["amplitude_scale"] = cmp_rep.amplitude_scale
        Path(args.report).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return EXIT_OK


def cmd_convergence(args) -> int:
    cfg = parse_problem_config(_read_text(args.config))
    m_values = cfg.m_values
    if args.m_values:
        try:
            m_values = tuple(int(v) for v in args.m_values.split(","))
        except ValueError as e:
            raise ConfigFieldError("--m-values", str(e)) from e
    study = convergence_study(cfg.h, m_values)
    slope_txt = "" if study.slope is None else _fmt_float(study.slope)
    rows = [
        [str(m), _fmt_float(e), slope_txt]
        for m, e in zip(study.m_values, study.elem_errs)
    ]
    _write_csv(args.out or cfg.out, ["M", "elem_err", "slope"], rows)
    if study.exactly_representable:
        print("all rounding errors are exactly zero: h is exactly representable")
    else:
        print(f"fitted log-log slope: {study.slope!r}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamca",
        description="Exact integer Hamiltonian cellular automata: run, verify, "
        "reconstruct and quantize.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Evolve a config and write the trajectory CSV.")
    run.add_argument("--config", required=True, metavar="JSON")
    run.add_argument("--out", default=None, metavar="CSV")
    run.add_argument("--budget", type=int, default=DEFAULT_BUDGET_DIGITS, metavar="DIGITS")
    run.add_argument("--meta", default=None, metavar="JSON")
    run.set_defaults(func=cmd_run)

    verify = sub.add_parser("verify", help="Run the invariant suite on a trajectory.")
    verify.add_argument("--config", required=True, metavar="JSON")
    verify.add_argument("--traj", default=None, metavar="CSV",
                        help="verify this trajectory file instead of evolving")
    verify.add_argument("--budget", type=int, default=DEFAULT_BUDGET_DIGITS, metavar="DIGITS")
    verify.set_defaults(func=cmd_verify)

    spect = sub.add_parser("spectrum", help="Mode table: epsilon, energy, stability.")
    spect.add_argument("--config", required=True, metavar="JSON")
    spect.add_argument("--out", default=None, metavar="CSV")
    spect.set_defaults(func=cmd_spectrum)

    rec = sub.add_parser("reconstruct", help="Sinc-reconstruct a run on a time grid.")
    rec.add_argument("--config", required=True, metavar="JSON")
    rec.add_argument("--t-grid", required=True, metavar="START:STOP:COUNT",
                     help="grid in units of scale_l, e.g. 0.1:0.9:9")
    rec.add_argument("--out", default=None, metavar="CSV")
    rec.add_argument("--window", type=int, default=None, metavar="HALFWIDTH",
                     help="restrict the sample window to this half width")
    rec.add_argument("--budget", type=int, default=DEFAULT_BUDGET_DIGITS, metavar="DIGITS")
    rec.set_defaults(func=cmd_reconstruct)

    mq = sub.add_parser("map-qm", help="Quantize h, evolve the automaton, compare.")
    mq.add_argument("--config", required=True, metavar="JSON")
    mq.add_argument("--out", default=None, metavar="CSV")
    mq.add_argument("--report", default=None, metavar="JSON")
    mq.set_defaults(func=cmd_mapqm)

    conv = sub.add_parser("convergence", help="Rounding error of round(M h)/M versus M.")
    conv.add_argument("--config", required=True, metavar="JSON")
    conv.add_argument("--m-values", default=None, metavar="M1,M2,...")
    conv.add_argument("--out", default=None, metavar="CSV")
    conv.set_defaults(func=cmd_convergence)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigSyntaxError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SYNTAX
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (LapseError, GuardBandError, FloatConversionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BRIDGE
    except AllModesOutOfBandError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAND
    except (ConfigFieldError, ShapeError, SymmetryError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SEMANTIC


def entrypoint() -> None:  # console script
    sys.exit(main())
