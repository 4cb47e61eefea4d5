"""Parameter sweeps, figure presets and CSV output."""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import an, mrt
from ._common import STATUS_DEGENERATE, STATUS_ERROR, STATUS_OK
from .config import FIELD_NAMES, SystemConfig
from .montecarlo import MODES, McParams, default_threads, mc_metric

SCHEMES = ("mrt", "an", "both")
METRICS = ("pc", "sop", "throughput", "eta_star", "cdf", "laplace")
MODELS = ("noncolluding", "colluding")
INT_FIELDS = ("n_t", "l_d", "l_e", "n_approx")
MC_METRICS = ("pc", "sop", "cdf", "laplace")


@dataclass(frozen=True)
class Sweep:
    name: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in FIELD_NAMES and self.name not in ("mu", "x", "s"):
            raise ValueError(f"unknown sweep parameter {self.name!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"sweep steps must be a positive integer, got {self.steps}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"sweep scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not (self.start > 0 and self.stop > 0):
            raise ValueError("log sweeps need positive bounds")

    def values(self) -> list:
        if self.scale == "log":
            vals = np.geomspace(self.start, self.stop, int(self.steps))
        else:
            vals = np.linspace(self.start, self.stop, int(self.steps))
        if self.name in INT_FIELDS:
            rounded = np.rint(vals)
            if np.any(np.abs(rounded - vals) > 1e-9):
                raise ValueError(f"sweep over integer field {self.name!r} hits non-integer values")
            return [int(v) for v in rounded]
        return [float(v) for v in vals]


@dataclass(frozen=True)
class McSpec:
    trials: int = 10_000
    seed: int = 1
    mode: str = "analysis"
    r_max: float | None = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"mc.trials must be a positive integer, got {self.trials}")
        if self.mode not in MODES:
            raise ValueError(f"mc.mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    scheme: str
    metric: str
    sweep: Sweep
    base: SystemConfig = field(default_factory=SystemConfig)
    eavesdropper_model: str = "noncolluding"
    mu: float | None = None
    x: float | None = None
    s: float | None = None
    mc: McSpec | None = None
    output: str | None = None
    label: str = ""
    note: str = ""

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.eavesdropper_model not in MODELS:
            raise ValueError(f"eavesdropper_model must be one of {MODELS}")
        if self.metric == "cdf" and self.x is None and self.sweep.name != "x":
            raise ValueError("metric 'cdf' needs x (fixed or swept)")
        if self.metric == "laplace" and self.s is None and self.sweep.name != "s":
            raise ValueError("metric 'laplace' needs s (fixed or swept)")
        if self.mc is not None and self.metric not in MC_METRICS:
            raise ValueError(f"Monte Carlo is not available for metric {self.metric!r}")

    @property
    def schemes(self) -> tuple[str, ...]:
        return ("mrt", "an") if self.scheme == "both" else (self.scheme,)

    def point_configs(self) -> list[tuple[float, SystemConfig, dict]]:
        """Config and conditioning point for every sweep value (validated eagerly)."""
        out = []
        for value in self.sweep.values():
            cond = {"mu": self.mu, "x": self.x, "s": self.s}
            if self.sweep.name in cond:
                cond[self.sweep.name] = value
                cfg = self.base
            else:
                cfg = self.base.replace(**{self.sweep.name: value})
            if cond["mu"] is None:
                # condition on the mean destination gain E[mu] = L_d
                cond["mu"] = float(cfg.l_d)
            out.append((value, cfg, cond))
        return out

    def columns(self) -> list[str]:
        cols = [self.sweep.name]
        for sch in self.schemes:
            cols.append(f"analytic_{sch}")
            if sch == "an" and self.metric in ("cdf", "sop") and self.eavesdropper_model == "noncolluding":
                cols.append("analytic_an_exact")
            if self.mc is not None:
                cols += [f"mc_mean_{sch}", f"mc_stderr_{sch}"]
            cols.append(f"status_{sch}")
        return cols + ["note"]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _analytic(metric: str, scheme: str, model: str, cfg: SystemConfig, cond: dict) -> tuple[float, str, dict]:
    """Closed-form value, status and any extra columns for one cell."""
    pmf = cfg.pmf() if metric != "pc" else None
    mu = cond["mu"]
    extra: dict = {}
    if metric == "pc":
        val = mrt.connection_probability_mrt(cfg) if scheme == "mrt" else an.connection_probability_an(cfg)
        return val, STATUS_OK, extra
    if metric == "sop":
        eta = 1.0 if scheme == "mrt" else cfg.eta
        status = mrt.sop_status(mu, cfg, eta)
        if scheme == "mrt":
            f = mrt.sop_noncolluding_mrt if model == "noncolluding" else mrt.sop_colluding_mrt
            val = f(mu, cfg, pmf)
        else:
            if model == "noncolluding":
                val = an.sop_noncolluding_an(mu, cfg, pmf)
                extra["analytic_an_exact"] = an.sop_noncolluding_an(mu, cfg, pmf, cdf="exact")
            else:
                val = an.sop_colluding_an(mu, cfg, pmf)
        return val, status, extra
    if metric == "throughput":
        if scheme == "mrt":
            return mrt.secrecy_throughput_mrt(cfg, pmf), STATUS_OK, extra
        return an.secrecy_throughput_an(cfg, pmf), STATUS_OK, extra
    if metric == "eta_star":
        if scheme == "mrt":
            return 1.0, STATUS_OK, extra
        opt = an.optimal_eta(mu, cfg, pmf)
        return opt.eta_star, opt.status, extra
    if metric == "cdf":
        x = cond["x"]
        if scheme == "mrt":
            return mrt.cdf_xe_mrt(x, mu, cfg, pmf), STATUS_OK, extra
        extra["analytic_an_exact"] = an.cdf_xe_an_exact(x, mu, cfg, pmf)
        return an.cdf_xe_an_bound(x, mu, cfg, pmf), STATUS_OK, extra
    if metric == "laplace":
        s = cond["s"]
        if scheme == "mrt":
            return mrt.laplace_ie_mrt(s, cfg, pmf), STATUS_OK, extra
        return an.laplace_ie_an(s, mu, cfg, pmf), STATUS_OK, extra
    raise ValueError(metric)


_MC_NAME = {"pc": "connection", "cdf": "cdf_point", "laplace": "laplace_point"}


def _mc(spec: ExperimentSpec, scheme: str, cfg: SystemConfig, cond: dict):
    metric = _MC_NAME.get(spec.metric) or f"sop_{spec.eavesdropper_model}"
    params = McParams(cfg=cfg, scheme=scheme, mode=spec.mc.mode, mu=cond["mu"], x=cond["x"],
                      s=cond["s"], r_max=spec.mc.r_max)
    # the same seed for every cell keeps rows comparable across schemes
    return mc_metric(metric, params, spec.mc.trials, spec.mc.seed, threads=1)


def _row(spec: ExperimentSpec, value, cfg: SystemConfig, cond: dict) -> tuple[dict, list[dict]]:
    row: dict = {spec.sweep.name: value, "note": spec.note}
    errors = []
    for sch in spec.schemes:
        try:
            val, status, extra = _analytic(spec.metric, sch, spec.eavesdropper_model, cfg, cond)
            row[f"analytic_{sch}"] = val
            row.update(extra)
            if spec.mc is not None:
                est = _mc(spec, sch, cfg, cond)
                row[f"mc_mean_{sch}"] = est.mean
                row[f"mc_stderr_{sch}"] = est.std_error
        except an.AnBoundDegenerateError as exc:
            status = STATUS_DEGENERATE
            row.setdefault("note", "")
            row["note"] = "; ".join(filter(None, [row["note"], str(exc)]))
        except (ValueError, ArithmeticError) as exc:
            status = STATUS_ERROR
            errors.append({"error": type(exc).__name__, "message": str(exc), "scheme": sch,
                           "sweep": spec.sweep.name, "value": value, "label": spec.label})
        row[f"status_{sch}"] = status
    return row, errors


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    errors: list[dict]

    @property
    def ok(self) -> bool:
        return not any(
            v == STATUS_ERROR for r in self.rows for k, v in r.items() if k.startswith("status_")
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow([_fmt(r.get(c)) for c in self.columns])
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def run(spec: ExperimentSpec, threads: int | None = None) -> Table:
    """Evaluate every sweep point; rows come back in sweep order."""
    try:
        points = spec.point_configs()
    except ValueError as exc:
        err = {"error": "ValueError", "message": str(exc), "label": spec.label}
        return Table(spec.columns(), [], [err])
    threads = threads or default_threads()
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda p: _row(spec, *p), points))
    else:
        results = [_row(spec, *p) for p in points]
    rows = [r for r, _ in results]
    errors = [e for _, errs in results for e in errs]
    return Table(spec.columns(), rows, errors)


def run_many(specs: list[ExperimentSpec], threads: int | None = None) -> Table:
    """Run several specs into one table with a leading ``series`` column."""
    tables = [run(s, threads) for s in specs]
    columns = ["series"]
    for t in tables:
        for c in t.columns:
            if c not in columns:
                columns.append(c)
    # keep 'note' last
    columns.remove("note")
    columns.append("note")
    rows = []
    for spec, t in zip(specs, tables):
        for r in t.rows:
            rows.append({"series": spec.label, **r})
    errors = [e for t in tables for e in t.errors]
    if any(not t.rows for t in tables):
        # a spec that failed validation has no rows; surface it as an error row
        for spec, t in zip(specs, tables):
            if not t.rows:
                rows.append({"series": spec.label, **{f"status_{s}": STATUS_ERROR for s in spec.schemes}})
    return Table(columns, rows, errors)


# ---------------------------------------------------------------------------
# Spec files
# ---------------------------------------------------------------------------

def _coerce(name: str, text: str):
    text = text.strip()
    if name in INT_FIELDS or name in ("sweep.steps", "mc.trials", "mc.seed"):
        v = float(text)
        if not v.is_integer():
            raise ValueError(f"{name} must be an integer, got {text!r}")
        return int(v)
    if name in ("scheme", "metric", "eavesdropper_model", "sweep.name", "sweep.scale", "mc.mode",
                "output", "label", "note"):
        return text
    return float(text)


def parse_spec_text(text: str, overrides: list[str] | None = None) -> ExperimentSpec:
    """Build a spec from flat ``key = value`` lines; ``overrides`` (``key=value``) win."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    parser.read_string("[spec]\n" + text)
    items = dict(parser["spec"])
    for ov in overrides or []:
        if "=" not in ov:
            raise ValueError(f"override must look like key=value, got {ov!r}")
        k, v = ov.split("=", 1)
        items[k.strip()] = v.strip()
    return spec_from_items(items)


def spec_from_items(items: dict[str, str]) -> ExperimentSpec:
    known_top = {"scheme", "metric", "eavesdropper_model", "output", "label", "note"}
    base, sweep, mc, top, at = {}, {}, {}, {}, {}
    for key, raw in items.items():
        if key.startswith("base."):
            name = key[5:]
            if name not in FIELD_NAMES:
                raise ValueError(f"unknown config field {name!r}")
            base[name] = _coerce(name, raw)
        elif key.startswith("sweep."):
            sweep[key[6:]] = _coerce(key, raw)
        elif key.startswith("mc."):
            mc[key[3:]] = _coerce(key, raw)
        elif key.startswith("at."):
            if key[3:] not in ("mu", "x", "s"):
                raise ValueError(f"unknown conditioning key {key!r}")
            at[key[3:]] = _coerce(key, raw)
        elif key in known_top:
            top[key] = _coerce(key, raw)
        else:
            raise ValueError(f"unknown spec key {key!r}")
    for req in ("scheme", "metric"):
        if req not in top:
            raise ValueError(f"spec is missing {req!r}")
    for req in ("name", "start", "stop", "steps"):
        if req not in sweep:
            raise ValueError(f"spec is missing sweep.{req}")
    return ExperimentSpec(
        scheme=top["scheme"],
        metric=top["metric"],
        eavesdropper_model=top.get("eavesdropper_model", "noncolluding"),
        sweep=Sweep(**sweep),
        base=SystemConfig(**base),
        mc=McSpec(**mc) if mc else None,
        output=top.get("output"),
        label=top.get("label", ""),
        note=top.get("note", ""),
        **at,
    )


def load_spec(path: str, overrides: list[str] | None = None) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec_text(fh.read(), overrides)


# ---------------------------------------------------------------------------
# Figure presets
# ---------------------------------------------------------------------------

PRESET_IDS = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10", "fig11", "fig12")
PRESET_MC = McSpec(trials=10_000, seed=20240611)

# shared scenario defaults: 100 antennas, alpha = 4, noise -60 dBm
_BASE = SystemConfig(n_t=100, alpha=4.0, noise_dbm=-60.0)


def preset(fig_id: str, mc: McSpec | None = PRESET_MC) -> list[ExperimentSpec]:
    """Specs reproducing the parameter sets of a figure (one spec per curve family)."""
    if fig_id not in PRESET_IDS:
        raise ValueError(f"unknown preset {fig_id!r}; choose from {', '.join(PRESET_IDS)}")
    specs: list[ExperimentSpec] = []

    def add(label, scheme, metric, sweep, cfg, model="noncolluding", note="", use_mc=True, **at):
        specs.append(ExperimentSpec(
            scheme=scheme, metric=metric, sweep=sweep, base=cfg, eavesdropper_model=model,
            mc=mc if (use_mc and metric in MC_METRICS) else None, label=label, note=note, **at,
        ))

    if fig_id == "fig3":
        cfg = _BASE.replace(l_d=20, l_e=20, lambda_e=1.0, p_dbm=0.0)
        for eta in (0.2, 0.5, 0.9):
            add(f"eta={eta}", "an", "cdf", Sweep("x", 1e2, 1e6, 41, "log"), cfg.replace(eta=eta),
                note="eta set chosen for the curves; mu fixed at E[mu]=L_d")
    elif fig_id == "fig4":
        cfg = _BASE.replace(p_dbm=0.0, r_d=50.0, l_e=20, eta=0.5, r_s=4.0, r_t=6.0)
        for lam in (1e-5, 5e-6):
            for model in MODELS:
                add(f"lambda={lam},{model}", "both", "sop", Sweep("l_d", 10, 30, 11),
                    cfg.replace(lambda_e=lam), model=model, note="mu fixed at E[mu]=L_d")
    elif fig_id in ("fig5", "fig6"):
        cfg = _BASE.replace(p_dbm=10.0, l_e=20, lambda_e=5e-6, epsilon=0.01)
        metric, scheme = ("eta_star", "an") if fig_id == "fig5" else ("throughput", "both")
        for r_d in (40.0, 50.0, 60.0):
            add(f"r_d={r_d}", scheme, metric, Sweep("l_d", 10, 30, 11), cfg.replace(r_d=r_d),
                note="r_d set chosen for the curves" + ("; mu fixed at E[mu]=L_d" if fig_id == "fig5" else ""))
    elif fig_id == "fig7":
        cfg = _BASE.replace(p_dbm=10.0, l_d=20, r_d=50.0, epsilon=0.01)
        for l_e in (10, 20, 30):
            add(f"l_e={l_e}", "an", "eta_star", Sweep("lambda_e", 1e-6, 1e-4, 21, "log"),
                cfg.replace(l_e=l_e), note="L_e set chosen for the curves; mu fixed at E[mu]=L_d")
    elif fig_id == "fig8":
        cfg = _BASE.replace(p_dbm=10.0, l_d=20, r_d=50.0, epsilon=0.01)
        for lam in (1e-6, 5e-6, 1e-5):
            add(f"lambda={lam}", "both", "throughput", Sweep("l_e", 2, 40, 20),
                cfg.replace(lambda_e=lam), note="lambda set chosen for the curves")
    elif fig_id in ("fig9", "fig10"):
        cfg = _BASE.replace(l_d=20, l_e=20, r_d=50.0, lambda_e=5e-6)
        metric, scheme = ("eta_star", "an") if fig_id == "fig9" else ("throughput", "both")
        for eps in (0.1, 0.01):
            add(f"epsilon={eps}", scheme, metric, Sweep("p_dbm", 0.0, 40.0, 21),
                cfg.replace(epsilon=eps),
                note="epsilon set {0.1, 0.01} chosen; the caption does not list it"
                + ("; mu fixed at E[mu]=L_d" if fig_id == "fig9" else ""))
    elif fig_id == "fig11":
        cfg = _BASE.replace(p_dbm=0.0, r_d=50.0, l_d=20, l_e=20, lambda_e=1e-5, r_t=6.0)
        for n in range(1, 6):
            add(f"N={n}", "mrt", "sop", Sweep("r_s", 0.0, 0.2, 11), cfg.replace(n_approx=n),
                model="colluding", note="mu fixed at E[mu]=L_d")
    elif fig_id == "fig12":
        cfg = _BASE.replace(p_dbm=10.0, r_t=6.0, eta=0.8)
        for r_d in (40.0, 50.0):
            add(f"r_d={r_d}", "both", "pc", Sweep("l_d", 10, 30, 21), cfg.replace(r_d=r_d))
    return specs


def write_table(table: Table, path: str) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(table.to_csv())


def spec_summary(spec: ExperimentSpec) -> dict:
    d = dataclasses.asdict(spec)
    d["rows"] = len(spec.sweep.values())
    return d


__all__ = [
    "ExperimentSpec", "McSpec", "Sweep", "Table", "PRESET_IDS", "load_spec", "parse_spec_text",
    "preset", "run", "run_many", "spec_summary", "write_table",
]
