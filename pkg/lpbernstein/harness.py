"""Seeded sweeps over polynomial batteries, summaries and report files."""
import csv
import json
import logging
import math
import os
import time
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from typeguard import typechecked

from .arcsets import ArcSet, Block, block_properties, partition_small
from .equilibrium import density_model_for
from .errors import InvalidParameters
from .functionals import functionals
from .lemmas import profile_for_block, verify_localization, verify_symmetrization_lemmas
from .models import (ExperimentConfig, Family, MarginRecord, ParamSet, QuadSpec, SweepRow,
                     SweepSummary, margin_record_schema, sweep_row_schema, sweep_summary_schema)
from .protocols import DensityModel, Evaluable
from .trigpoly import ChebyshevComposite, TrigPoly
from .tset import TSet, single_arc

log = logging.getLogger(__name__)

TREND_SLACK = 0.1
BOUND_FLOOR = 1.05


@typechecked
def random_trigpoly(n: int, seed: int) -> TrigPoly:
    """Degree-n polynomial with i.i.d. standard normal coefficients.

    One numpy PCG64 generator seeded with ``seed`` draws 2n+1 values: the
    first n+1 are a_0..a_n, the remaining n are b_1..b_n.
    """
    if n < 1:
        raise InvalidParameters(f"random polynomials need degree >= 1, got {n}")
    draws = np.random.default_rng(seed).standard_normal(2 * n + 1)
    return TrigPoly(draws[:n + 1], draws[n + 1:], degree=n)


def resolve_set(cfg: ExperimentConfig) -> Tuple[Optional[TSet], DensityModel]:
    """The T-set (if any) and density model a config describes."""
    cfg.validate()
    if cfg.tset is not None:
        tset = TSet.from_spec(cfg.tset)
    elif cfg.single_arc_beta is not None:
        tset = single_arc(cfg.single_arc_beta)
    else:
        arcs = ArcSet.from_spec(cfg.arcs)
        return None, density_model_for(arcs, cfg.collocation_degree)
    return tset, density_model_for(tset)


def _battery(cfg: ExperimentConfig, tset: Optional[TSet],
             n: int) -> Iterable[Tuple[Optional[int], Optional[int], Evaluable]]:
    if cfg.family is Family.RANDOM:
        for seed in cfg.seeds:
            yield seed, None, random_trigpoly(n, seed)
        return
    U = tset.U if tset is not None else TrigPoly([0.0, 1.0])
    if n % U.degree:
        log.warning("skipping n=%d: not a multiple of deg U = %d", n, U.degree)
        return
    yield None, n // U.degree, ChebyshevComposite.chebyshev(n // U.degree, U)


def _row(tn: Evaluable, n: int, p: float, dens: DensityModel, spec: QuadSpec,
         seed: Optional[int], k: Optional[int]) -> SweepRow:
    start = time.perf_counter()
    values = functionals(tn, n, dens.arcs, dens, p, spec)
    ratio = values.A / values.B if values.B > 0 else 0.0
    return SweepRow(n=n, p=p, seed=seed, k=k, A=values.A, B=values.B, ratio=ratio,
                    quad_error=values.quad_error, flagged=values.flagged,
                    wall_time=time.perf_counter() - start)


def bernstein_sweep(cfg: ExperimentConfig, dens: Optional[DensityModel] = None,
                    tset: Optional[TSet] = None) -> List[SweepRow]:
    """A/B with effective degree n for every (n, p, battery member)."""
    if dens is None:
        tset, dens = resolve_set(cfg)
    else:
        cfg.validate()
    rows = []
    for n in cfg.n_ladder:
        for seed, k, tn in _battery(cfg, tset, n):
            for p in cfg.p_values:
                rows.append(_row(tn, n, p, dens, cfg.quad, seed, k))
        log.info("%s: n=%d done (%d rows)", cfg.name, n, len(rows))
    return sorted(rows, key=_row_key)


def _row_key(row: SweepRow):
    return row.p, row.n, -1 if row.seed is None else row.seed, row.k or 0


def sharpness_sweep(tset: TSet, p: float, ks: Sequence[int],
                    spec: Optional[QuadSpec] = None,
                    dens: Optional[DensityModel] = None) -> List[SweepRow]:
    """A/B for T_k(U), effective degree kN."""
    if not 0 < p < 1:
        raise InvalidParameters(f"sharpness sweeps need 0 < p < 1, got {p}")
    dens = dens or density_model_for(tset)
    spec = spec or QuadSpec()
    return [_row(ChebyshevComposite.chebyshev(k, tset.U), k * tset.N, p, dens, spec, None, k)
            for k in ks]


def maxima(rows: Sequence[SweepRow], p: float) -> Dict[int, float]:
    """Per-n maximum ratio over unflagged rows."""
    best: Dict[int, float] = {}
    skipped = 0
    for row in rows:
        if row.p != p:
            continue
        if row.flagged:
            skipped += 1
            continue
        best[row.n] = max(best.get(row.n, -math.inf), row.ratio)
    if skipped:
        log.warning("excluded %d flagged rows at p=%s from the maxima", skipped, p)
    return dict(sorted(best.items()))


def trend_holds(values: Sequence[float], slack: float = TREND_SLACK) -> bool:
    """The excess e = max(m - 1, 0) never grows by more than slack * max(e, 0.1)."""
    excess = [max(v - 1, 0.0) for v in values]
    return all(b <= a + slack * max(a, 0.1) for a, b in zip(excess, excess[1:]))


def summarize(rows: Sequence[SweepRow], name: str, p: float) -> SweepSummary:
    per_n = maxima(rows, p)
    values = list(per_n.values())
    battery = len({(row.seed, row.k) for row in rows if row.p == p})
    bound = bool(values) and values[-1] <= max(BOUND_FLOOR, values[0])
    return SweepSummary(name=name, p=p, battery_size=battery, n_values=list(per_n),
                        maxima=values, bound_passed=bound, trend_passed=bool(values) and
                        trend_holds(values),
                        flagged_rows=sum(1 for row in rows if row.p == p and row.flagged))


def choose_block(tset: TSet, n: int, params: ParamSet,
                 block: Optional[Sequence[int]] = None) -> Block:
    """The configured block, or the first single cell whose hull sits in one branch."""
    partition = partition_small(tset.E, n, params, finest=True)
    if block is not None:
        return partition.block(block[0], block[1])
    for start in range(len(partition.cells)):
        candidate = partition.block(start, start + 1)
        if tset.branch_containing(*candidate.hull) is not None:
            return candidate
    raise InvalidParameters(f"no single-cell block at n={n} lies inside one branch of {tset.E}")


def lemma_battery(tset: TSet, dens: DensityModel, ns: Sequence[int], seeds: Sequence[int],
                  params: ParamSet, spec: Optional[QuadSpec] = None,
                  block: Optional[Sequence[int]] = None) -> List[MarginRecord]:
    """Symmetrization and localization slacks for random T_n over seeds and n."""
    records = []
    for n in ns:
        blk = choose_block(tset, n, params, block)
        qp = profile_for_block(blk, params)
        for seed in seeds:
            tn = random_trigpoly(n, seed)
            report = block_properties(tset, tn, blk, params, dens, spec)
            log.debug("n=%d seed=%d block %s: %s", n, seed, blk.H, report)
            records += verify_symmetrization_lemmas(tset, tn, blk, qp, params.p, dens, spec, seed)
            records += verify_localization(tn, blk, qp, dens.arcs, params, dens, spec, seed)
    return records


def _ensure_dir(path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)


def write_csv(path: str, records: Sequence[dict]) -> None:
    _ensure_dir(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        if not records:
            return
        writer = csv.DictWriter(f, fieldnames=list(records[0].keys()))
        writer.writeheader()
        writer.writerows(records)


def write_rows(path: str, rows: Sequence[SweepRow]) -> None:
    write_csv(path, sweep_row_schema.dump(list(rows), many=True))


def write_density(path: str, t: np.ndarray, values: np.ndarray) -> None:
    write_csv(path, [{"t": float(a), "omega": float(b)} for a, b in zip(t, values)])


def summary_record(summary: SweepSummary) -> dict:
    record = sweep_summary_schema.dump(summary)
    record["passed"] = summary.passed
    return record


def write_json(path: str, payload: Union[dict, list]) -> None:
    _ensure_dir(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")


def write_margins(path: str, records: Sequence[MarginRecord]) -> None:
    payload = []
    for record in records:
        entry = margin_record_schema.dump(record)
        entry["holds"] = record.holds
        payload.append(entry)
    write_json(path, payload)

