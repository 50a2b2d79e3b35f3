"""Experiment drivers for the CSBM NMI grids and the magnetic sweeps."""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import hierarchical_nmi, nmi, spectral_cluster
from .csbm import CsbmParams, generate
from .errors import InvalidParameter
from .magnetic import gen_directed_cycle, gen_nested_cycles, gen_tree_of_cycles, sweep

N_P = 60
SAMPLES = 20
P_IN = (0.4, 0.5, 0.6, 0.7, 0.8)
ETAS = (0.0, 0.1, 0.2, 0.3)
P_OUT = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
TWO_LEVEL = ((2, 2), (2, 3), (3, 3))

DIRECTED_CYCLE_SIZES = (3, 4, 5, 6, 10, 12, 15, 16)
TREE_LENGTHS = ((3, 3), (4, 4, 4), (3, 5), (3, 6))
NESTED_BASE = 6
NESTED_CHORDS = ((2, 0), (3, 0), (0, 2))

FIGURES = ("fig4", "fig5", "fig8", "fig10", "fig12")


@dataclass(frozen=True)
class Cell:
    sizes: tuple
    p_in: float
    p_out: float
    eta: float
    l: tuple


def sample_seed(base_seed: int, cell_index: int, sample: int) -> int:
    """Seed for one sample, derived only from its position in the grid."""
    return int(np.random.SeedSequence([base_seed, cell_index, sample]).generate_state(1)[0])


def run_sample(cell: Cell, seed: int, levelone_magnitude: bool) -> float:
    lg = generate(CsbmParams(cell.sizes, cell.p_in, cell.p_out, cell.eta, cell.l, seed))
    part = spectral_cluster(lg.graph, len(cell.sizes), cell.l, seed=seed,
                            levelone_magnitude=levelone_magnitude)
    if len(cell.sizes) == 1:
        return nmi(part.level_two, lg.truth.level_two)
    return hierarchical_nmi(part, lg.truth)["flat"]


def run_cell(cell: Cell, cell_index: int, samples: int = SAMPLES, base_seed: int = 0,
             levelone_magnitude: bool | None = None) -> np.ndarray:
    if levelone_magnitude is None:
        levelone_magnitude = len(cell.sizes) > 1
    return np.array([run_sample(cell, sample_seed(base_seed, cell_index, s), levelone_magnitude)
                     for s in range(samples)])


def fig4_cells(n_p: int = N_P) -> list[Cell]:
    return [Cell((n_p,), p, 0.0, eta, (l1,)) for l1 in (2, 3) for p in P_IN for eta in ETAS]


def fig5_cells(n_p: int = N_P, p_in=P_IN, p_out=P_OUT, etas=ETAS) -> list[Cell]:
    return [Cell((n_p, n_p), p, q, eta, ls)
            for ls in TWO_LEVEL for eta in etas for p in p_in for q in p_out if q <= p]


def run_grid(cells, samples: int = SAMPLES, base_seed: int = 0, threads: int = 1,
             levelone_magnitude: bool | None = None) -> list[dict]:
    def one(item):
        idx, cell = item
        vals = run_cell(cell, idx, samples, base_seed, levelone_magnitude)
        return {"sizes": "/".join(map(str, cell.sizes)), "l": "/".join(map(str, cell.l)),
                "p_in": cell.p_in, "p_out": cell.p_out, "eta": cell.eta,
                "nmi_mean": float(vals.mean()), "nmi_std": float(vals.std()),
                "samples": samples}

    items = list(enumerate(cells))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, items))
    return [one(it) for it in items]


def magnetic_graphs(figure: str) -> list[tuple[str, object]]:
    if figure == "fig8":
        return [(f"dcycle_{n}", gen_directed_cycle(n)) for n in DIRECTED_CYCLE_SIZES]
    if figure == "fig10":
        return [("treecycles_" + "_".join(map(str, ls)), gen_tree_of_cycles(ls)) for ls in TREE_LENGTHS]
    if figure == "fig12":
        return [(f"nested_{NESTED_BASE}_{a}_{b}", gen_nested_cycles(NESTED_BASE, a, b))
                for a, b in NESTED_CHORDS]
    raise InvalidParameter(f"{figure} is not a magnetic sweep figure")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(target, header, rows) -> None:
    """Write rows to a path or an open text stream."""
    if hasattr(target, "write"):
        w = csv.writer(target, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
        return
    with open(target, "w", newline="") as fh:
        write_csv(fh, header, rows)


SWEEP_HEADER = ("r", "lambda_min", "lambda_max", "predicted_zero", "predicted_two")
GRID_HEADER = ("sizes", "l", "p_in", "p_out", "eta", "nmi_mean", "nmi_std", "samples")


def write_svg(path, r, lo, hi, title: str) -> None:
    """A minimal two-curve line plot; decorative only."""
    w, h, pad = 480, 240, 30
    rmax = max(r)

    def pts(vals):
        return " ".join(f"{pad + (w - 2 * pad) * (ri - 1) / max(1, rmax - 1):.2f},"
                        f"{h - pad - (h - 2 * pad) * v / 2.0:.2f}" for ri, v in zip(r, vals))

    svg = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">'
           f'<text x="{pad}" y="18" font-size="12">{title}</text>'
           f'<rect x="{pad}" y="{pad}" width="{w - 2 * pad}" height="{h - 2 * pad}" fill="none" stroke="#888"/>'
           f'<polyline fill="none" stroke="#1f77b4" points="{pts(lo)}"/>'
           f'<polyline fill="none" stroke="#d62728" points="{pts(hi)}"/></svg>\n')
    Path(path).write_text(svg)


def repro(figure: str, outdir, samples: int = SAMPLES, base_seed: int = 0, threads: int = 1,
          quick: bool = False, svg: bool = False, r_max: int = 100) -> list[Path]:
    """Run one experiment and write its CSV file(s); returns the written paths.

    ``quick`` shrinks the CSBM grids (fewer parameter values) for smoke runs.
    """
    if figure not in FIGURES:
        raise InvalidParameter(f"unknown figure id {figure!r}; choose from {', '.join(FIGURES)}")
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if figure in ("fig4", "fig5"):
        if figure == "fig4":
            cells = fig4_cells()
            if quick:
                cells = [c for c in cells if c.p_in in (0.4, 0.8) and c.eta in (0.0, 0.3)]
        else:
            cells = fig5_cells() if not quick else fig5_cells(p_in=(0.4,), p_out=(0.0, 0.05), etas=(0.0, 0.2))
        rows = run_grid(cells, samples, base_seed, threads)
        path = out / f"{figure}_nmi.csv"
        write_csv(path, GRID_HEADER, ([row[k] for k in GRID_HEADER] for row in rows))
        written.append(path)
        return written
    for name, h in magnetic_graphs(figure):
        res = sweep(h, r_max, threads)
        path = out / f"{figure}_{name}.csv"
        write_csv(path, SWEEP_HEADER, res.rows())
        written.append(path)
        if svg:
            spath = out / f"{figure}_{name}.svg"
            write_svg(spath, list(res.r_values), list(res.lambda_min), list(res.lambda_max), name)
            written.append(spath)
    return written
