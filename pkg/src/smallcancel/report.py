"""Delimited and graphical output for check runs.

Every writer takes a directory, drops one CSV with the raw rows and one
PNG rendering of the same data, and returns the written paths.  Figures
are rendered with the Agg backend so the writers work headless.
"""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .motions import CollisionReport, DiscreteMotion
from .workbench import ScanReport


def _ensure(directory: Union[str, Path]) -> Path:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def weight_report(
    directory: Union[str, Path],
    trials: Sequence[tuple[str, int, Fraction, int]],
) -> list[Path]:
    """Write curvature-total trials: (map name, trial, total, 2*chi)."""
    directory = _ensure(directory)
    csv_path = directory / "weight_trials.csv"
    _write_csv(
        csv_path,
        ["map", "trial", "curvature_total", "two_chi", "match"],
        [
            (name, trial, str(total), expected, total == expected)
            for name, trial, total, expected in trials
        ],
    )

    fig, ax = plt.subplots(figsize=(7, 4))
    names = sorted({name for name, _, _, _ in trials})
    for name in names:
        xs = [t for n, t, _, _ in trials if n == name]
        ys = [float(total) for n, _, total, _ in trials if n == name]
        ax.plot(xs, ys, "o", label=name, alpha=0.7)
    for _, trial, _, expected in trials:
        ax.plot(trial, expected, "k+", markersize=4)
    ax.set_xlabel("trial")
    ax.set_ylabel("sum of curvatures")
    ax.set_title("curvature totals against 2*chi (crosses)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    png_path = directory / "weight_trials.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def carcrash_report(
    directory: Union[str, Path],
    motion: DiscreteMotion,
    collisions: CollisionReport,
    motion_rows: str,
) -> list[Path]:
    """Write the collision table, the motion dump and a trajectory figure."""
    directory = _ensure(directory)
    csv_path = directory / "collisions.csv"
    _write_csv(
        csv_path,
        ["kind", "where", "times", "cars_present", "degree", "complete"],
        [
            (
                p.kind,
                p.where,
                "|".join(str(t) for t in p.times),
                p.cars_present,
                p.degree,
                p.complete,
            )
            for p in collisions.points
        ],
    )
    motion_path = directory / "motion.csv"
    motion_path.write_text(motion_rows, encoding="utf-8")

    faces = sorted(motion.cars)
    fig, axes = plt.subplots(
        len(faces), 1, figsize=(7, 2.6 * len(faces)), squeeze=False
    )
    for ax, f in zip(axes[:, 0], faces):
        for j, car in enumerate(motion.cars[f]):
            ts = [float(t) for t, _ in car.breakpoints]
            ss = [float(s) for _, s in car.breakpoints]
            ax.plot(ts, ss, marker=".", label=f"car {f}:{j}")
        for p in collisions.points:
            for t in p.times:
                ax.axvline(float(t), color="red" if p.complete else "gray",
                           linestyle=":", linewidth=0.8)
        ax.set_ylabel(f"face {f} position")
        ax.legend(fontsize=7)
    axes[-1, 0].set_xlabel("time (complete collisions in red)")
    fig.tight_layout()
    png_path = directory / "motion.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, motion_path, png_path]


def scan_report_files(
    directory: Union[str, Path], report: ScanReport, verbose: bool = False
) -> list[Path]:
    """Write scan rows and a per-length bar chart of candidate outcomes."""
    directory = _ensure(directory)
    csv_path = directory / "scan.csv"
    _write_csv(csv_path, ["record", "a", "b", "c", "d"],
               [tuple(r) + ("",) * (5 - len(r)) for r in report.rows(verbose)])

    by_length: dict[int, dict[str, int]] = {}
    for record in report.records:
        word, _, rest = record.partition(" ")
        status = rest.split(":", 1)[0]
        counts = by_length.setdefault(len(word), {})
        counts[status] = counts.get(status, 0) + 1
    statuses = sorted({s for c in by_length.values() for s in c})
    lengths = sorted(by_length)
    fig, ax = plt.subplots(figsize=(7, 4))
    bottom = [0] * len(lengths)
    for status in statuses:
        heights = [by_length[n].get(status, 0) for n in lengths]
        ax.bar(lengths, heights, bottom=bottom, label=status)
        bottom = [b + h for b, h in zip(bottom, heights)]
    ax.set_xlabel("candidate length")
    ax.set_ylabel("candidate classes")
    title = "free-group scan" if report.parameters.kind == "free" else "presentation scan"
    ax.set_title(f"{title}: {report.candidates_tested} classes, "
                 f"{len(report.counterexamples)} counterexamples")
    ax.legend(fontsize=8)
    fig.tight_layout()
    png_path = directory / "scan.png"
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]
