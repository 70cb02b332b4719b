"""CSV reading and figure rendering.

The input is the benchmark harness report schema: one row per
(family, solver, time budget) cell with mean_gap, mean_hamming and
frac_optimal aggregates.  Rendering is a pure function of the CSV given a
pinned matplotlib: fixed figure geometry, Agg backend, seeded svg ids.
"""

import csv
import math
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# exact zeros are common and must render on the log gap axis
GAP_FLOOR = 1e-10

# deterministic svg element ids across processes
matplotlib.rcParams["svg.hashsalt"] = "plotviz"

_REQUIRED = ("family", "solver", "time", "mean_gap", "mean_hamming")

_FORMATS = ("png", "svg")


class SchemaError(ValueError):
    """Report CSV does not carry the columns plotting needs."""


def read_report(path):
    """Parse a harness report CSV into row dicts, in file order.

    Raises SchemaError naming every missing required column.  Numeric
    fields are converted to float; the harness writes nan for cells that
    scored no instances and those rows pass through unchanged.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in _REQUIRED if c not in header]
        if missing:
            raise SchemaError(f"report is missing columns: {', '.join(missing)}")
        rows = []
        for row in reader:
            out = dict(row)
            for key in ("time", "mean_gap", "mean_hamming"):
                out[key] = float(row[key])
            rows.append(out)
    return rows


def _grouped(rows, key):
    """Group rows by key preserving first-appearance order."""
    order, groups = [], {}
    for row in rows:
        k = row[key]
        if k not in groups:
            order.append(k)
            groups[k] = []
        groups[k].append(row)
    return [(k, groups[k]) for k in order]


def _line_axes(ax, solver_rows, field):
    for solver, rows in solver_rows:
        times = [r["time"] for r in rows]
        values = [r[field] for r in rows]
        ax.plot(times, values, marker="o", markersize=3.5, linewidth=1.2,
                label=solver)
    ax.set_xscale("log")
    ax.set_xlabel("time budget [s]")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()


def family_figures(family, rows):
    """Build the (profile, hamming) figure pair for one family's rows."""
    solver_rows = _grouped(rows, "solver")

    profile = plt.figure(figsize=(6.4, 4.4), dpi=100)
    ax = profile.add_subplot(111)
    floored = [(s, [dict(r, mean_gap=max(r["mean_gap"], GAP_FLOOR))
                    if not math.isnan(r["mean_gap"]) else r for r in rs])
               for s, rs in solver_rows]
    _line_axes(ax, floored, "mean_gap")
    ax.set_yscale("log")
    ax.set_ylabel("mean relative gap")
    ax.set_title(f"{family} performance profile")
    profile.tight_layout()

    hamming = plt.figure(figsize=(6.4, 4.4), dpi=100)
    ax = hamming.add_subplot(111)
    _line_axes(ax, solver_rows, "mean_hamming")
    ax.set_ylabel("mean normalized Hamming distance")
    ax.set_ylim(bottom=0.0)
    ax.set_title(f"{family} Hamming distance")
    hamming.tight_layout()
    return profile, hamming


def _save(fig, path, fmt):
    kwargs = {"format": fmt}
    if fmt == "svg":
        # matplotlib stamps the creation date into svg unless told not to
        kwargs["metadata"] = {"Date": None}
    fig.savefig(path, **kwargs)
    plt.close(fig)


def plot_profiles(report_csv, out_dir, fmt="png"):
    """Render one profile and one hamming figure per family in the CSV.

    Returns the list of written paths, `<family>_profile.<fmt>` and
    `<family>_hamming.<fmt>` in family order.  A report with no data rows
    warns and returns an empty list.
    """
    if fmt not in _FORMATS:
        raise ValueError(f"format must be one of {_FORMATS}, got {fmt!r}")
    rows = read_report(report_csv)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not rows:
        warnings.warn(f"{report_csv}: no data rows, nothing to plot",
                      stacklevel=2)
        return []
    written = []
    for family, fam_rows in _grouped(rows, "family"):
        profile, hamming = family_figures(family, fam_rows)
        for fig, stem in ((profile, "profile"), (hamming, "hamming")):
            path = out / f"{family}_{stem}.{fmt}"
            _save(fig, path, fmt)
            written.append(path)
    return written
