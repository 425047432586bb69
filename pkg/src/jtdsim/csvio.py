"""Plain-text CSV formats for surfaces, histograms, spectra and curves.

Every file starts with ``#`` comment lines: a provenance line carrying the
package version and config hash, optional ``# key=value`` metadata, and for
matrices a bare unit line (``# fs`` or ``# rad/fs``).  Matrices put the idler
axis in the first row and the signal axis in the first column.
"""
from __future__ import annotations

import math

import numpy as np

from . import __version__
from .errors import ParseError
from .measurement import CountsSurface, Histogram1D, ScanSurface

UNIT_LINES = ("fs", "rad/fs")
RATE_KEYS = ("background_rate_hz", "peak_singles_rate_hz",
             "peak_coincidence_rate_hz", "coincidence_window_ns")


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def header(config_hash: str | None = None, **meta) -> list[str]:
    lines = [f"# jtdsim {__version__} config={config_hash or 'none'}"]
    lines += [f"# {key}={value}" for key, value in meta.items()]
    return lines


def _finish(lines) -> str:
    return "\n".join(lines) + "\n"


def format_matrix(rows, cols, values, unit="fs", config_hash=None, integer=False, **meta) -> str:
    if unit not in UNIT_LINES:
        raise ValueError(f"unit must be one of {UNIT_LINES}")
    lines = header(config_hash, **meta) + [f"# {unit}"]
    lines.append("," + ",".join(_num(c) for c in cols))
    fmt = (lambda v: str(int(v))) if integer else _num
    for r, row in zip(rows, np.asarray(values)):
        lines.append(_num(r) + "," + ",".join(fmt(v) for v in row))
    return _finish(lines)


def format_surface(surface: ScanSurface, config_hash=None) -> str:
    return format_matrix(surface.delays_s, surface.delays_i, surface.values, "fs",
                         config_hash, kind="surface",
                         normalized=str(bool(surface.normalized)).lower())


def format_counts(counts: CountsSurface, config_hash=None) -> str:
    meta = {"kind": "counts", "dwell_s": _num(counts.dwell_s),
            "seed": "none" if counts.seed is None else int(counts.seed)}
    meta.update({k: _num(v) for k, v in counts.rates.items()})
    return format_matrix(counts.delays_s, counts.delays_i, counts.counts, "fs",
                         config_hash, integer=True, **meta)


def format_density(d, config_hash=None) -> str:
    unit = "fs" if d.domain == "temporal" else "rad/fs"
    return format_matrix(d.grid_s.values, d.grid_i.values, d.values, unit, config_hash,
                         kind="density", domain=d.domain)


def format_histograms(histograms, config_hash=None) -> str:
    """One ``delay_fs,value`` file; several histograms become extra columns."""
    histograms = list(histograms)
    delays = histograms[0].delays
    for h in histograms[1:]:
        if not np.array_equal(h.delays, delays):
            raise ValueError("histograms must share their delay axis")
    names = ["value"] if len(histograms) == 1 else [h.kind for h in histograms]
    lines = header(config_hash, kinds=";".join(h.kind for h in histograms))
    lines.append("delay_fs," + ",".join(names))
    for j, t in enumerate(delays):
        lines.append(_num(t) + "," + ",".join(_num(h.values[j]) for h in histograms))
    return _finish(lines)


def format_profiles(bandwidths, histograms, config_hash=None) -> str:
    delays = histograms[0].delays
    lines = header(config_hash, kind="profiles")
    lines.append("delay_fs," + ",".join(f"pump_{_num(b)}nm" for b in bandwidths))
    for j, t in enumerate(delays):
        lines.append(_num(t) + "," + ",".join(_num(h.values[j]) for h in histograms))
    return _finish(lines)


# ---------------------------------------------------------------------------
# parsing

def _split(text: str):
    meta, unit, body = {}, None, []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            content = line[1:].strip()
            if content in UNIT_LINES:
                unit = content
            elif "=" in content and not content.startswith("jtdsim"):
                key, _, value = content.partition("=")
                meta[key.strip()] = value.strip()
            continue
        body.append((lineno, line.split(",")))
    return meta, unit, body


def _float(cell, row, col):
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"not a number: {cell!r}", row, col) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {cell!r}", row, col)
    return value


def _monotone(axis, what, row=None, col=None):
    if len(axis) < 2:
        raise ParseError(f"{what} axis needs at least two entries", row, col)
    if np.any(np.diff(axis) <= 0):
        bad = int(np.nonzero(np.diff(axis) <= 0)[0][0]) + 2
        raise ParseError(f"{what} axis is not strictly increasing at entry {bad}", row, col)


def parse_matrix(text: str):
    """Return ``(meta, unit, rows, cols, values, line_numbers)`` from a matrix CSV."""
    meta, unit, body = _split(text)
    if len(body) < 2:
        raise ParseError("matrix body is empty")
    head_line, head = body[0]
    cols = np.array([_float(c, head_line, j + 2) for j, c in enumerate(head[1:])])
    _monotone(cols, "idler", row=head_line)
    width = len(head)
    rows, values, linenos = [], [], []
    for lineno, cells in body[1:]:
        linenos.append(lineno)
        if len(cells) != width:
            raise ParseError(f"expected {width} fields, found {len(cells)}", lineno)
        rows.append(_float(cells[0], lineno, 1))
        values.append([_float(c, lineno, j + 2) for j, c in enumerate(cells[1:])])
    rows = np.array(rows)
    _monotone(rows, "signal", col=1)
    return meta, unit, rows, cols, np.array(values), linenos


def load_surface(text: str):
    """Parse a surface or counts CSV.

    Files tagged ``kind=counts`` (or with an all-integer body and a
    ``dwell_s`` entry) load as :class:`CountsSurface`, anything else as a
    :class:`ScanSurface`.
    """
    meta, _, rows, cols, values, linenos = parse_matrix(text)
    kind = meta.get("kind")
    is_counts = kind == "counts" or (
        kind is None and "dwell_s" in meta and np.all(values == np.round(values)))
    if is_counts:
        neg = np.argwhere(values < 0)
        if neg.size:
            j, k = neg[0]
            raise ParseError("negative count", row=linenos[int(j)], column=int(k) + 2)
        frac = np.argwhere(values != np.round(values))
        if frac.size:
            j, k = frac[0]
            raise ParseError("count is not an integer", row=linenos[int(j)], column=int(k) + 2)
        seed = meta.get("seed", "none")
        rates = {k: float(meta[k]) for k in RATE_KEYS if k in meta}
        return CountsSurface(rows, cols, values.astype(np.int64),
                             float(meta.get("dwell_s", "nan")),
                             None if seed == "none" else int(seed), rates)
    neg = np.argwhere(values < 0)
    if neg.size:
        j, k = neg[0]
        raise ParseError("negative value", row=linenos[int(j)], column=int(k) + 2)
    return ScanSurface(rows, cols, values, meta.get("normalized") == "true")


def load_histograms(text: str) -> list[Histogram1D]:
    meta, _, body = _split(text)
    if len(body) < 2:
        raise ParseError("histogram body is empty")
    names = body[0][1]
    if names[0] != "delay_fs":
        raise ParseError("first column must be delay_fs", body[0][0], 1)
    kinds = meta.get("kinds", "coincidence").split(";")
    data = []
    for lineno, cells in body[1:]:
        if len(cells) != len(names):
            raise ParseError(f"expected {len(names)} fields, found {len(cells)}", lineno)
        data.append([_float(c, lineno, j + 1) for j, c in enumerate(cells)])
    data = np.array(data)
    _monotone(data[:, 0], "delay", col=1)
    return [Histogram1D(data[:, 0], data[:, j + 1], kinds[j]) for j in range(len(kinds))]


def load_table(text: str):
    """Generic headed numeric table: returns ``(meta, names, columns)``."""
    meta, _, body = _split(text)
    if not body:
        raise ParseError("table is empty")
    names = body[0][1]
    data = []
    for lineno, cells in body[1:]:
        if len(cells) != len(names):
            raise ParseError(f"expected {len(names)} fields, found {len(cells)}", lineno)
        data.append([_float(c, lineno, j + 1) for j, c in enumerate(cells)])
    data = np.array(data, dtype=float).reshape(-1, len(names))
    return meta, names, {name: data[:, j] for j, name in enumerate(names)}


def load_density(text: str):
    from .biphoton import AxisGrid, JointDensity

    meta, unit, rows, cols, values, _ = parse_matrix(text)
    domain = meta.get("domain") or ("spectral" if unit == "rad/fs" else "temporal")
    return JointDensity(domain, AxisGrid.from_values(rows), AxisGrid.from_values(cols), values)


def format_spectrum(spectrum, config_hash=None) -> str:
    """``n,lambda`` rows followed by a summary block."""
    from .schmidt import report

    rep = report(spectrum)
    lines = header(config_hash, kind="schmidt")
    lines.append("n,lambda")
    lines += [f"{n},{_num(lam)}" for n, lam in enumerate(spectrum.eigenvalues)]
    lines.append("entropy_bits,purity,schmidt_number")
    lines.append(f"{_num(rep.entropy_bits)},{_num(rep.purity)},{_num(rep.schmidt_number)}")
    return _finish(lines)


def load_spectrum(text: str):
    from .schmidt import EntanglementReport, SchmidtSpectrum

    _, _, body = _split(text)
    try:
        split = next(i for i, (_, cells) in enumerate(body) if cells[0] == "entropy_bits")
    except StopIteration:
        raise ParseError("missing summary header entropy_bits,purity,schmidt_number") from None
    if body[0][1] != ["n", "lambda"]:
        raise ParseError("expected header n,lambda", body[0][0])
    lam = [_float(cells[1], lineno, 2) for lineno, cells in body[1:split]]
    lineno, cells = body[split + 1]
    summary = EntanglementReport(*(_float(c, lineno, j + 1) for j, c in enumerate(cells)))
    eigen = np.array(lam)
    eigen.setflags(write=False)
    return SchmidtSpectrum(eigen, eigen.size), summary


def format_curves(curves, config_hash=None) -> str:
    """``bandwidth_nm,entropy_bits,purity`` rows; several curves are stacked
    with a ``pm_kind`` column."""
    curves = list(curves)
    lines = header(config_hash, kind="entropy_curve",
                   pm_kind=";".join(c.pm_kind for c in curves))
    if len(curves) == 1:
        lines.append("bandwidth_nm,entropy_bits,purity")
        c = curves[0]
        for b, e, p in zip(c.bandwidths_nm, c.entropy_bits, c.purity):
            lines.append(f"{_num(b)},{_num(e)},{_num(p)}")
    else:
        lines.append("pm_kind,bandwidth_nm,entropy_bits,purity")
        for c in curves:
            for b, e, p in zip(c.bandwidths_nm, c.entropy_bits, c.purity):
                lines.append(f"{c.pm_kind},{_num(b)},{_num(e)},{_num(p)}")
    return _finish(lines)


def load_curves(text: str):
    from .sweep import EntropyCurve

    meta, _, body = _split(text)
    if not body:
        raise ParseError("curve file is empty")
    names = body[0][1]
    kinds = meta.get("pm_kind", "gaussian").split(";")
    rows = {k: [] for k in kinds}
    for lineno, cells in body[1:]:
        if len(cells) != len(names):
            raise ParseError(f"expected {len(names)} fields, found {len(cells)}", lineno)
        if names[0] == "pm_kind":
            kind, cells = cells[0], cells[1:]
            if kind not in rows:
                raise ParseError(f"unexpected pm_kind {kind!r}", lineno, 1)
        else:
            kind = kinds[0]
        rows[kind].append([_float(c, lineno, j + 1) for j, c in enumerate(cells)])
    curves = []
    for kind in kinds:
        data = np.array(rows[kind], dtype=float).reshape(-1, 3)
        curves.append(EntropyCurve(data[:, 0], data[:, 1], data[:, 2], kind))
    return curves
