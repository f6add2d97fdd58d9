"""Rendering of CLI outputs: binary PPM images and matplotlib figures.

Every renderer takes the rows of a CSV file written by the CLI (as read back by
:func:`read_csv`), so images are pure functions of the delimited output.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import hsv_to_rgb  # noqa: E402

__all__ = [
    "ERR_CLAMP",
    "bench_figure",
    "error_rgb",
    "grid_arrays",
    "grid_figure",
    "phase_rgb",
    "poles_figure",
    "read_csv",
    "read_ppm",
    "render_grid_ppms",
    "unstable_figure",
    "write_ppm",
]

#: relative errors are clamped to this range for display only
ERR_CLAMP = (1e-16, 1.0)


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _float(text: str) -> float:
    return float(text) if text not in ("", None) else math.nan


def grid_arrays(rows: list[dict]) -> dict:
    """Image-shaped arrays (row 0 = largest imaginary part) from grid CSV rows."""
    n_re = max(int(r["i_re"]) for r in rows) + 1
    n_im = max(int(r["i_im"]) for r in rows) + 1
    f = np.full((n_im, n_re), np.nan + 0j)
    err = np.full((n_im, n_re), np.nan)
    k = np.full((n_im, n_re), np.nan)
    sec = np.full((n_im, n_re), np.nan)
    re = np.zeros(n_re)
    im = np.zeros(n_im)
    for r in rows:
        i, j = int(r["i_im"]), int(r["i_re"])
        f[i, j] = complex(_float(r["re_f"]), _float(r["im_f"]))
        err[i, j] = _float(r["rel_err"])
        k[i, j] = _float(r["k"])
        sec[i, j] = _float(r["seconds"])
        re[j] = _float(r["re_z"])
        im[i] = _float(r["im_z"])
    return {"f": f, "rel_err": err, "k": k, "seconds": sec, "re": re, "im": im}


def phase_rgb(values: np.ndarray) -> np.ndarray:
    """Domain colouring: hue = arg f on the RGB wheel; non-finite cells black."""
    values = np.asarray(values, dtype=complex)
    with np.errstate(invalid="ignore"):
        hue = np.nan_to_num((np.angle(values) / (2 * np.pi)) % 1.0)
    hsv = np.stack([hue, np.ones_like(hue), np.ones_like(hue)], axis=-1)
    rgb = hsv_to_rgb(hsv)
    rgb[~np.isfinite(values)] = 0
    return np.round(rgb * 255).astype(np.uint8)


def error_rgb(rel_err: np.ndarray) -> np.ndarray:
    """``log10`` of the clamped error through the viridis map; missing cells grey."""
    e = np.asarray(rel_err, dtype=float)
    lo, hi = ERR_CLAMP
    t = (np.log10(np.clip(e, lo, hi)) - math.log10(lo)) / (math.log10(hi) - math.log10(lo))
    rgb = matplotlib.colormaps["viridis"](np.nan_to_num(t))[..., :3]
    rgb[~np.isfinite(e)] = 0.5
    return np.round(rgb * 255).astype(np.uint8)


def write_ppm(path, rgb: np.ndarray) -> None:
    """Binary PPM (P6), 8 bits per channel."""
    rgb = np.ascontiguousarray(rgb, dtype=np.uint8)
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    if fields[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(data[pos + 1 : pos + 1 + 3 * w * h], dtype=np.uint8).reshape(h, w, 3)


def render_grid_ppms(csv_path, out_dir, stem: str) -> list[Path]:
    """Phase portrait and (when errors are present) clamped error map as PPM."""
    a = grid_arrays(read_csv(csv_path))
    out_dir = Path(out_dir)
    paths = [out_dir / f"{stem}_phase.ppm"]
    write_ppm(paths[0], phase_rgb(a["f"]))
    if np.isfinite(a["rel_err"]).any():
        paths.append(out_dir / f"{stem}_error.ppm")
        write_ppm(paths[1], error_rgb(a["rel_err"]))
    return paths


def _extent(a):
    re, im = a["re"], a["im"]
    return [re.min(), re.max(), im.min(), im.max()]


def grid_figure(csv_path, png_path, title: str = "") -> Path:
    """Four panels: phase portrait, clamped relative error, order k, time per cell."""
    a = grid_arrays(read_csv(csv_path))
    ext = _extent(a)
    fig, axes = plt.subplots(2, 2, figsize=(9, 8), constrained_layout=True)
    axes[0, 0].imshow(phase_rgb(a["f"]), extent=ext, aspect="auto")
    axes[0, 0].set_title("phase")
    lo, hi = ERR_CLAMP
    if np.isfinite(a["rel_err"]).any():
        im = axes[0, 1].imshow(np.log10(np.clip(a["rel_err"], lo, hi)), extent=ext, aspect="auto", vmin=-16, vmax=0)
        fig.colorbar(im, ax=axes[0, 1])
    axes[0, 1].set_title("log10 relative error")
    im = axes[1, 0].imshow(a["k"], extent=ext, aspect="auto")
    fig.colorbar(im, ax=axes[1, 0])
    axes[1, 0].set_title("order k")
    im = axes[1, 1].imshow(a["seconds"] * 1e6, extent=ext, aspect="auto")
    fig.colorbar(im, ax=axes[1, 1])
    axes[1, 1].set_title("time [us]")
    for ax in axes.flat:
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
    if title:
        fig.suptitle(title)
    fig.savefig(png_path, dpi=100)
    plt.close(fig)
    return Path(png_path)


def unstable_figure(csv_path, png_path) -> Path:
    """Approximate and true relative errors against k, one panel per transformation."""
    rows = read_csv(csv_path)
    k = np.array([int(r["k"]) for r in rows])
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True, constrained_layout=True)
    for ax, method in zip(axes, ("drummond", "weniger")):
        for variant, style in (("direct", "--"), ("stable", "-")):
            for which in ("approx", "true"):
                col = f"{method}_{variant}_{which}"
                y = np.array([_float(r[col]) for r in rows])
                ax.semilogy(k, np.clip(y, 1e-17, 1e17), style, label=f"{variant} {which}")
        ax.set_title(method)
        ax.set_xlabel("k")
        ax.legend(fontsize="small")
    axes[0].set_ylabel("relative error")
    fig.savefig(png_path, dpi=100)
    plt.close(fig)
    return Path(png_path)


def poles_figure(csv_path, png_path) -> Path:
    rows = read_csv(csv_path)
    z = np.array([complex(_float(r["re_zeta"]), _float(r["im_zeta"])) for r in rows])
    fig, ax = plt.subplots(figsize=(5, 5), constrained_layout=True)
    ax.plot(z.real, z.imag, "o", ms=4)
    ax.axhline(0, color="0.7", lw=0.5)
    ax.axvline(0, color="0.7", lw=0.5)
    ax.set_xlabel("Re zeta")
    ax.set_ylabel("Im zeta")
    ax.set_title(f"{rows[0]['case']} n={rows[0]['n']} k={rows[0]['k']}" if rows else "")
    fig.savefig(png_path, dpi=100)
    plt.close(fig)
    return Path(png_path)


def bench_figure(csv_path, png_path) -> Path:
    rows = read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(5, 4), constrained_layout=True)
    for method in sorted({r["method"] for r in rows}):
        sel = [r for r in rows if r["method"] == method and int(r["k"]) > 0]
        ax.loglog([int(r["k"]) for r in sel], [_float(r["seconds"]) for r in sel], "o-", label=method)
    ax.set_xlabel("k")
    ax.set_ylabel("median seconds")
    ax.legend()
    fig.savefig(png_path, dpi=100)
    plt.close(fig)
    return Path(png_path)
