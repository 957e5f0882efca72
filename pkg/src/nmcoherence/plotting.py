"""Deterministic SVG line charts of simulated coherence curves."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .csvio import CsvTable  # noqa: E402

WIDTH_PX, HEIGHT_PX = 800, 500
_DPI = 72

STYLES = {
    "lines": {"linewidth": 1.2},
    "paper": {"linewidth": 1.0},
}


def render_svg(table: CsvTable, comments: list[str] = (), style: str = "lines", title: str | None = None) -> bytes:
    """One curve per non-time column, legend from the header.

    The output depends only on the table, comments, style and title: the
    figure size, the SVG id salt and the metadata are all pinned.
    """
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}; choose from {', '.join(STYLES)}")
    rc = {
        "svg.hashsalt": "nmcoherence",
        "svg.fonttype": "path",
        "font.family": "DejaVu Sans",
        "path.simplify": False,
    }
    with plt.rc_context(rc):
        fig, ax = plt.subplots(figsize=(WIDTH_PX / _DPI, HEIGHT_PX / _DPI), dpi=_DPI)
        t = table.data[:, 0]
        for j, name in enumerate(table.header[1:], start=1):
            (line,) = ax.plot(t, table.data[:, j], label=name, **STYLES[style])
            line.set_gid(f"curve-{j}")
        ax.set_xlabel(table.header[0])
        ax.set_ylabel("coherence")
        ax.set_xlim(t[0], t[-1])
        if title:
            ax.set_title(title)
        ax.legend(loc="upper right", fontsize="small")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    svg = buf.getvalue()
    if comments:
        # provenance as XML comments right after the prolog
        block = "".join(f"<!-- {c.replace('--', '- -')} -->\n" for c in comments)
        head, sep, rest = svg.partition("?>\n")
        svg = head + sep + block + rest if sep else block + svg
    return svg.encode("utf-8")


def write_svg(path, table: CsvTable, comments: list[str] = (), style: str = "lines", title: str | None = None) -> None:
    with open(path, "wb") as fh:
        fh.write(render_svg(table, comments, style, title))
