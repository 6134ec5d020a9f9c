"""Tabulate the smooth benchmark fields referenced by configs/*.json."""

from pathlib import Path

import numpy as np

from fracwave.fieldio import write_field
from fracwave.spectral import Field, make_grid

OUT = Path(__file__).resolve().parents[1] / "configs" / "fields"


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    g64 = make_grid(1, 64, 2 * np.pi)
    x = g64.coords()[0]
    tables = {
        "cos1_n64": (g64, np.cos(x)),
        # variable-coefficient forced benchmark
        "g_var_n64": (g64, 1 + 0.3 * np.cos(x)),
        "m_var_n64": (g64, 0.5 + 0.2 * np.sin(x)),
        "b_var_n64": (g64, 0.1 * (1 + np.cos(x))),
        "u1_var_n64": (g64, 0.3 * np.sin(x)),
        "f_var_n64": (g64, np.sin(x) + 0.5 * np.cos(2 * x)),
    }
    g256 = make_grid(1, 256, 1.0)
    y = g256.coords()[0]
    tables.update({
        "sin2pi_n256": (g256, np.sin(2 * np.pi * y)),
        "half_cos4pi_n256": (g256, 0.5 * np.cos(4 * np.pi * y)),
        "cos2pi_centered_n256": (g256, np.cos(2 * np.pi * (y - 0.5))),
    })
    for name, (grid, arr) in tables.items():
        write_field(OUT / f"{name}.csv", Field(grid, arr))
        print(f"wrote {name}.csv")


if __name__ == "__main__":
    main()
