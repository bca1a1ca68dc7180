#!/usr/bin/env python3
"""Regenerate the bundled data files. Deterministic; run from the repo root."""

from pathlib import Path

from geomds.geometry import save_mesh
from geomds.synth import bumpy_grid_mesh

ROOT = Path(__file__).resolve().parent.parent


def main():
    data = ROOT / "data"
    data.mkdir(exist_ok=True)
    # 2016-vertex wavy sheet: the desk-scale evaluation mesh
    mesh = bumpy_grid_mesh(63, 32, 2.0, 1.0, amplitude=0.3, bumps_x=2, bumps_y=1)
    save_mesh(mesh, data / "wavy_sheet.off")
    print(f"wrote {data / 'wavy_sheet.off'} (p={mesh.vertex_count}, f={mesh.face_count})")


if __name__ == "__main__":
    main()
