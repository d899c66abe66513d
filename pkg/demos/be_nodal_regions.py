"""Be nodal regions: Hartree-Fock versus the two-configuration function.

Runs in a few seconds.  Prints the rotation-path check, the region count and
an ASCII picture of one cross-section (t1 across, t2 up) for each function.
"""

import numpy as np

from nodalqmc.configuration import ElectronConfiguration, make_be_reference_point, random_positions
from nodalqmc.nodal import CrossSectionSpec, scan_cross_section
from nodalqmc.topology import ReferencePoint, count_nodal_regions, rotation_path_test
from nodalqmc.wavefunction import build_be_hf, build_be_two_config

CHARS = {1: "+", -1: "-", 0: "0"}


def ascii_grid(cs, stride=2):
    return "\n".join("".join(CHARS[int(s)] for s in row[::stride]) for row in cs.signs.T[::-stride])


def main():
    star = make_be_reference_point([1.0, 0.3, 0.2], [0.4, 1.2, -0.3])
    rays = np.array([[1, 0, 0], [0, 1, 0], [1, 0.3, 0], [0.2, 1, 0]], dtype=float)
    spec = CrossSectionSpec(rays, (1.0, 1.0), 0.8, 41)
    rng = np.random.default_rng(3)
    for label, wf in [("Hartree-Fock", build_be_hf(4.0, 1.4)),
                      ("two-config, c2 = 0.1", build_be_two_config(0.1, 4.0, 1.4, 1.2))]:
        print(f"== {label}")
        rot = rotation_path_test(wf, star)
        if rot.max_deviation is None:
            print(f"rotation path: {rot.note}")
            # psi vanishes at R*, so count from a generic point instead
            ref = ReferencePoint.at(wf, ElectronConfiguration(random_positions(rng, 4, 1.5), wf.spins, 4))
        else:
            print(f"rotation path: {rot.outcome}, largest relative change {rot.max_deviation:.1e}")
            ref = star
        rc = count_nodal_regions(wf, ref)
        print(f"nodal regions (upper bound): {rc.count}, from {rc.bound} permutation images")
        print(ascii_grid(scan_cross_section(wf, spec)))
        print()


if __name__ == "__main__":
    main()
