"""Toric machinery: exact cones and lattices, moment maps and the cut-down construction."""

from .lattice import (ConeSpec, FaceReport, GoodReport, LensSpace, cone_faces, extreme_rays,
                      integer_kernel, is_good, is_zbasis, lens_space_info, smith_invariants)
from .moment import (LermanReport, MomentConeReport, TorusActionSpec, alpha_moment_map,
                     lerman_pipeline, moment_cone_sample, normalize_contact_form)

__all__ = ["ConeSpec", "FaceReport", "GoodReport", "LensSpace", "cone_faces", "extreme_rays",
           "integer_kernel", "is_good", "is_zbasis", "lens_space_info", "smith_invariants",
           "LermanReport", "MomentConeReport", "TorusActionSpec", "alpha_moment_map",
           "lerman_pipeline", "moment_cone_sample", "normalize_contact_form"]
