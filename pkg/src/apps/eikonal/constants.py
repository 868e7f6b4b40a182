"""Constants for the eikonal app."""


class FieldConfig:
    """
    Clipping and kernel constants of the three fields.
    """
    # One voxel: the smallest resolvable distance.
    EPSILON = 0.025
    # One frame at 60 fps.
    EPSILON_T = 1.0 / 60.0
    SIGMA = 0.05
    ARRIVAL_HORIZON = 2.0
    CHANNELS = ("d_t", "d_o", "d_toa")


class MarchDiagnostics:
    NO_PASSABLE_SOURCE = "all sources impassable; arrival is +inf everywhere"


class ErrorMessages:
    NO_SOURCES = "Fast marching needs at least one source cell."
    NEGATIVE_SOURCE = "Source values must be non-negative."
    NEGATIVE_SPEED = "Finite speeds must be non-negative."
    BAD_SIGMA = "Kernel width sigma must be strictly positive."
    DEMO_INSIDE = "Every demonstration sample lies inside a solid."
    GEOMETRY_MISMATCH = "Field channels must share one grid geometry."
    EMPTY_DEMO = "The demonstration trajectory has no samples."
