"""foakit: first-order ambisonics encoding, localization, metrics and a diffusion sandbox."""

__version__ = "0.1.0"
SCENE_FORMAT_VERSION = 1
EMBEDDING_FORMAT = "EMB1"
WAV_CONVENTION = "fuma_eq1"

from foakit.errors import (  # noqa: E402
    DivergenceError,
    NoEstimateError,
    NotPositiveSemidefiniteError,
    NumericalError,
    ValidationError,
)
from foakit.foa import (  # noqa: E402
    ChannelConvention,
    FoaBuffer,
    MonoBuffer,
    SphericalPosition,
    convert_convention,
    decode_virtual_mic,
    encode_foa,
    encode_foa_trajectory,
    wrap_azimuth,
)
from foakit.localization import (  # noqa: E402
    DoaEstimate,
    IntensityTrack,
    estimate_doa,
    estimate_doa_timeline,
    intensity_vectors,
    localize,
)
from foakit.spatializer import (  # noqa: E402
    EventSpec,
    RoomSpec,
    SceneSpec,
    apply_distance_attenuation,
    load_scene,
    render_scene,
    synth_reverb_tail,
)

__all__ = [
    "ChannelConvention",
    "DivergenceError",
    "DoaEstimate",
    "EventSpec",
    "FoaBuffer",
    "IntensityTrack",
    "MonoBuffer",
    "NoEstimateError",
    "NotPositiveSemidefiniteError",
    "NumericalError",
    "RoomSpec",
    "SceneSpec",
    "SphericalPosition",
    "ValidationError",
    "apply_distance_attenuation",
    "convert_convention",
    "decode_virtual_mic",
    "encode_foa",
    "encode_foa_trajectory",
    "estimate_doa",
    "estimate_doa_timeline",
    "intensity_vectors",
    "load_scene",
    "localize",
    "render_scene",
    "synth_reverb_tail",
    "wrap_azimuth",
]
