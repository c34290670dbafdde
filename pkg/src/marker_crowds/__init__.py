"""Deterministic 2D crowd simulation driven by marker competition.

Agents steer by capturing point markers scattered over free space and
weighting them by goal alignment, comfort, and an extraversion factor.
The package runs headless for metrics and figures, and live behind a
WebSocket server with a human-steered avatar.
"""

from .behaviors import BehaviorMode, Variant, comfort, comfort_bias
from .config import (
    AvatarConfig,
    AvatarMode,
    ConfigError,
    PRESET_NAMES,
    ScenarioConfig,
    SpawnGroup,
    parse_config,
    preset,
    render_config,
)
from .engine import (
    AVATAR_ID,
    Agent,
    Avatar,
    Participation,
    SimState,
    apply_avatar_input,
    auction_markers,
    build_state,
    iter_states,
    run,
    step,
)
from .markers import EmptyFieldError, MarkerField, generate_markers
from .metrics import GroupMetrics, compute_group_metrics, convex_hull_area
from .recording import (
    AgentState,
    AvatarState,
    FrameRecord,
    export_trajectories,
    frame_from_state,
    import_trajectories,
    state_hash,
)

__version__ = "1.0.0"

__all__ = [
    "AVATAR_ID",
    "Agent",
    "AgentState",
    "Avatar",
    "AvatarConfig",
    "AvatarMode",
    "AvatarState",
    "BehaviorMode",
    "ConfigError",
    "EmptyFieldError",
    "FrameRecord",
    "GroupMetrics",
    "MarkerField",
    "PRESET_NAMES",
    "Participation",
    "ScenarioConfig",
    "SimState",
    "SpawnGroup",
    "Variant",
    "apply_avatar_input",
    "auction_markers",
    "build_state",
    "comfort",
    "comfort_bias",
    "compute_group_metrics",
    "convex_hull_area",
    "export_trajectories",
    "frame_from_state",
    "generate_markers",
    "import_trajectories",
    "iter_states",
    "parse_config",
    "preset",
    "render_config",
    "run",
    "state_hash",
    "step",
]
