"""Scene-driven command line interface."""

from .scene import Scene, parse_scene
from .tasks import Options, TaskResult, Workspace, emit_plane_field_grid, run_task

__all__ = ["Scene", "parse_scene", "Options", "TaskResult", "Workspace", "emit_plane_field_grid", "run_task"]
