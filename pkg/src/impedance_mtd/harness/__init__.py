"""Capture campaigns, trace archives, experiments and the command line."""
from .archive import TraceArchive, read_archive, write_archive
from .capture import base_state, calibrate_noise, capture
from .config import CampaignConfig, validate_config
from .experiments import attack_archive, report, sweep, sweep_csv

__all__ = [
    "CampaignConfig", "TraceArchive", "attack_archive", "base_state", "calibrate_noise", "capture",
    "read_archive", "report", "sweep", "sweep_csv", "validate_config", "write_archive",
]
