"""Curriculum analytics and study-plan validation toolkit.

Ingests campus-management CSV exports, derives event logs and KPIs,
replays study paths against recommended-plan Petri nets, validates
individual plans against a regulation rule set, and mines new
recommendation defaults from historic data.
"""

__version__ = "0.1.0"
