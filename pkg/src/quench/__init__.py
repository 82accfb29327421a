"""Quenches between twists: branching, closed forms and schedules."""
