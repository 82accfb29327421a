"""Model and schedule files, output rendering and the reproduction suite."""
