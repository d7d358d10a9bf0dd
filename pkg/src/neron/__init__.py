"""Component groups and local cohomology of tori."""
