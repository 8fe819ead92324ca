"""STRIPS planning toolkit: PDDL front end, plan graph and four solvers."""

__version__ = "0.1.0"
