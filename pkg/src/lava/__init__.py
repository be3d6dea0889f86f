"""LAVA engine: event analytics with human-defined indicators.

The package is organised as a pipeline: events are ingested into an
append-only store, scoped and filtered into typed tables, run through
pluggable analytics methods, and rendered as declarative chart specs
that can be embedded anywhere via request-code snippets.
"""

__version__ = "0.1.0"
