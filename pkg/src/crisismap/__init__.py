"""Geolocation support for rapid mapping: gazetteer-backed toponym
resolution with context-graph disambiguation, an embedded spatiotemporal
store, and a GeoJSON HTTP layer service."""

__version__ = "0.1.0"
