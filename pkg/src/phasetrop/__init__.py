"""Tropical and phase tropical degenerations of hypersurfaces in the complex torus."""
