"""Service layer: parsing, the concrete oracle, game construction, solving and refinement."""
