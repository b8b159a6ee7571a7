"""CPForge - crease pattern compiler and evaluator."""
