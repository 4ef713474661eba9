"""Train track maps, limit currents and North-South dynamics for free group automorphisms."""
