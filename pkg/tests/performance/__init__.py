"""Performance benchmarks and convergence acceptance runs."""
