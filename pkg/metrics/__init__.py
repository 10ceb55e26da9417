# Metrics module: brute-force algebraic oracles
