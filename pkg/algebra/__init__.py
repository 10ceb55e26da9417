# Algebra module: linear algebra core and lattice generator construction
