# Simulator module: MMSE-DFE + sphere decoding link simulation
