# Code library: constellations and space-time encoders
