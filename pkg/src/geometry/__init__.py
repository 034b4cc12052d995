# Planar geometry kernel
