# Raster type and lossless image codecs
