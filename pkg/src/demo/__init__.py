# Synthetic end-to-end demo dataset
