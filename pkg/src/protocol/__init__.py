# Dataset manifests and morph pairing protocols
