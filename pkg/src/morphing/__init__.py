# Landmark and latent face morphing
