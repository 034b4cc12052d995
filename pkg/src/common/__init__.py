# Shared errors and configuration
