# Services module initialization