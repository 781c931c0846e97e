# Handlers module initialization