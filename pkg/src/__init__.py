# Source module initialization