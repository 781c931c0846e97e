# Config module initialization