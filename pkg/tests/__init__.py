# Test module initialization