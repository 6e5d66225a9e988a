"""Gagliardo-Nirenberg constants, thresholds and the fiber landscape."""
