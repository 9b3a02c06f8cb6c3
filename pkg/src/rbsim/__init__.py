"""Two-qubit randomized benchmarking simulator and analysis toolkit.

The package models a fixed-frequency two-transmon device whose
entangling gate is an echoed cross-resonance pulse, enumerates the full
two-qubit Clifford group exactly, runs standard / interleaved /
simultaneous randomized benchmarking against configurable noise, fits
the resulting decays, and verifies gates by process tomography with a
physicality projection.
"""

__version__ = "0.1.0"
